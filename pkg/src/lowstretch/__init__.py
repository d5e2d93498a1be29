"""Low l_p-stretch embeddable Steiner trees from hierarchical decompositions."""

__version__ = "0.1.0"

from .akpw import AKPWDecomposition, akpw, akpw_cut_edges, check_akpw, connect_level
from .bartal import (BartalDecomposition, DiameterSequence, decompose_simple, make_diameter_sequence,
                     moment_switch, validate_decomposition)
from .generators import generate
from .graph import GraphError, MultiGraph, normalize, read_edge_list, write_edge_list
from .metrics import laplacian_sandwich_check, tree_stretch, verify_embedding
from .partition import partition, sssp
from .treebuild import SteinerTree, build_tree, expand_implicit
from .trees import RootedTree, contract_tree, offline_lca_contract
from .twostage import ScopeParams, decompose_two_stage, full_pipeline, scope

__all__ = [
    "AKPWDecomposition", "BartalDecomposition", "DiameterSequence", "GraphError", "MultiGraph",
    "RootedTree", "ScopeParams", "SteinerTree", "akpw", "akpw_cut_edges", "build_tree", "check_akpw",
    "connect_level", "contract_tree", "decompose_simple", "decompose_two_stage", "expand_implicit",
    "full_pipeline", "generate", "laplacian_sandwich_check", "make_diameter_sequence", "moment_switch",
    "normalize", "offline_lca_contract", "partition", "read_edge_list", "scope", "sssp", "tree_stretch",
    "validate_decomposition", "verify_embedding", "write_edge_list",
]
