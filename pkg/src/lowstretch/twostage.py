"""Top-down partitioning on top of a fixed bottom-up clustering.

At diameter ``d_i`` only clusters of the clustering level ``scope(i)`` are
visible: the top-down pass partitions the quotient of the previous level's
components by those clusters.  Quotient edges shorter than the cluster
scale are lengthened to ``delta**(scope+1)`` ("floating" edges) and edges
too long for the level are dropped, exactly as in the plain top-down pass.

Levels are stored implicitly.  A level keeps the certificate edges the
partition produced plus, for each piece that merged two or more clusters,
the list of cluster ids.  Everything else is a cluster on its own and needs
no storage.  :meth:`ImplicitDecomposition.expand` materialises the explicit
forests when a test or a small run wants them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .akpw import AKPWDecomposition, akpw, akpw_cut_edges
from .bartal import (BartalDecomposition, DiameterSequence, halving_sequence, level_scales,
                     switched_lengths)
from .graph import GraphError, MultiGraph, forest_diameters, normalize
from .partition import C_PARTITION, partition


@dataclass(frozen=True)
class ScopeParams:
    q: float
    delta: float
    mode: str = "full"
    k: float | None = None

    def __post_init__(self):
        if self.mode not in ("full", "simplified"):
            raise ValueError("mode must be 'full' or 'simplified'")
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")

    @property
    def offset(self) -> float:
        """Exponent gap between a level's diameter and its visible cluster scale."""
        return 3.0 if self.mode == "simplified" else 1.0 / (1.0 - self.q) + 1.0

    @classmethod
    def simplified(cls, k: float, log_n: float, q: float) -> "ScopeParams":
        return cls(q, k * log_n, "simplified", k)


def scope(d: float, params: ScopeParams) -> int:
    """Largest ``j`` with ``delta**(j + offset) <= d``; negative means no clusters."""
    if not d > 0:
        raise ValueError("diameter must be positive")
    delta, off = params.delta, params.offset
    j = math.floor(math.log(d) / math.log(delta) - off)
    while delta ** (j + 1 + off) <= d:
        j += 1
    while delta ** (j + off) > d:
        j -= 1
    return j


@dataclass
class ImplicitLevel:
    d: float
    scope: int
    explicit: np.ndarray          # certificate edge ids, sorted
    piece_ptr: np.ndarray         # CSR over pieces with two or more clusters
    piece_clusters: np.ndarray    # cluster ids at level ``scope``

    @property
    def n_pieces(self) -> int:
        return len(self.piece_ptr) - 1

    def size(self) -> int:
        return len(self.explicit) + len(self.piece_clusters)


@dataclass
class Trace:
    participation: np.ndarray     # per edge: levels in which it was handed to partition
    level_sizes: list             # per level: number of edges handed to partition
    floating: np.ndarray          # per edge: levels in which it was floating
    skipped: list                 # levels whose scoped quotient had no edges


@dataclass
class ImplicitDecomposition:
    n: int
    levels: list                  # ImplicitLevel per level; level 0 is the whole final cluster tree
    dd: DiameterSequence          # diameters in the units of ``base``
    base: np.ndarray              # per-edge length the decomposition was built on
    first_cut: np.ndarray
    log_n: float
    clustering: AKPWDecomposition
    scales: np.ndarray = None     # per-level length multipliers, applied lazily
    ignored: np.ndarray = None    # simplified mode: AKPW-cut or floating-cut edge ids
    trace: Trace = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scales is None:
            self.scales = np.ones(len(self.levels))

    @property
    def t(self) -> int:
        return len(self.levels) - 1

    @property
    def d(self) -> np.ndarray:
        return np.asarray(self.dd.d) * self.scales

    def stored_size(self) -> int:
        return sum(lv.size() for lv in self.levels)

    def clusters(self, i: int) -> np.ndarray:
        return self.clustering.clusters(self.levels[i].scope)

    def labels(self, i: int) -> np.ndarray:
        """Component label of every vertex at level ``i``.

        Pieces get labels ``0..P-1``; a lone cluster ``c`` gets ``P + c``.
        """
        lv = self.levels[i]
        cl = self.clusters(i)
        return _labels_from_pieces(cl, lv.piece_ptr, lv.piece_clusters)

    def level_edges(self, i: int) -> np.ndarray:
        lv = self.levels[i]
        inside = self.clustering.level_edges(lv.scope) if lv.scope >= 0 else np.empty(0, dtype=np.int64)
        return np.union1d(inside, lv.explicit)

    def expand(self) -> BartalDecomposition:
        levels = []
        for i in range(len(self.levels)):
            ids = self.level_edges(i)
            levels.append((ids, self.base[ids] * self.scales[i]))
        d = self.d
        ratio = max(b / a for a, b in zip(d, d[1:])) if len(d) > 1 else 0.5
        return BartalDecomposition(self.n, levels, DiameterSequence(tuple(d), min(max(ratio, 1e-12), 0.999999)),
                                   self.first_cut.copy(), self.log_n, dict(self.meta, route="expanded"))


def _labels_from_pieces(cl, ptr, members):
    n_pieces = len(ptr) - 1
    piece_of = np.full(len(cl), -1, dtype=np.int64)
    piece_of[members] = np.repeat(np.arange(n_pieces), np.diff(ptr))
    p = piece_of[cl]
    return np.where(p >= 0, p, n_pieces + cl)


def decompose_two_stage(g: MultiGraph, dd: DiameterSequence, clustering: AKPWDecomposition, params: ScopeParams,
                        rng: np.random.Generator, divisor: float = 3.0, log_n: float | None = None) -> ImplicitDecomposition:
    """Top-down pass over ``g`` starting from the final clustering tree."""
    n, m = g.n, g.m
    if abs(clustering.delta - params.delta) > 1e-9 * params.delta:
        raise GraphError(f"clustering built with delta={clustering.delta!r}, params say {params.delta!r}")
    if log_n is None:
        log_n = clustering.log_n
    if params.mode == "full" and params.delta < (C_PARTITION * log_n) ** (1.0 / (1.0 - params.q)):
        warnings.warn("delta is below the full-mode requirement; cut bounds are not guaranteed", stacklevel=2)
    u, v, base = g.u, g.v, g.length
    s = clustering.s
    empty = np.empty(0, dtype=np.int64)
    levels = [ImplicitLevel(dd[0], s, empty, np.zeros(1, dtype=np.int64), empty)]
    label = np.zeros(n, dtype=np.int64)
    first_cut = np.full(m, dd.t, dtype=np.int64)
    uncut = np.ones(m, dtype=bool)
    participation = np.zeros(m, dtype=np.int64)
    floating_count = np.zeros(m, dtype=np.int64)
    floating_cut = np.zeros(m, dtype=bool)
    level_sizes, skipped = [0], []
    for i in range(1, dd.t + 1):
        j = min(scope(dd[i], params), s)
        cl = clustering.clusters(j)
        floor_len = params.delta ** (j + 1) if j >= 0 else 0.0
        raised = np.maximum(base, floor_len)
        lim = dd[i] / log_n if log_n > 0 else math.inf
        visible = uncut & (cl[u] != cl[v])
        active = np.flatnonzero(visible & (raised < lim))
        floating = active[base[active] < floor_len]
        participation[active] += 1
        floating_count[floating] += 1
        level_sizes.append(int(active.size))
        if active.size:
            touched, local = np.unique(np.concatenate([cl[u[active]], cl[v[active]]]), return_inverse=True)
            h = MultiGraph(len(touched), local[:active.size], local[active.size:], raised[active], active)
            pr = partition(h, dd[i] / divisor, rng, log_n)
            sizes = np.bincount(pr.piece, minlength=pr.k)
            big = np.flatnonzero(sizes >= 2)
            order = np.argsort(pr.piece, kind="stable")
            keep = np.isin(pr.piece[order], big)
            members = touched[order[keep]]
            ptr = np.zeros(len(big) + 1, dtype=np.int64)
            np.cumsum(sizes[big], out=ptr[1:])
            explicit = np.sort(active[pr.tree_edges])
        else:
            skipped.append(i)
            members, ptr, explicit = empty, np.zeros(1, dtype=np.int64), empty
        # pieces are listed in center order, members of a piece in cluster order
        levels.append(ImplicitLevel(dd[i], j, explicit, ptr, members))
        label = _labels_from_pieces(cl, ptr, members)
        sep = uncut & (label[u] != label[v])
        first_cut[sep] = i
        floating_cut[floating[sep[floating]]] = True
        uncut &= ~sep
    trace = Trace(participation, level_sizes, floating_count, skipped)
    dec = ImplicitDecomposition(n, levels, dd, base.copy(), first_cut, log_n, clustering, trace=trace,
                                meta={"route": "two-stage", "mode": params.mode, "delta": params.delta})
    if params.mode == "simplified":
        aku = np.zeros(m, dtype=bool)
        aku[akpw_cut_edges(clustering, g)] = True
        dec.ignored = np.flatnonzero(aku | floating_cut)
        dec.meta["akpw_cut"] = int(aku.sum())
        dec.meta["floating_cut"] = int((floating_cut & ~aku).sum())
    return dec


@dataclass
class ParticipationStats:
    counts: np.ndarray
    level_sizes: list
    mean: float
    max: int
    total: int
    skipped_levels: int


def participation_stats(dec: ImplicitDecomposition) -> ParticipationStats:
    tr = dec.trace
    if tr is None:
        raise ValueError("decomposition was built without a trace")
    c = tr.participation
    return ParticipationStats(c, list(tr.level_sizes), float(c.mean()) if c.size else 0.0,
                              int(c.max(initial=0)), int(c.sum()), len(tr.skipped))


# -- the whole pipeline --------------------------------------------------------

def default_delta(p: float, log_n: float, c: float = C_PARTITION) -> float:
    q = (1.0 + p) / 2.0
    return (c * log_n) ** (1.0 / (q - p))


def simplified_p(k: float, log_n: float) -> float:
    return 1.0 - 1.0 / math.log(k * log_n)


#: clustering needs delta > 6 to merge anything; tiny graphs would fall below it
MIN_DELTA = 8.0
#: below about 4 ln n a clustering round merges a vanishing fraction of clusters
MIN_DELTA_PER_LOG = 4.0


@dataclass
class PipelineResult:
    graph: MultiGraph             # the normalised input
    unit: float                   # factor that was divided out of the lengths
    p: float
    q: float
    params: ScopeParams
    clustering: AKPWDecomposition
    decomposition: ImplicitDecomposition
    tree: object = None
    attempts: int = 1
    budget_met: bool = True       # simplified mode: |S| within the retry budget

    @property
    def ignored(self):
        return self.decomposition.ignored


def full_pipeline(g: MultiGraph, p: float | None = None, mode: str = "full", k: float | None = None,
                  rng: np.random.Generator | None = None, seed: int | None = None, delta: float | None = None,
                  build_tree: bool = True, max_attempts: int = 10, ignored_budget: float = 4.0) -> PipelineResult:
    """Embeddable low-stretch Steiner tree of ``g``.

    ``mode="simplified"`` clusters with ``delta = k ln n`` and reports the
    ignored edge set.  A simplified run is repeated, at most ``max_attempts``
    times, while more than ``ignored_budget * m / k`` edges are ignored;
    ``budget_met`` reports whether the last attempt was within budget.
    """
    from .treebuild import expand_implicit

    if rng is None:
        rng = np.random.default_rng(seed)
    gn, _ = normalize(g)
    unit = float(g.length.min()) if g.m else 1.0
    n = gn.n
    if n < 2:
        raise GraphError("need at least two vertices")
    log_n = math.log(n)
    if mode == "simplified":
        if k is None:
            raise ValueError("simplified mode needs k")
        if p is None:
            p = simplified_p(k, log_n)
    elif p is None:
        raise ValueError("full mode needs p")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    q = (1.0 + p) / 2.0
    if delta is None:
        delta = k * log_n if mode == "simplified" else default_delta(p, log_n)
    delta = max(delta, MIN_DELTA, MIN_DELTA_PER_LOG * log_n)
    params = ScopeParams(q, delta, mode, k)
    gp = gn.with_lengths(switched_lengths(gn.length, p, q))
    result = None
    for attempt in range(1, max(1, max_attempts) + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            clustering = akpw(gp, delta, rng, log_n)
        forest = clustering.forest
        diam = float(forest_diameters(n, gp.u[forest], gp.v[forest], gp.length[forest]).max(initial=0.0))
        # headroom for rounding: the level-0 diameter is re-summed after scaling
        d0 = max(diam, float(gp.length.max()) * log_n) * (1.0 + 1e-9)
        dd = halving_sequence(d0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dec = decompose_two_stage(gp, dd, clustering, params, rng, 3.0, log_n)
        dec.scales = level_scales(dd.d, p, q, log_n)
        dec.meta.update(p=p, q=q)
        ok = mode != "simplified" or len(dec.ignored) <= ignored_budget * gn.m / k
        result = PipelineResult(gn, unit, p, q, params, clustering, dec, attempts=attempt, budget_met=ok)
        if ok:
            break
    if build_tree:
        result.tree = expand_implicit(gn, result.decomposition).scaled(unit)
    return result
