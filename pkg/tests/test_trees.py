import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowstretch.trees import RootedTree, TreeError, contract_tree, offline_lca_contract, tarjan_offline_lca

from oracles import brute_lca, floyd_warshall, random_tree


def rooted(n, edges, root=0):
    return RootedTree.from_edges(n, [a for a, _, _ in edges], [b for _, b, _ in edges], [w for *_, w in edges], root=root)


def as_contract_input(edges):
    return [(a, b, k) for k, (a, b, _) in enumerate(edges)], {k: w for k, (_, _, w) in enumerate(edges)}


def test_contract_path_example():
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    c = contract_tree(*_args(edges, [0, 3]))
    assert c.edges == [(0, 3, 3.0)]
    assert c.paths == [[0, 1, 2]]
    assert c.branch_nodes == []


def test_contract_star_example():
    edges = [(9, 1, 2.0), (9, 2, 5.0), (9, 3, 1.0)]
    c = contract_tree(*_args(edges, [1, 2]))
    assert c.edges == [(1, 2, 7.0)]


def test_contract_errors():
    with pytest.raises(TreeError):
        contract_tree([(0, 1, 0)], [])
    with pytest.raises(TreeError):
        contract_tree([(0, 1, 0)], [0, 5])


def _args(edges, terminals):
    e, lengths = as_contract_input(edges)
    return e, terminals, lengths


def check_contraction(n, edges, c, terminals):
    dist = floyd_warshall(n, edges)
    small_nodes = sorted(set(c.nodes))
    idx = {x: i for i, x in enumerate(small_nodes)}
    small = floyd_warshall(len(small_nodes), [(idx[a], idx[b], w) for a, b, w in c.edges])
    for a in terminals:
        for b in terminals:
            assert abs(small[idx[a], idx[b]] - dist[a, b]) <= 1e-9
    assert len(small_nodes) <= max(1, 2 * len(set(terminals)) - 1)
    assert len(c.edges) == len(small_nodes) - 1
    # paths really connect the end points with the recorded length
    for (a, b, w), path in zip(c.edges, c.paths):
        assert abs(sum(edges[e][2] for e in path) - w) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 200), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_contract_tree_vs_brute_force(n, k, seed):
    rng = np.random.default_rng(seed)
    edges = random_tree(n, rng)
    terminals = rng.choice(n, size=min(k, n), replace=False).tolist()
    check_contraction(n, edges, contract_tree(*_args(edges, terminals)), terminals)


def test_rooted_tree_lca_and_distance():
    rng = np.random.default_rng(3)
    n = 120
    edges = random_tree(n, rng)
    t = rooted(n, edges)
    parent = {0: None}
    parent.update({b: a for a, b, _ in edges})
    a = rng.integers(0, n, 300)
    b = rng.integers(0, n, 300)
    lca = t.lca(a, b)
    assert lca.tolist() == [brute_lca(parent, int(x), int(y)) for x, y in zip(a, b)]
    dist = floyd_warshall(n, edges)
    assert np.allclose(t.distance(a, b), dist[a, b], atol=1e-9)
    tarjan = tarjan_offline_lca(t, list(zip(a.tolist(), b.tolist())))
    assert tarjan == lca.tolist()


def test_tarjan_across_trees():
    t = RootedTree.from_edges(4, [0, 2], [1, 3], [1.0, 1.0], root=0)
    assert tarjan_offline_lca(t, [(0, 1), (1, 3), (2, 3)]) == [0, -1, 2]


def test_offline_singletons_and_errors():
    edges = random_tree(10, np.random.default_rng(0))
    t = rooted(10, edges)
    out = offline_lca_contract(t, [[3], [7]])
    assert [c.nodes for c in out] == [[3], [7]]
    forest = RootedTree.from_edges(4, [0, 2], [1, 3], [1.0, 1.0], root=0)
    with pytest.raises(TreeError, match="set 1"):
        offline_lca_contract(forest, [[0, 1], [1, 2]], labels=np.array([0, 0, 1, 1]))
    with pytest.raises(TreeError):
        offline_lca_contract(t, [[]])


def test_offline_balanced_binary_leaves():
    edges = [((i - 1) // 2, i, 1.0) for i in range(1, 15)]
    t = rooted(15, edges)
    leaves = list(range(7, 15))
    (c,) = offline_lca_contract(t, [leaves], lengths={k: 1.0 for k in range(14)})
    # internal LCAs survive except the root, which has degree two and is spliced out
    assert sorted(c.nodes) == list(range(1, 15))
    assert (1, 2, 2.0) in c.edges and len(c.edges) == 13
    assert same_contraction(c, contract_tree(*_args(edges, leaves)))


def same_contraction(x, y):
    return (x.terminals == y.terminals and sorted(x.nodes) == sorted(y.nodes)
            and sorted(x.edges) == sorted(y.edges)
            and sorted(map(tuple, x.paths)) == sorted(map(tuple, y.paths)))


@pytest.mark.parametrize("seed", range(3))
def test_offline_matches_contract_tree(seed):
    rng = np.random.default_rng(seed)
    n = 1000
    edges = random_tree(n, rng)
    t = RootedTree.from_edges(n, [a for a, _, _ in edges], [b for _, b, _ in edges], [w for *_, w in edges],
                              edge_ids=range(n - 1), root=int(rng.integers(n)))
    lengths = {k: w for k, (_, _, w) in enumerate(edges)}
    sets = [rng.choice(n, size=int(rng.integers(1, 30)), replace=False).tolist() for _ in range(100)]
    batch = offline_lca_contract(t, sets, lengths=lengths)
    for s, got in zip(sets, batch):
        want = contract_tree(*_args(edges, s))
        assert same_contraction(got, want)
