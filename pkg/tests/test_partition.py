import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowstretch.generators import cycle, grid, path
from lowstretch.graph import GraphError, MultiGraph
from lowstretch.metrics import monte_carlo
from lowstretch.partition import C_PARTITION, partition, shift_rate, sssp

from oracles import bellman_ford, components, floyd_warshall, random_connected


def test_sssp_examples():
    g = MultiGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)])
    dist, parent = sssp(g, [(0, 0.0)])
    assert dist.tolist() == [0, 1, 3]
    g = MultiGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    dist, parent = sssp(g, [(0, 0.0), (2, 0.0)])
    assert dist.tolist() == [0, 1, 0]
    assert parent[1] == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 50), st.integers(0, 60), st.integers(0, 2**32 - 1))
def test_sssp_matches_bellman_ford(n, extra, seed):
    rng = np.random.default_rng(seed)
    edges = random_connected(n, extra, rng)
    g = MultiGraph.from_edges(n, edges)
    k = int(rng.integers(1, min(n, 3) + 1))
    sources = [(int(s), float(rng.integers(0, 5))) for s in rng.choice(n, k, replace=False)]
    dist, parent, pedge = sssp(g, sources, return_edges=True)
    assert np.allclose(dist, bellman_ford(n, edges, sources), rtol=0, atol=1e-9)
    # parents realise the distances
    for x in range(n):
        if parent[x] >= 0:
            e = pedge[x]
            assert {int(g.u[e]), int(g.v[e])} == {x, int(parent[x])}
            assert math.isclose(dist[x], dist[parent[x]] + g.length[e], abs_tol=1e-9)


def test_partition_trivial_cases():
    rng = np.random.default_rng(0)
    # one piece is only likely, not certain: a vertex whose shift beats its
    # neighbour's by more than the edge length starts its own piece
    runs = [partition(path(3), 10.0, np.random.default_rng(seed)) for seed in range(2000)]
    single = np.mean([pr.k == 1 for pr in runs])
    assert single >= 1 - 2 * C_PARTITION * math.log(3) / 10 - 3 * math.sqrt(0.25 / 2000)
    for pr in runs:
        assert len(pr.tree_edges) + len(pr.cut_edges) == 2 and pr.k == len(pr.cut_edges) + 1
    one = partition(MultiGraph(1, np.empty(0), np.empty(0), np.empty(0)), 3.0, rng)
    assert one.k == 1 and len(one.tree_edges) == 0
    with pytest.raises(GraphError):
        partition(path(3), 0.0, rng)


def check_partition(g, pr, d):
    dist = floyd_warshall(g.n, list(g.edges()))
    assert np.all(pr.radius <= d / 2 + 1e-9)
    # certificate trees span their piece
    lab = components(g.n, [(int(g.u[e]), int(g.v[e])) for e in pr.tree_edges])
    assert len(set(lab)) == pr.k
    for e in pr.tree_edges:
        assert pr.piece[g.u[e]] == pr.piece[g.v[e]]
    cut = pr.piece[g.u] != pr.piece[g.v]
    assert sorted(np.flatnonzero(cut).tolist()) == sorted(pr.cut_edges.tolist())
    for piece in pr.pieces():
        assert dist[np.ix_(piece, piece)].max() <= d + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 40), st.floats(1.0, 30.0), st.integers(0, 2**32 - 1))
def test_partition_properties(n, extra, d, seed):
    rng = np.random.default_rng(seed)
    g = MultiGraph.from_edges(n, random_connected(n, extra, rng, maxlen=3))
    check_partition(g, partition(g, d, rng), d)


def test_partition_deterministic():
    g = grid(7, 7)
    a = partition(g, 6.0, np.random.default_rng(11))
    b = partition(g, 6.0, np.random.default_rng(11))
    for f in ("piece", "center", "parent", "tree_edges", "cut_edges", "shifts", "radius"):
        assert np.array_equal(getattr(a, f), getattr(b, f))


def test_shift_rate():
    assert math.isclose(shift_rate(8.0, math.log(64)), 4 * math.log(64) / 8)


def test_cut_probability_cycle():
    g, d = cycle(64), 8.0
    trials = 3000
    stats = monte_carlo(lambda rng: cut_vector(g, d, rng), trials, seed=5)
    bound = C_PARTITION * math.log(64) / d
    assert np.all(stats.mean - 3 * np.sqrt(bound * (1 - min(bound, 1)) / trials) <= bound)


def cut_vector(g, d, rng):
    pr = partition(g, d, rng)
    return (pr.piece[g.u] != pr.piece[g.v]).astype(float)
