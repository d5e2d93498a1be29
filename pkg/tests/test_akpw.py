import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowstretch.akpw import PersistentUnionFind, akpw, akpw_cut_edges, check_akpw, connect_level, edge_connect_levels
from lowstretch.generators import cycle
from lowstretch.graph import GraphError, MultiGraph

from oracles import components, random_connected


def star(k):
    return MultiGraph.from_edges(k + 1, [(0, i, 1.0) for i in range(1, k + 1)])


def quiet_akpw(g, delta, seed):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return akpw(g, delta, np.random.default_rng(seed))


def test_star_spans_after_one_round():
    for seed in range(30):
        dec = quiet_akpw(star(8), 16.0, seed)
        assert check_akpw(dec, star(8)).ok
        assert len(dec.forest) == 8
        # the star has hop diameter 2; a round only fails to span when a leaf outbids the center
        assert dec.s >= 1


def test_star_connect_levels():
    dec = quiet_akpw(star(8), 64.0, 0)
    assert dec.s == 1
    assert connect_level(dec, 1, 2) == 1
    assert connect_level(dec, 3, 3) == 0


def test_path_bucket_timing():
    delta = 8.0
    g = MultiGraph.from_edges(4, [(0, 1, 1.0), (1, 2, delta), (2, 3, delta ** 2)])
    dec = quiet_akpw(g, delta, 3)
    assert dec.bucket.tolist() == [0, 1, 2]
    assert np.all(dec.join >= dec.bucket + 1)
    assert check_akpw(dec, g).ok


def test_delta_checks():
    g = cycle(20)
    with pytest.raises(GraphError):
        akpw(g, 6.0, np.random.default_rng(0))
    with pytest.warns(UserWarning):
        akpw(g, 10.0, np.random.default_rng(0))
    with pytest.raises(GraphError, match="connected"):
        quiet_akpw(MultiGraph.from_edges(3, [(0, 1, 1.0)]), 64.0, 0)


def brute_connect_levels(dec, g):
    out = []
    per_level = []
    for j in range(dec.s + 1):
        ids = dec.level_edges(j)
        per_level.append(components(g.n, list(zip(g.u[ids].tolist(), g.v[ids].tolist()))))
    for a, b in zip(g.u.tolist(), g.v.tolist()):
        out.append(next(j for j in range(dec.s + 1) if per_level[j][a] == per_level[j][b]))
    return out, per_level


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 40), st.integers(0, 2**32 - 1))
def test_levels_match_brute_force(n, extra, seed):
    rng = np.random.default_rng(seed)
    edges = [(a, b, float(rng.choice([1.0, 3.0, 70.0, 5000.0]))) for a, b, _ in random_connected(n, extra, rng)]
    g = MultiGraph.from_edges(n, edges)
    dec = quiet_akpw(g, 64.0, seed)
    assert check_akpw(dec, g).ok
    want, per_level = brute_connect_levels(dec, g)
    assert edge_connect_levels(dec, g).tolist() == want
    assert [connect_level(dec, a, b) for a, b in zip(g.u.tolist(), g.v.tolist())] == want
    for j in range(dec.s + 1):
        assert np.array_equal(dec.clusters(j), np.array(per_level[j]))
    assert np.array_equal(dec.clusters(-1), np.arange(n))
    cut = akpw_cut_edges(dec, g)
    assert set(cut.tolist()) == {e for e in range(g.m) if want[e] > dec.bucket[e] + 1}


def test_persistent_union_find():
    uf = PersistentUnionFind(5)
    uf.union(0, 1, 1)
    uf.union(2, 3, 2)
    uf.union(1, 3, 4)
    assert uf.connected_since(0, 1) == 1
    assert uf.connected_since(2, 3) == 2
    assert uf.connected_since(0, 2) == 4
    assert uf.connected_since(0, 4) == math.inf
    assert uf.connected_since(4, 4) == 0


def test_cut_decay_small_run():
    g = cycle(256)
    ln = math.log(256)
    trials = 300
    cut = np.zeros(4)
    for seed in range(trials):
        dec = quiet_akpw(g, 64.0, seed)
        lev = edge_connect_levels(dec, g)
        for j in range(1, 4):
            cut[j] += np.mean(lev > j)
    # rates must at least fall off geometrically
    rates = cut[1:] / trials
    assert rates[1] < rates[0] and rates[2] <= rates[1]
