import math
import warnings

import numpy as np
import pytest

from lowstretch.akpw import akpw
from lowstretch.bartal import halving_sequence, validate_decomposition
from lowstretch.generators import grid, path
from lowstretch.graph import GraphError
from lowstretch.twostage import (ScopeParams, decompose_two_stage, default_delta, full_pipeline, participation_stats,
                                 scope, simplified_p)

from oracles import wide_graph


def test_scope_examples():
    assert scope(4.0 ** 5, ScopeParams(0.5, 4.0)) == 2
    assert scope(10.0 ** 4, ScopeParams(0.5, 10.0, "simplified", 1.0)) == 1
    assert scope(1.0, ScopeParams(0.5, 10.0, "simplified", 1.0)) < 0
    assert scope(1.0, ScopeParams(0.5, 4.0)) < 0
    with pytest.raises(ValueError):
        scope(0.0, ScopeParams(0.5, 4.0))


def test_scope_is_largest_admissible():
    params = ScopeParams(0.75, 7.0)
    for d in np.geomspace(1e-3, 1e12, 200):
        j = scope(float(d), params)
        assert 7.0 ** (j + params.offset) <= d < 7.0 ** (j + 1 + params.offset)


def test_params_validation():
    with pytest.raises(ValueError):
        ScopeParams(0.5, 4.0, "other")
    with pytest.raises(ValueError):
        ScopeParams(1.0, 4.0)
    with pytest.raises(ValueError):
        ScopeParams(0.5, 1.0)


def test_mismatched_delta():
    g = grid(4, 4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cl = akpw(g, 32.0, np.random.default_rng(0))
    with pytest.raises(GraphError):
        decompose_two_stage(g, halving_sequence(100.0), cl, ScopeParams(0.75, 64.0), np.random.default_rng(0))


def test_default_parameters():
    ln = math.log(256)
    assert math.isclose(default_delta(0.5, ln), (4 * ln) ** 4)
    assert math.isclose(simplified_p(16, ln), 1 - 1 / math.log(16 * ln))


def check_run(r):
    gn = r.graph
    dec = r.decomposition
    exp = dec.expand()
    rep = validate_decomposition(gn, exp)
    assert rep.ok, rep
    assert np.all(exp.weight_sums(gn.m) <= gn.weight * (1 + 1e-9))
    return dec


def test_grid_full_mode():
    for seed in range(5):
        check_run(full_pipeline(grid(16, 16), 0.5, seed=seed, build_tree=False))


@pytest.mark.parametrize("kw", [dict(mode="simplified", k=4.0), dict(mode="simplified", k=2.0),
                                dict(p=0.5, delta=20.0), dict(p=0.3)])
def test_wide_lengths(kw):
    rng = np.random.default_rng(9)
    for seed in range(4):
        g = wide_graph(80, rng)
        check_run(full_pipeline(g, seed=seed, build_tree=False, **kw))


def recount(r):
    """Participation and floating counts rebuilt from first-cut levels and the clustering."""
    dec = r.decomposition
    g = r.graph
    base = dec.base
    part = np.zeros(g.m, dtype=int)
    floating = np.zeros(g.m, dtype=int)
    delta = dec.meta["delta"]
    for i in range(1, dec.t + 1):
        lv = dec.levels[i]
        cl = dec.clustering.clusters(lv.scope)
        floor = delta ** (lv.scope + 1) if lv.scope >= 0 else 0.0
        alive = (dec.first_cut >= i) & (cl[g.u] != cl[g.v])
        active = alive & (np.maximum(base, floor) < dec.dd[i] / dec.log_n)
        part += active
        floating += active & (base < floor)
    return part, floating


def test_trace_accounting():
    rng = np.random.default_rng(2)
    g = wide_graph(100, rng)
    r = full_pipeline(g, mode="simplified", k=4.0, seed=3, build_tree=False)
    st = participation_stats(r.decomposition)
    assert st.total == sum(st.level_sizes)
    part, floating = recount(r)
    assert np.array_equal(part, r.decomposition.trace.participation)
    assert np.array_equal(floating, r.decomposition.trace.floating)
    assert floating.sum() > 0


def test_single_edge_participation():
    # the top diameter is the final cluster tree's diameter, 1 here, so at
    # level 1 (d = 1/2) the edge is already too long and is dropped unpartitioned
    r = full_pipeline(path(2), 0.5, seed=0, build_tree=False)
    st = participation_stats(r.decomposition)
    assert st.counts.tolist() == [0]
    assert r.decomposition.first_cut.tolist() == [1]


def test_participation_on_grid():
    g = grid(32, 32)
    means = [participation_stats(full_pipeline(g, 0.5, seed=s, build_tree=False).decomposition).mean for s in range(5)]
    assert np.mean(means) <= 2 + math.log(math.log(g.n))


def test_simplified_ignored_set():
    rng = np.random.default_rng(4)
    g = wide_graph(80, rng)
    r = full_pipeline(g, mode="simplified", k=4.0, seed=1, build_tree=False, max_attempts=1)
    dec = r.decomposition
    assert dec.meta["akpw_cut"] + dec.meta["floating_cut"] == len(dec.ignored)
    assert r.attempts == 1


def test_retry_loop_reports_budget():
    g = grid(12, 12)
    r = full_pipeline(g, mode="simplified", k=64.0, seed=0, build_tree=False, max_attempts=10)
    assert 1 <= r.attempts <= 10
    assert r.budget_met == (len(r.ignored) <= 4 * g.m / 64)
    full = full_pipeline(g, 0.5, seed=0, build_tree=False)
    assert full.budget_met and full.ignored is None


def test_pipeline_argument_errors():
    with pytest.raises(ValueError):
        full_pipeline(grid(3, 3))
    with pytest.raises(ValueError):
        full_pipeline(grid(3, 3), mode="simplified")
    with pytest.raises(ValueError):
        full_pipeline(grid(3, 3), 1.0)


@pytest.mark.xfail(reason="edge-tossing budget: measured k|S|/m is about 8 at k=8 on small grids, "
                          "because clustering partitions at delta/3; see decision log", strict=False)
def test_simplified_ignored_fraction_k8():
    g = grid(16, 16)
    worst = max(len(full_pipeline(g, mode="simplified", k=8.0, seed=s, build_tree=False).ignored) / g.m
                for s in range(100))
    assert worst <= 4 / 8
