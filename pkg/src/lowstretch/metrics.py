"""Stretch, embedding checks, the Laplacian sandwich and Monte-Carlo helpers."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MultiGraph, UnionFind
from .trees import RootedTree

SLACK = 1e-9


@dataclass
class StretchReport:
    stretch: np.ndarray
    p: float
    excluded: np.ndarray = None       # edge ids left out of the aggregates

    @property
    def lp(self) -> np.ndarray:
        return self.stretch ** self.p

    @property
    def kept(self) -> np.ndarray:
        mask = np.ones(len(self.stretch), dtype=bool)
        if self.excluded is not None:
            mask[self.excluded] = False
        return mask

    @property
    def mean(self) -> float:
        return float(self.lp[self.kept].mean())

    @property
    def mean_stretch(self) -> float:
        return float(self.stretch[self.kept].mean())

    @property
    def max(self) -> float:
        return float(self.stretch[self.kept].max())

    def quantiles(self, qs=(0.5, 0.9, 0.99)) -> dict:
        s = self.stretch[self.kept]
        return {q: float(np.quantile(s, q)) for q in qs}

    def excluded_mean(self) -> float:
        if self.excluded is None or len(self.excluded) == 0:
            return float("nan")
        return float(self.lp[self.excluded].mean())


def tree_stretch(g: MultiGraph, tree, p: float = 1.0, exclude=None) -> StretchReport:
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if len(tree.pi) < g.n or np.any(tree.pi[:g.n] < 0):
        raise GraphError("tree does not cover every graph vertex")
    rt = RootedTree.from_edges(tree.n_total, tree.u, tree.v, tree.length, root=int(tree.pi[0]))
    dist = rt.distance(tree.pi[g.u], tree.pi[g.v])
    return StretchReport(dist / g.length, p, None if exclude is None else np.asarray(exclude, dtype=np.int64))


def decomposition_stretch(g: MultiGraph, dec, p: float = 1.0, exclude=None) -> StretchReport:
    """Stretch ``d_i / l(e)`` from the first level that separates each edge.

    Works on explicit decompositions and on implicit ones (whose ``d`` already
    includes the per-level scales).
    """
    d = np.asarray(dec.d.d if hasattr(dec.d, "d") else dec.d, dtype=float)
    if hasattr(dec, "levels") and isinstance(dec.levels[-1], tuple) and len(dec.levels[-1][0]):
        raise GraphError("last level is not empty; stretch is undefined")
    return StretchReport(d[dec.first_cut] / g.length, p, None if exclude is None else np.asarray(exclude))


# -- embeddings ------------------------------------------------------------------

@dataclass
class EmbeddingReport:
    congestion: float = 0.0            # max over graph edges of load / weight
    dilation: float = 0.0              # max over tree edges of path length / tree length
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self):
        head = "embedding ok" if self.ok else f"embedding FAILED: {self.problems[0]}"
        return f"{head} (congestion {self.congestion:.6g}, dilation {self.dilation:.6g})"


def verify_embedding(g: MultiGraph, tree, slack: float = SLACK) -> EmbeddingReport:
    rep = EmbeddingReport()
    n, nt = g.n, tree.n_total
    if nt > max(1, 2 * n - 1):
        rep.problems.append(f"{nt} tree vertices exceed 2n-1 = {2 * n - 1}")
    if tree.m != nt - 1:
        rep.problems.append(f"{tree.m} edges on {nt} vertices is not a tree")
    uf = UnionFind(nt)
    for a, b in zip(tree.u.tolist(), tree.v.tolist()):
        if not uf.union(a, b):
            rep.problems.append(f"tree edge {a}-{b} closes a cycle")
            break
    if uf.count != 1 and tree.m == nt - 1:
        rep.problems.append("tree is disconnected")
    if len(tree.pi) != n or np.any(tree.origin[tree.pi] != np.arange(n)):
        rep.problems.append("vertex map does not place every graph vertex on itself")
    ptr, ce, cw = tree.cert.ptr, tree.cert.edges, tree.cert.weights
    if len(ptr) != tree.m + 1 or ptr[-1] != len(ce) or len(cw) != len(ce):
        rep.problems.append("certificate shape does not match the tree")
        return rep
    if np.any(~(cw > 0)):
        rep.problems.append("non-positive certificate weight")
        return rep
    if len(ce) and (ce.min() < 0 or ce.max() >= g.m):
        rep.problems.append("certificate names an unknown graph edge")
        return rep
    load = np.bincount(ce, weights=cw, minlength=g.m)
    ratio = load * g.length
    rep.congestion = float(ratio.max(initial=0.0))
    if rep.congestion > 1 + slack:
        e = int(np.argmax(ratio))
        rep.problems.append(f"congestion {float(ratio[e])!r} on graph edge {e}")
    owner = np.repeat(np.arange(tree.m), np.diff(ptr))
    used = np.bincount(owner, weights=1.0 / cw, minlength=tree.m)
    dil = used / tree.length
    rep.dilation = float(dil.max(initial=0.0))
    if rep.dilation > 1 + slack:
        k = int(np.argmax(dil))
        rep.problems.append(f"dilation {float(dil[k])!r} on tree edge {k}")
    src, dst = tree.origin[tree.u], tree.origin[tree.v]
    loops = np.flatnonzero(src == dst)
    if loops.size:
        rep.problems.append(f"tree edge {int(loops[0])} maps both ends to graph vertex {int(src[loops[0]])}")
    bad = _broken_paths(g, tree, src, dst)
    if bad >= 0:
        rep.problems.append(f"certificate path of tree edge {bad} is not a walk between its end points")
    return rep


def _broken_paths(g, tree, src, dst) -> int:
    """First tree edge whose path is not a walk from ``src`` to ``dst``, or -1."""
    gu, gv = g.u.tolist(), g.v.tolist()
    ptr, ce = tree.cert.ptr.tolist(), tree.cert.edges.tolist()
    for k, (a, b) in enumerate(zip(src.tolist(), dst.tolist())):
        x = a
        for e in ce[ptr[k]:ptr[k + 1]]:
            if gu[e] == x:
                x = gv[e]
            elif gv[e] == x:
                x = gu[e]
            else:
                return k
        if x != b or ptr[k] == ptr[k + 1]:
            return k
    return -1


# -- Laplacian sandwich -----------------------------------------------------------

MAX_DENSE = 400


@dataclass
class OperatorCheckReport:
    n_graph: int
    n_total: int
    trials: int
    min_ratio: float
    max_ratio: float
    tol: float

    @property
    def ok(self) -> bool:
        return 0.5 - self.tol <= self.min_ratio and self.max_ratio <= 1.0 + self.tol


def laplacian(n: int, u, v, weight) -> np.ndarray:
    lap = np.zeros((n, n))
    np.add.at(lap, (u, v), -weight)
    np.add.at(lap, (v, u), -weight)
    np.add.at(lap, (u, u), weight)
    np.add.at(lap, (v, v), weight)
    return lap


def pseudoinverse(lap: np.ndarray) -> np.ndarray:
    """Dense pseudoinverse; the null space must be exactly the constants."""
    vals, vecs = np.linalg.eigh(lap)
    cutoff = 1e-10 * max(vals.max(initial=0.0), 1e-300)
    keep = vals > cutoff
    if lap.shape[0] - keep.sum() != 1:
        raise GraphError(f"Laplacian has {lap.shape[0] - keep.sum()} zero eigenvalues; graph is not connected")
    return (vecs[:, keep] / vals[keep]) @ vecs[:, keep].T


def laplacian_sandwich_check(g: MultiGraph, tree, trials: int = 100, tol: float = 1e-8,
                             rng: np.random.Generator | None = None) -> OperatorCheckReport:
    """Ratios ``x' P L_H^+ P' x / x' L_G^+ x`` for random ``x`` orthogonal to ones,
    where ``H`` is ``g`` plus the tree edges (weights ``1/length``)."""
    n, nt = g.n, tree.n_total
    if nt > MAX_DENSE:
        raise GraphError(f"combined graph has {nt} vertices; the dense check allows {MAX_DENSE}")
    rng = np.random.default_rng(0) if rng is None else rng
    lg = laplacian(n, g.u, g.v, g.weight)
    lh = laplacian(nt, np.concatenate([g.u, tree.u]), np.concatenate([g.v, tree.v]),
                   np.concatenate([g.weight, 1.0 / tree.length]))
    pg = pseudoinverse(lg)
    ph = pseudoinverse(lh)
    sel = ph[np.ix_(tree.pi, tree.pi)]
    x = rng.standard_normal((trials, n))
    x -= x.mean(axis=1, keepdims=True)
    num = np.einsum("ti,ij,tj->t", x, sel, x)
    den = np.einsum("ti,ij,tj->t", x, pg, x)
    r = num / den
    return OperatorCheckReport(n, nt, trials, float(r.min()), float(r.max()), tol)


# -- Monte Carlo ------------------------------------------------------------------

@dataclass
class MonteCarloStats:
    trials: int
    mean: np.ndarray
    var: np.ndarray
    z: float

    @property
    def stderr(self):
        return np.sqrt(self.var / self.trials)

    @property
    def ci(self):
        h = self.z * self.stderr
        return self.mean - h, self.mean + h


def _run_one(args):
    estimator, seq = args
    return np.asarray(estimator(np.random.default_rng(seq)), dtype=float)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("LOWSTRETCH_THREADS", "1")))
    except ValueError:
        return 1


def monte_carlo(estimator, trials: int, seed: int = 0, z: float = 3.0, workers: int | None = None) -> MonteCarloStats:
    """Average ``estimator(rng)`` over independent trials.

    Trial ``k`` always gets the ``k``-th child of ``SeedSequence(seed)``, so
    results do not depend on how trials are spread over workers.
    """
    if trials <= 0:
        raise ValueError("need at least one trial")
    children = np.random.SeedSequence(seed).spawn(trials)
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            values = list(pool.map(_run_one, [(estimator, c) for c in children], chunksize=max(1, trials // (4 * workers))))
    else:
        values = [_run_one((estimator, c)) for c in children]
    arr = np.stack(values)
    mean = arr.mean(axis=0)
    var = arr.var(axis=0, ddof=1) if trials > 1 else np.zeros_like(mean)
    return MonteCarloStats(trials, mean, var, z)


# -- reports ----------------------------------------------------------------------

CSV_FIELDS = ("graph", "n", "m", "p", "seed", "metric", "value")


def format_csv(rows, header: str = "") -> str:
    """Rows of ``CSV_FIELDS`` sorted canonically; floats printed with ``repr``."""
    buf = io.StringIO()
    for h in header.splitlines():
        buf.write(f"# {h}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in sorted(rows, key=lambda r: tuple(r[:6])):
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def loglog_fit(x, y):
    """Least-squares ``log y = log a + b log x``; returns ``(a, b)``."""
    b, loga = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)
    return float(math.exp(loga)), float(b)
