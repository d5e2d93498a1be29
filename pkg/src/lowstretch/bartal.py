"""Top-down hierarchical decompositions and their validation.

A decomposition is a list of forests over the same vertex set, one per entry
of a decreasing diameter sequence.  Level 0 spans the graph, the last level is
empty, components only ever split going down, and every component of level
``i`` has diameter at most ``d[i]`` measured with that level's edge lengths.

Besides the plain top-down construction this module holds the moment switch:
run any decomposition on lengths ``l**(p/q)`` and rescale each level so that
the levels together use no more than the weight of every graph edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MultiGraph, UnionFind, forest_diameters
from .partition import partition, sssp


@dataclass(frozen=True)
class DiameterSequence:
    d: tuple
    ratio: float = 0.5

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        for a, b in zip(d, d[1:]):
            if not b <= self.ratio * a * (1 + 1e-12):
                raise ValueError("sequence is not geometrically decreasing")

    def __len__(self):
        return len(self.d)

    def __getitem__(self, i):
        return self.d[i]

    @property
    def t(self) -> int:
        return len(self.d) - 1


def halving_sequence(d0: float, floor: float = 1.0) -> DiameterSequence:
    """``d0, d0/2, d0/4, ...`` stopping at the first entry below ``floor``."""
    if not d0 > 0:
        raise ValueError("d0 must be positive")
    d = [float(d0)]
    while d[-1] >= floor:
        d.append(d[-1] / 2.0)
    return DiameterSequence(tuple(d), 0.5)


def make_diameter_sequence(n: int, delta: float) -> DiameterSequence:
    if n < 1 or delta < 1:
        raise ValueError("need n >= 1 and delta >= 1")
    return halving_sequence(2.0 * n * delta)


@dataclass
class BartalDecomposition:
    """Explicit levels.  ``levels[i]`` is ``(edge_ids, lengths)``."""

    n: int
    levels: list
    d: DiameterSequence
    first_cut: np.ndarray
    log_n: float
    meta: dict = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.levels) - 1

    def level_labels(self, g: MultiGraph, i: int) -> np.ndarray:
        ids, _ = self.levels[i]
        uf = UnionFind(self.n)
        for a, b in zip(g.u[ids].tolist(), g.v[ids].tolist()):
            uf.union(a, b)
        return uf.labels()

    def weight_sums(self, m: int) -> np.ndarray:
        """Per-edge total of ``1/level_length`` over all levels."""
        total = np.zeros(m)
        for ids, lengths in self.levels:
            np.add.at(total, ids, 1.0 / lengths)
        return total

    def size(self) -> int:
        return sum(len(ids) for ids, _ in self.levels)


def dump_decomposition(g: MultiGraph, dec: BartalDecomposition) -> str:
    lines = []
    for i, (ids, lengths) in enumerate(dec.levels):
        lines.append(f"level {i} {dec.d[i]!r}")
        for e, w in zip(ids.tolist(), lengths.tolist()):
            lines.append(f"edge {int(g.u[e])} {int(g.v[e])} {w!r}")
    return "\n".join(lines) + "\n"


# -- validation ------------------------------------------------------------

@dataclass
class Violation:
    condition: str
    level: int
    detail: str
    edge: int = -1


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    checked_levels: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self):
        return self.violations[0] if self.violations else None

    def __str__(self):
        if self.ok:
            return f"valid ({self.checked_levels} levels)"
        v = self.first
        return f"invalid: {v.condition} at level {v.level}: {v.detail}"


def validate_decomposition(g: MultiGraph, dec: BartalDecomposition, stop_at_first=False) -> ValidationReport:
    """Check the five structural conditions level by level.

    spanning-and-empty, weighted-subgraph, laminar, short-edges, diameter.
    """
    rep = ValidationReport()
    n, t = g.n, dec.t
    if len(dec.d) != len(dec.levels):
        rep.violations.append(Violation("shape", -1, "diameter and level counts differ"))
        return rep
    prev = None
    for i, (ids, lengths) in enumerate(dec.levels):
        rep.checked_levels = i + 1
        ids = np.asarray(ids, dtype=np.int64)
        lengths = np.asarray(lengths, dtype=float)
        bad = np.flatnonzero(lengths < g.length[ids])
        if bad.size:
            e = int(ids[bad[0]])
            rep.violations.append(Violation("subgraph", i, f"edge {e} shorter than in the graph", e))
        lim = dec.d[i] / dec.log_n if dec.log_n > 0 else math.inf
        bad = np.flatnonzero(lengths > lim)
        if bad.size:
            e = int(ids[bad[0]])
            rep.violations.append(Violation("short-edges", i, f"edge {e} longer than d_i/log n", e))
        uf = UnionFind(n)
        for e, a, b in zip(ids.tolist(), g.u[ids].tolist(), g.v[ids].tolist()):
            if not uf.union(a, b):
                rep.violations.append(Violation("forest", i, f"edge {e} closes a cycle", e))
                break
        labels = uf.labels()
        if i == 0 and uf.count != 1:
            rep.violations.append(Violation("spanning", 0, f"level 0 has {uf.count} components"))
        if i == t and len(ids):
            rep.violations.append(Violation("empty", t, f"last level keeps {len(ids)} edges", int(ids[0])))
        if prev is not None:
            # every current component must sit inside one previous component
            first_prev = np.full(labels.max() + 1, -1, dtype=np.int64)
            first_prev[labels[::-1]] = prev[::-1]
            clash = np.flatnonzero(first_prev[labels] != prev)
            if clash.size:
                rep.violations.append(Violation("laminar", i, f"vertex {int(clash[0])} joins two parent components"))
        diam = forest_diameters(n, g.u[ids], g.v[ids], lengths, labels)
        over = np.flatnonzero(diam > dec.d[i])
        if over.size:
            rep.violations.append(Violation("diameter", i, f"component diameter {float(diam[over[0]])!r} > {dec.d[i]!r}"))
        if stop_at_first and rep.violations:
            return rep
        prev = labels
    return rep


# -- stretch bookkeeping -----------------------------------------------------

def first_cut_levels(g: MultiGraph, dec: BartalDecomposition) -> np.ndarray:
    """Recompute first-cut levels from the component structure alone."""
    cut = np.full(g.m, dec.t, dtype=np.int64)
    done = np.zeros(g.m, dtype=bool)
    for i in range(dec.t + 1):
        lab = dec.level_labels(g, i)
        sep = (lab[g.u] != lab[g.v]) & ~done
        cut[sep] = i
        done |= sep
    return cut


# -- the simple top-down construction ----------------------------------------

def decompose_simple(g: MultiGraph, dd: DiameterSequence, rng: np.random.Generator,
                     log_n: float | None = None, divisor: float = 1.0) -> BartalDecomposition:
    """Top-down decomposition: shortest path tree first, then partition every
    component of the previous level at the next diameter."""
    n, m = g.n, g.m
    if log_n is None:
        log_n = math.log(n) if n > 1 else 0.0
    _, _, parent_edge = sssp(g, [(0, 0.0)], return_edges=True)
    tree = np.sort(parent_edge[parent_edge >= 0])
    levels = [(tree, g.length[tree].copy())]
    label = np.zeros(n, dtype=np.int64)
    first_cut = np.full(m, dd.t, dtype=np.int64)
    uncut = np.ones(m, dtype=bool)
    for i in range(1, dd.t + 1):
        lim = dd[i] / log_n if log_n > 0 else math.inf
        keep = np.flatnonzero(uncut & (g.length < lim))
        h = MultiGraph(n, g.u[keep], g.v[keep], g.length[keep], keep)
        pr = partition(h, dd[i] / divisor, rng, log_n)
        ids = keep[pr.tree_edges]
        levels.append((np.sort(ids), g.length[np.sort(ids)].copy()))
        label = pr.piece
        sep = uncut & (label[g.u] != label[g.v])
        first_cut[sep] = i
        uncut &= ~sep
    return BartalDecomposition(n, levels, dd, first_cut, log_n, {"route": "simple"})


# -- moment switching --------------------------------------------------------

def geometric_series_bound(c: float, eps: float) -> float:
    """``sum_{i>=0} c**(-i*eps)`` for ``c`` in ``[e, e**2]``."""
    if not (math.e - 1e-12 <= c <= math.e ** 2 + 1e-9):
        raise ValueError("c must lie in [e, e^2]")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if math.isinf(eps):
        return 1.0
    return 1.0 / (1.0 - c ** (-eps))


def _c_geo() -> float:
    best = 0.0
    for c in np.linspace(math.e, math.e ** 2, 41):
        for eps in np.linspace(1e-3, 1.0, 400):
            best = max(best, eps * geometric_series_bound(float(c), float(eps)))
    return best


#: sup of ``eps * sum_i c**(-i eps)`` over ``c`` in [e, e^2], ``eps`` in (0, 1];
#: attained at ``c = e``, ``eps = 1``.
C_GEO = _c_geo()


def switched_lengths(length, p: float, q: float) -> np.ndarray:
    _check_pq(p, q)
    return np.power(np.asarray(length, dtype=float), p / q)


def level_scales(d_prime, p: float, q: float, log_n: float, c_geo: float = C_GEO) -> np.ndarray:
    """Per-level multipliers applied to the decomposition of the switched graph."""
    _check_pq(p, q)
    d_prime = np.asarray(d_prime, dtype=float)
    return (c_geo / (q - p)) * np.power(d_prime / log_n, (q - p) / p)


def _check_pq(p, q):
    if not (0 < p < q < 1):
        raise ValueError("need 0 < p < q < 1")


def moment_switch(g: MultiGraph, p: float, q: float, inner, log_n: float | None = None,
                  c_geo: float = C_GEO) -> BartalDecomposition:
    """Run ``inner(g_switched)`` and rescale every level.

    ``inner`` maps a graph with lengths ``l**(p/q)`` to an explicit
    decomposition of it.  The result is a decomposition of ``g``.
    """
    _check_pq(p, q)
    if log_n is None:
        log_n = math.log(g.n) if g.n > 1 else 0.0
    if not log_n > 0:
        raise GraphError("moment switching needs at least two vertices")
    gp = g.with_lengths(switched_lengths(g.length, p, q))
    inner_dec = inner(gp)
    scales = level_scales(inner_dec.d.d, p, q, log_n, c_geo)
    levels = [(ids, lengths * s) for (ids, lengths), s in zip(inner_dec.levels, scales)]
    d = DiameterSequence(tuple(np.asarray(inner_dec.d.d) * scales), _scaled_ratio(inner_dec.d, p, q))
    meta = dict(inner_dec.meta, p=p, q=q, scales=scales, inner_d=inner_dec.d)
    return BartalDecomposition(g.n, levels, d, inner_dec.first_cut.copy(), log_n, meta)


def _scaled_ratio(dd: DiameterSequence, p, q):
    return min(0.999999, dd.ratio ** (1 + (q - p) / p))
