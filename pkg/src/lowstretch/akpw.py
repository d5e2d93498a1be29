"""Bottom-up clustering into a monotone forest sequence.

Edges are bucketed by length in powers of ``delta``.  Round ``s`` looks at
the edges of buckets ``0..s`` that still join different clusters, gives them
unit length, partitions the cluster graph with diameter ``delta/3`` and adds
the certificate trees.  Cluster diameters at level ``j`` stay below
``delta**(j+1)`` because every round multiplies the hop radius by at most
``delta/3`` while edge lengths grow by at most ``delta``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MultiGraph, bucket_index, canonical_labels, forest_diameters
from .partition import C_PARTITION, partition
from .trees import RootedTree


class PersistentUnionFind:
    """Union by rank without path compression; every link remembers its time.

    ``connected_since(a, b)`` is the earliest time at which ``a`` and ``b``
    were in one set.  Times along a root path only increase, so the query
    walks up from whichever side linked earlier.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.time = [math.inf] * n

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def union(self, a: int, b: int, when: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.time[rb] = when
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def connected_since(self, a: int, b: int):
        parent, time = self.parent, self.time
        since = 0
        while a != b:
            if time[a] > time[b]:
                a, b = b, a
            if parent[a] == a:
                return math.inf
            since = max(since, time[a])
            a = parent[a]
        return since


@dataclass
class AKPWDecomposition:
    delta: float
    bucket: np.ndarray        # bucket index per edge
    join: np.ndarray          # level at which the edge enters the forest, -1 if never
    comps: list               # comps[j]: cluster label per vertex at level j
    rounds_in: np.ndarray     # number of rounds each edge took part in
    log_n: float
    tree: RootedTree = field(repr=False, default=None)
    uf: PersistentUnionFind = field(repr=False, default=None)

    @property
    def s(self) -> int:
        return len(self.comps) - 1

    @property
    def forest(self) -> np.ndarray:
        return np.flatnonzero(self.join >= 0)

    def level_edges(self, j: int) -> np.ndarray:
        """Edge ids of ``A_j``."""
        return np.flatnonzero((self.join >= 0) & (self.join <= j))

    def clusters(self, j: int) -> np.ndarray:
        """Cluster labels at level ``j``; negative levels are singletons."""
        if j < 0:
            return np.arange(len(self.comps[0]), dtype=np.int64)
        return self.comps[min(j, self.s)]


def akpw(g: MultiGraph, delta: float, rng: np.random.Generator, log_n: float | None = None,
         max_rounds: int = 1000) -> AKPWDecomposition:
    """Build the forest sequence.  ``log_n`` fixes the partition rate.

    Small ``delta`` makes rounds merge almost nothing; ``max_rounds`` turns
    that stall into an error instead of a hang.
    """
    n, m = g.n, g.m
    if log_n is None:
        log_n = math.log(n) if n > 1 else 0.0
    if not delta > 6:
        # a unit-length round at diameter delta/3 can only merge clusters when delta/6 > 1
        raise GraphError("delta must exceed 6")
    if delta < 2 * C_PARTITION * log_n:
        warnings.warn(f"delta={delta:.3g} is below 2*c_P*ln n={2 * C_PARTITION * log_n:.3g}; "
                      "cut-probability guarantees do not apply", stacklevel=2)
    if not g.is_connected():
        raise GraphError("graph must be connected")
    bucket = bucket_index(g.length, delta) if m else np.empty(0, dtype=np.int64)
    join = np.full(m, -1, dtype=np.int64)
    rounds_in = np.zeros(m, dtype=np.int64)
    label = np.arange(n, dtype=np.int64)
    comps = [label]
    uf = PersistentUnionFind(n)
    k = n
    s = 0
    while k > 1:
        eligible = np.flatnonzero((bucket <= s) & (label[g.u] != label[g.v]))
        rounds_in[eligible] += 1
        if eligible.size:
            q = MultiGraph(k, label[g.u[eligible]], label[g.v[eligible]], np.ones(eligible.size), eligible)
            pr = partition(q, delta / 3.0, rng, log_n)
            added = eligible[pr.tree_edges]
            join[added] = s + 1
            for a, b in zip(g.u[added].tolist(), g.v[added].tolist()):
                uf.union(a, b, s + 1)
            label = canonical_labels(pr.piece[label])
            k = int(label.max()) + 1
        comps.append(label)
        s += 1
        if s > max_rounds:
            raise GraphError(f"clustering did not finish within {max_rounds} rounds (delta too small?)")
    forest = np.flatnonzero(join >= 0)
    tree = RootedTree.from_edges(n, g.u[forest], g.v[forest], g.length[forest], edge_ids=forest, root=0)
    return AKPWDecomposition(float(delta), bucket, join, comps, rounds_in, log_n, tree, uf)


def connect_level(dec: AKPWDecomposition, u: int, v: int) -> int:
    """Smallest ``j`` with ``u`` and ``v`` in one cluster of ``A_j`` (0 if equal)."""
    if u == v:
        return 0
    return int(dec.uf.connected_since(int(u), int(v)))


def edge_connect_levels(dec: AKPWDecomposition, g: MultiGraph) -> np.ndarray:
    """Vectorised :func:`connect_level` for every edge of ``g``."""
    out = np.full(g.m, dec.s, dtype=np.int64)
    for j in range(dec.s, -1, -1):
        together = dec.comps[j][g.u] == dec.comps[j][g.v]
        out[together] = j
    return out


def akpw_cut_edges(dec: AKPWDecomposition, g: MultiGraph) -> np.ndarray:
    """Edges of bucket ``i`` whose endpoints are still apart in ``A_{i+1}``."""
    return np.flatnonzero(edge_connect_levels(dec, g) > dec.bucket + 1)


@dataclass
class AKPWReport:
    ok: bool
    problems: list


def check_akpw(dec: AKPWDecomposition, g: MultiGraph) -> AKPWReport:
    """Spanning, nested, diameter ``<= delta**(j+1)`` and bucket timing."""
    problems = []
    forest = dec.forest
    if len(forest) != g.n - 1:
        problems.append(f"final forest has {len(forest)} edges, expected {g.n - 1}")
    if int(dec.comps[-1].max(initial=0)) != 0:
        problems.append("final level is not spanning")
    for j in range(dec.s + 1):
        lab = dec.comps[j]
        if j:
            prev = dec.comps[j - 1]
            first = np.full(prev.max() + 1, -1, dtype=np.int64)
            first[prev[::-1]] = lab[::-1]
            if np.any(first[prev] != lab):
                problems.append(f"level {j - 1} does not refine level {j}")
        ids = dec.level_edges(j)
        diam = forest_diameters(g.n, g.u[ids], g.v[ids], g.length[ids], lab)
        if np.any(diam > dec.delta ** (j + 1)):
            problems.append(f"level {j}: diameter {float(diam.max())!r} > delta^{j + 1}")
    early = np.flatnonzero((dec.join >= 0) & (dec.join < dec.bucket + 1))
    if early.size:
        problems.append(f"edge {int(early[0])} joined before its bucket became eligible")
    return AKPWReport(not problems, problems)
