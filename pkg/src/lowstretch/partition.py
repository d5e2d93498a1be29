"""Low-diameter decomposition by exponentially shifted shortest paths.

Every vertex draws a head start ``s_v`` from an exponential distribution and
a single multi-source Dijkstra run, started at ``d/2 - s_v`` from each vertex,
assigns every vertex to the source that reaches it first.  The shortest path
forest restricted to a piece certifies its radius.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, MultiGraph

#: Cut-probability constant: an edge is cut with probability at most
#: ``C_PARTITION * l(e) * ln(n) / d``.  The shift rate is ``4 ln n / d`` and the
#: exponential race gives ``P[cut] <= 1 - exp(-rate * l) <= 4 l ln n / d``;
#: the Monte-Carlo suite confirms the fitted constant stays below this value.
C_PARTITION = 4.0


def _dijkstra(n, adj, lengths, init):
    """Multi-source Dijkstra.

    ``init`` maps source -> initial distance.  Heap entries are ordered by
    (distance, origin, vertex, parent) so ties go to the smaller origin, then
    the smaller parent; results are fully deterministic.
    """
    dist = [math.inf] * n
    radius = [0.0] * n
    parent = [-1] * n
    parent_edge = [-1] * n
    origin = [-1] * n
    heap = [(d0, s, s, -1, -1, 0.0) for s, d0 in init]
    heapq.heapify(heap)
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        d, o, x, p, pe, r = pop(heap)
        if origin[x] != -1:
            continue
        dist[x], origin[x], parent[x], parent_edge[x], radius[x] = d, o, p, pe, r
        for y, e in adj[x]:
            if origin[y] == -1:
                w = lengths[e]
                nd = d + w
                if nd <= dist[y]:
                    dist[y] = nd
                    push(heap, (nd, o, y, x, e, r + w))
    return dist, parent, parent_edge, origin, radius


def sssp(g: MultiGraph, sources, return_edges: bool = False):
    """Shortest distances from an implicit super-source.

    ``sources`` is a list of ``(vertex, initial distance)``.  Returns
    ``(dist, parent)`` as numpy arrays; unreachable vertices get ``inf`` and
    parent ``-1``.  Equal distances resolve toward the smaller source id.
    With ``return_edges`` the local index of each parent edge comes third.
    """
    init = []
    for s, d0 in sources:
        if d0 < 0:
            raise GraphError("initial distances must be non-negative")
        init.append((float(d0), int(s)))
    init = [(d0, s) for d0, s in sorted(init)]
    best = {}
    for d0, s in init:
        best.setdefault(s, d0)
    dist, parent, parent_edge, _, _ = _dijkstra(g.n, g.adjacency_lists(), g.length.tolist(),
                                                [(s, d0) for s, d0 in best.items()])
    out = np.array(dist), np.array(parent, dtype=np.int64)
    if return_edges:
        out += (np.array(parent_edge, dtype=np.int64),)
    return out


@dataclass
class PartitionResult:
    piece: np.ndarray         # piece index per vertex
    center: np.ndarray        # center vertex per piece
    parent: np.ndarray        # certificate tree parent (-1 at centers)
    parent_edge: np.ndarray   # local edge index to the parent (-1 at centers)
    radius: np.ndarray        # distance to the piece center along the certificate
    tree_edges: np.ndarray    # local edge indices of all certificate trees
    cut_edges: np.ndarray     # local edge indices with endpoints in different pieces
    shifts: np.ndarray

    @property
    def k(self) -> int:
        return len(self.center)

    def pieces(self):
        order = np.argsort(self.piece, kind="stable")
        bounds = np.searchsorted(self.piece[order], np.arange(self.k + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.k)]


def shift_rate(d: float, log_n: float) -> float:
    return 2.0 * log_n / (d / 2.0)


def partition(g: MultiGraph, d: float, rng: np.random.Generator, log_n: float | None = None,
              adj=None) -> PartitionResult:
    """Split ``g`` into pieces of certified diameter at most ``d``.

    ``log_n`` defaults to ``ln(g.n)``; pipelines pass the log of the original
    vertex count so every call uses the same rate.  Shifts are clamped to
    ``d/2``, which makes the radius bound deterministic.
    """
    if not d > 0:
        raise GraphError("diameter parameter must be positive")
    n = g.n
    if log_n is None:
        log_n = math.log(n) if n > 1 else 0.0
    half = d / 2.0
    if log_n > 0:
        shifts = np.minimum(rng.exponential(1.0 / shift_rate(d, log_n), size=n), half)
    else:
        shifts = np.zeros(n)
    start = (half - shifts).tolist()
    if adj is None:
        adj = g.adjacency_lists()
    _, parent, parent_edge, origin, radius = _dijkstra(n, adj, g.length.tolist(), list(enumerate(start)))
    origin = np.array(origin, dtype=np.int64)
    centers, piece = np.unique(origin, return_inverse=True)
    parent_edge = np.array(parent_edge, dtype=np.int64)
    tree = parent_edge[parent_edge >= 0]
    cut = np.flatnonzero(piece[g.u] != piece[g.v]) if g.m else np.empty(0, dtype=np.int64)
    return PartitionResult(piece.astype(np.int64), centers, np.array(parent, dtype=np.int64), parent_edge,
                           np.array(radius), np.sort(tree), cut, shifts)
