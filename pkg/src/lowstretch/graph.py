"""Weighted multigraphs, union-find, quotient graphs and length buckets.

Edges are identified by their index in the edge arrays.  That index is kept
through every quotient operation, so forests built on contracted graphs can
always be traced back to edges of the input graph.
"""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected multigraph on vertices ``0..n-1``.

    ``eid`` holds the identity of each edge.  For a freshly built graph this is
    simply ``arange(m)``; quotient graphs keep the ids of the parent graph.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    length: np.ndarray
    eid: np.ndarray = None
    _adj: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=np.int64)
        v = np.ascontiguousarray(self.v, dtype=np.int64)
        length = np.ascontiguousarray(self.length, dtype=np.float64)
        if not (u.shape == v.shape == length.shape):
            raise GraphError("edge arrays must have equal length")
        eid = np.arange(len(u), dtype=np.int64) if self.eid is None else np.asarray(self.eid, dtype=np.int64)
        if len(u) and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= self.n):
            raise GraphError("edge endpoint out of range")
        if np.any(u == v):
            raise GraphError("self-loops are not allowed")
        for name, arr in (("u", u), ("v", v), ("length", length), ("eid", eid)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n: int, edges) -> "MultiGraph":
        edges = list(edges)
        if not edges:
            return cls(n, np.empty(0), np.empty(0), np.empty(0))
        u, v, length = zip(*edges)
        return cls(n, np.array(u), np.array(v), np.array(length, dtype=float))

    @property
    def m(self) -> int:
        return len(self.u)

    @property
    def weight(self) -> np.ndarray:
        return 1.0 / self.length

    def edges(self):
        return list(zip(self.u.tolist(), self.v.tolist(), self.length.tolist()))

    def with_lengths(self, length) -> "MultiGraph":
        return MultiGraph(self.n, self.u, self.v, np.asarray(length, dtype=float), self.eid)

    def adjacency(self):
        """CSR adjacency: ``(indptr, nbr, local_edge)`` with both directions."""
        if self._adj is None:
            heads = np.concatenate([self.u, self.v])
            tails = np.concatenate([self.v, self.u])
            local = np.concatenate([np.arange(self.m), np.arange(self.m)])
            order = np.lexsort((local, heads))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(heads, minlength=self.n), out=indptr[1:])
            object.__setattr__(self, "_adj", (indptr, tails[order], local[order]))
        return self._adj

    def adjacency_lists(self):
        """Per-vertex lists of ``(neighbour, local edge index)``; handy for Python loops."""
        indptr, nbr, loc = self.adjacency()
        nbr_l, loc_l, ptr = nbr.tolist(), loc.tolist(), indptr.tolist()
        return [list(zip(nbr_l[ptr[x]:ptr[x + 1]], loc_l[ptr[x]:ptr[x + 1]])) for x in range(self.n)]

    def component_labels(self) -> np.ndarray:
        uf = UnionFind(self.n)
        for a, b in zip(self.u.tolist(), self.v.tolist()):
            uf.union(a, b)
        return uf.labels()

    def is_connected(self) -> bool:
        return self.n <= 1 or int(self.component_labels().max()) == 0


class UnionFind:
    """Disjoint sets with union by rank and path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.count -= 1
        return True

    def labels(self) -> np.ndarray:
        """Component labels ``0..count-1`` numbered by smallest member."""
        roots = np.fromiter((self.find(x) for x in range(len(self.parent))), dtype=np.int64, count=len(self.parent))
        return canonical_labels(roots)


def canonical_labels(raw: np.ndarray) -> np.ndarray:
    """Relabel an arbitrary labelling to ``0..k-1`` in order of first occurrence."""
    raw = np.asarray(raw)
    if raw.size == 0:
        return raw.astype(np.int64)
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def normalize(g: MultiGraph) -> tuple[MultiGraph, float]:
    """Rescale lengths so the shortest edge has length 1; returns ``(graph, Δ)``."""
    if g.m and np.any(~(g.length > 0)):
        raise GraphError("edge lengths must be positive")
    if not g.is_connected():
        raise GraphError("graph must be connected")
    if g.m == 0:
        return g, 1.0
    lo = g.length.min()
    scaled = g.length / lo
    return g.with_lengths(scaled), float(scaled.max())


def quotient(g: MultiGraph, components) -> MultiGraph:
    """Contract each component to one vertex, keeping parallel edges.

    ``components`` is a :class:`UnionFind` or a per-vertex label array.  The
    quotient's vertices are numbered ``0..k-1`` in order of the smallest
    original vertex of each component.  Edges inside a component are dropped;
    surviving edges keep their ids.
    """
    labels = components.labels() if isinstance(components, UnionFind) else canonical_labels(components)
    k = int(labels.max()) + 1 if labels.size else 0
    cu, cv = labels[g.u], labels[g.v]
    keep = cu != cv
    return MultiGraph(k, cu[keep], cv[keep], g.length[keep], g.eid[keep])


@dataclass
class LengthBuckets:
    base: float
    index: np.ndarray          # bucket index per edge
    buckets: dict[int, np.ndarray]

    def __len__(self):
        return len(self.buckets)


def bucket_index(length, base: float) -> np.ndarray:
    """``floor(log_base(length))`` with exact correction at bucket boundaries."""
    length = np.asarray(length, dtype=float)
    idx = np.floor(np.log(length) / math.log(base) + 1e-12).astype(np.int64)
    # one step of correction each way settles any rounding in the log
    idx -= (np.power(base, idx.astype(float)) > length).astype(np.int64)
    idx += (np.power(base, (idx + 1).astype(float)) <= length).astype(np.int64)
    return idx


def bucket_by_length(g: MultiGraph, base: float) -> LengthBuckets:
    if not base > 1:
        raise GraphError("bucket base must exceed 1")
    idx = bucket_index(g.length, base)
    order = np.argsort(idx, kind="stable")
    keys, starts = np.unique(idx[order], return_index=True)
    bounds = list(starts[1:]) + [len(order)]
    buckets = {int(k): order[s:e] for k, s, e in zip(keys, starts, bounds)}
    return LengthBuckets(base, idx, buckets)


def _tree_sweep(adj, source):
    dist = {source: 0.0}
    stack = [source]
    while stack:
        x = stack.pop()
        for y, w in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + w
                stack.append(y)
    far = max(dist, key=lambda x: (dist[x], -x))
    return far, dist


def component_diameter(g: MultiGraph, forest_edges, component) -> float:
    """Weighted diameter of ``component`` inside the forest given by edge indices.

    Two sweeps on a tree are exact.  ``forest_edges`` indexes ``g``'s edges;
    optional per-edge lengths can be passed as pairs ``(edge, length)``.
    """
    comp = set(int(x) for x in component)
    if not comp:
        raise GraphError("empty component")
    adj: dict[int, list] = {x: [] for x in comp}
    for item in forest_edges:
        e, w = (item if isinstance(item, tuple) else (item, None))
        a, b = int(g.u[e]), int(g.v[e])
        if a in comp and b in comp:
            w = float(g.length[e]) if w is None else float(w)
            adj[a].append((b, w))
            adj[b].append((a, w))
    start = min(comp)
    far, dist = _tree_sweep(adj, start)
    if len(dist) != len(comp):
        raise GraphError("component is not connected in the forest")
    _, dist2 = _tree_sweep(adj, far)
    return max(dist2.values())


def forest_diameters(n: int, u, v, length, labels=None) -> np.ndarray:
    """Diameter of every tree of a forest, indexed by component label."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if labels is None:
        uf = UnionFind(n)
        for a, b in zip(u.tolist(), v.tolist()):
            uf.union(a, b)
        labels = uf.labels()
    k = int(labels.max()) + 1 if n else 0
    adj = [[] for _ in range(n)]
    for a, b, w in zip(u.tolist(), v.tolist(), np.asarray(length, dtype=float).tolist()):
        adj[a].append((b, w))
        adj[b].append((a, w))
    diam = np.zeros(k)
    seen = np.zeros(n, dtype=bool)
    for s in range(n):
        if seen[s] or not adj[s]:
            seen[s] = True
            continue
        far, dist = _tree_sweep(adj, s)
        for x in dist:
            seen[x] = True
        _, dist2 = _tree_sweep(adj, far)
        diam[labels[s]] = max(dist2.values())
    return diam


def dijkstra_all(g: MultiGraph, source: int) -> np.ndarray:
    """Plain single-source distances; used by tests and small utilities."""
    adj = g.adjacency_lists()
    lengths = g.length.tolist()
    dist = [math.inf] * g.n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, e in adj[x]:
            nd = d + lengths[e]
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return np.array(dist)


_N_HEADER = re.compile(r"#\s*n=(\d+)")


def read_edge_list(path) -> MultiGraph:
    """Parse ``u v length`` lines; ``#`` starts a comment.

    A ``# n=<count>`` comment, as written by :func:`format_edge_list`, fixes
    the vertex count so trailing isolated vertices survive a round trip.
    """
    edges = []
    n = 0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        declared = _N_HEADER.match(raw)
        if declared:
            n = max(n, int(declared.group(1)))
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"{path}:{lineno}: expected 'u v length'")
        a, b, w = int(parts[0]), int(parts[1]), float(parts[2])
        edges.append((a, b, w))
        n = max(n, a + 1, b + 1)
    return MultiGraph.from_edges(n, edges)


def format_edge_list(g: MultiGraph, header: str = "") -> str:
    lines = [f"# {h}" for h in header.splitlines() if h]
    lines.append(f"# n={g.n} m={g.m}")
    lines += [f"{a} {b} {w!r}" for a, b, w in g.edges()]
    return "\n".join(lines) + "\n"


def write_edge_list(g: MultiGraph, path, header: str = "") -> None:
    Path(path).write_text(format_edge_list(g, header))
