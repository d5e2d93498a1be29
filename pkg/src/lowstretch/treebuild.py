"""Steiner trees from decompositions, with embedding certificates.

Every component of level ``i`` links the centers of its children on level
``i+1`` through the contraction of its own level-``i`` forest.  Centers are
inherited downwards: a child that contains its parent's center keeps it,
any other child uses its smallest vertex.  Kept branch vertices of a
contraction become new Steiner vertices, numbered from ``n`` upwards in
level order, then by the parent component's center, then by vertex id.

Each tree edge is certified by the path of graph edges it contracts, with
weight ``1/level_length`` on every path edge.  Paths inside one contraction
are edge-disjoint, so the congestion of a graph edge is at most the sum of
its weights over all levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import MultiGraph, UnionFind
from .trees import RootedTree, TreeError, contract_tree, offline_lca_contract


@dataclass
class EmbeddingCertificate:
    """CSR layout: the path of tree edge ``k`` is ``edges[ptr[k]:ptr[k+1]]``."""

    ptr: np.ndarray
    edges: np.ndarray
    weights: np.ndarray

    def path(self, k: int):
        return self.edges[self.ptr[k]:self.ptr[k + 1]], self.weights[self.ptr[k]:self.ptr[k + 1]]


@dataclass
class SteinerTree:
    n_original: int
    n_total: int
    u: np.ndarray
    v: np.ndarray
    length: np.ndarray
    level: np.ndarray             # decomposition level that produced each edge
    pi: np.ndarray                # tree vertex of every original vertex
    origin: np.ndarray            # graph vertex each tree vertex sits on
    cert: EmbeddingCertificate

    @property
    def m(self) -> int:
        return len(self.u)

    def rooted(self) -> RootedTree:
        return RootedTree.from_edges(self.n_total, self.u, self.v, self.length, root=0)

    def scaled(self, factor: float) -> "SteinerTree":
        if factor == 1.0:
            return self
        cert = EmbeddingCertificate(self.cert.ptr, self.cert.edges, self.cert.weights / factor)
        return SteinerTree(self.n_original, self.n_total, self.u, self.v, self.length * factor, self.level,
                           self.pi, self.origin, cert)

    def same_as(self, other: "SteinerTree") -> bool:
        return (self.n_total == other.n_total and np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)
                and np.array_equal(self.length, other.length) and np.array_equal(self.origin, other.origin)
                and np.array_equal(self.cert.ptr, other.cert.ptr) and np.array_equal(self.cert.edges, other.cert.edges)
                and np.array_equal(self.cert.weights, other.cert.weights))

    # -- text format ---------------------------------------------------------
    def format(self, header: str = "", certificate: bool = True) -> str:
        lines = [f"# {h}" for h in header.splitlines() if h]
        lines.append(f"{self.n_total} {self.n_original}")
        lines += [f"{a} {b} {w!r}" for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.length.tolist())]
        lines += [f"map {x} {y}" for x, y in enumerate(self.pi.tolist())]
        lines += [f"origin {x} {y}" for x, y in enumerate(self.origin.tolist()) if x >= self.n_original]
        if certificate:
            for k in range(self.m):
                es, ws = self.cert.path(k)
                body = " ".join(f"{e}:{w!r}" for e, w in zip(es.tolist(), ws.tolist()))
                lines.append(f"cert {k} {body}")
        return "\n".join(lines) + "\n"

    def write(self, path, header: str = "") -> None:
        Path(path).write_text(self.format(header))

    @classmethod
    def parse(cls, text: str) -> "SteinerTree":
        rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
        rows = [r for r in rows if r]
        if not rows or len(rows[0]) != 2:
            raise TreeError("missing 'n_total n_original' header")
        n_total, n_orig = int(rows[0][0]), int(rows[0][1])
        u, v, length, pi, paths, weights = [], [], [], {}, {}, {}
        origin = list(range(n_orig)) + [-1] * (n_total - n_orig)
        for r in rows[1:]:
            if r[0] == "map":
                pi[int(r[1])] = int(r[2])
            elif r[0] == "origin":
                origin[int(r[1])] = int(r[2])
            elif r[0] == "cert":
                k = int(r[1])
                pairs = [tok.split(":") for tok in r[2:]]
                paths[k] = [int(a) for a, _ in pairs]
                weights[k] = [float(b) for _, b in pairs]
            elif len(r) == 3:
                u.append(int(r[0]))
                v.append(int(r[1]))
                length.append(float(r[2]))
            else:
                raise TreeError(f"unrecognised line {' '.join(r)!r}")
        m = len(u)
        ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum([len(paths.get(k, [])) for k in range(m)], out=ptr[1:])
        edges = np.array([e for k in range(m) for e in paths.get(k, [])], dtype=np.int64)
        ws = np.array([w for k in range(m) for w in weights.get(k, [])], dtype=float)
        pi_arr = np.array([pi.get(x, -1) for x in range(n_orig)], dtype=np.int64)
        return cls(n_orig, n_total, np.array(u, dtype=np.int64), np.array(v, dtype=np.int64), np.array(length),
                   np.full(m, -1, dtype=np.int64), pi_arr, np.array(origin, dtype=np.int64),
                   EmbeddingCertificate(ptr, edges, ws))

    @classmethod
    def read(cls, path) -> "SteinerTree":
        return cls.parse(Path(path).read_text())


# -- shared assembly -----------------------------------------------------------

def _children(parent_labels, child_labels, parent_centers, n):
    """Child components of every parent component, with inherited centers.

    Returns ``(child_center, child_parent)`` indexed by child label.
    """
    k = int(child_labels.max()) + 1
    minv = np.full(k, n, dtype=np.int64)
    np.minimum.at(minv, child_labels, np.arange(n))
    parent = parent_labels[minv]
    inherited = parent_centers[parent]
    center = np.where(child_labels[inherited] == np.arange(k), inherited, minv)
    return center, parent


class _Assembler:
    """Collects tree edges; ``lengths(level, path)`` gives the level lengths of a path."""

    def __init__(self, n, lengths):
        self.n = n
        self.lengths = lengths
        self.next_id = n
        self.origin = list(range(n))
        self.edges = []            # (a, b, length, path, level)
        self.weights = []

    def add(self, level, nodes_to_rename, edges, paths):
        # branch vertices become Steiner vertices, numbered by graph vertex id
        rename = {}
        for x in sorted(nodes_to_rename):
            rename[x] = self.next_id
            self.origin.append(x)
            self.next_id += 1
        for (a, b), path in zip(edges, paths):
            lens = self.lengths(level, path)
            self.edges.append((rename.get(a, a), rename.get(b, b), math.fsum(lens), path, level))
            self.weights.append(1.0 / np.asarray(lens, dtype=float))

    def finish(self) -> SteinerTree:
        m = len(self.edges)
        u = np.array([e[0] for e in self.edges], dtype=np.int64).reshape(-1)
        v = np.array([e[1] for e in self.edges], dtype=np.int64).reshape(-1)
        length = np.array([e[2] for e in self.edges], dtype=float).reshape(-1)
        level = np.array([e[4] for e in self.edges], dtype=np.int64).reshape(-1)
        ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum([len(e[3]) for e in self.edges], out=ptr[1:])
        cert_edges = np.array([x for e in self.edges for x in e[3]], dtype=np.int64)
        weights = np.concatenate(self.weights) if m else np.empty(0)
        return SteinerTree(self.n, self.next_id, u, v, length, level, np.arange(self.n, dtype=np.int64),
                           np.array(self.origin, dtype=np.int64), EmbeddingCertificate(ptr, cert_edges, weights))


def _walk_levels(n, t, labels_at, link):
    """Top-down center bookkeeping; calls ``link(i, label, labels, terminals)``
    for every level-``i`` component with two or more children.

    ``labels_at(i)`` may use any integer labels; ``label`` is passed back in
    the caller's numbering.
    """
    raw = labels_at(0)
    if np.any(raw != raw[0]):
        raise TreeError("level 0 is not connected")
    names, labels = np.unique(raw, return_inverse=True)
    centers = np.zeros(len(names), dtype=np.int64)
    for i in range(t):
        child_raw = labels_at(i + 1)
        child_names, child_labels = np.unique(child_raw, return_inverse=True)
        child_center, child_parent = _children(labels, child_labels, centers, n)
        counts = np.bincount(child_parent, minlength=len(centers))
        busy = np.flatnonzero(counts >= 2)
        if busy.size:
            order = np.argsort(child_parent, kind="stable")
            bounds = np.searchsorted(child_parent[order], np.arange(len(centers) + 1))
            for p in sorted(busy.tolist(), key=lambda c: centers[c]):
                kids = order[bounds[p]:bounds[p + 1]]
                link(i, int(names[p]), raw, sorted(child_center[kids].tolist()))
        raw, names, labels, centers = child_raw, child_names, child_labels, child_center


def _group_by(keys, values):
    order = np.argsort(keys, kind="stable")
    return keys[order], values[order]


def _slice(sorted_keys, sorted_values, key):
    lo, hi = np.searchsorted(sorted_keys, [key, key + 1])
    return sorted_values[lo:hi]


def build_tree(g: MultiGraph, dec, check: bool = False) -> SteinerTree:
    """Steiner tree of an explicit decomposition."""
    if check:
        from .bartal import validate_decomposition
        rep = validate_decomposition(g, dec)
        if not rep.ok:
            raise TreeError(f"decomposition invalid: {rep}")
    n = g.n
    lookup = [dict(zip(ids.tolist(), lengths.tolist())) for ids, lengths in dec.levels]
    asm = _Assembler(n, lambda i, path: [lookup[i][e] for e in path])
    grouped = {}

    def link(i, p, labels, terminals):
        if i not in grouped:
            grouped.clear()
            ids = dec.levels[i][0]
            grouped[i] = _group_by(labels[g.u[ids]], ids)
        sel = _slice(*grouped[i], p)
        edges = list(zip(g.u[sel].tolist(), g.v[sel].tolist(), sel.tolist()))
        c = contract_tree(edges, terminals, lookup[i])
        asm.add(i, c.branch_nodes, [e[:2] for e in c.edges], c.paths)

    _walk_levels(n, dec.t, lambda i: dec.level_labels(g, i), link)
    return asm.finish()


def expand_implicit(g: MultiGraph, impl, clustering=None) -> SteinerTree:
    """Steiner tree of an implicit decomposition without expanding its levels.

    Inside every referenced cluster only the attachment vertices matter: the
    child centers it holds and the endpoints of the level's explicit edges.
    The final clustering tree is contracted to all those sets in one offline
    LCA batch, and each component then contracts the small tree made of the
    cluster pieces and its explicit edges.
    """
    if clustering is not None and clustering is not impl.clustering:
        same = (clustering.delta == impl.clustering.delta and clustering.s == impl.clustering.s
                and all(np.array_equal(a, b) for a, b in zip(clustering.comps, impl.clustering.comps)))
        if not same:
            raise TreeError("implicit decomposition was built against a different clustering")
    n, base, scales = g.n, impl.base, impl.scales
    u, v = g.u, g.v
    jobs = []            # (level, terminals, explicit edge ids, first LCA set index, number of sets)
    sets = []
    grouped = {}

    def link(i, p, labels, terminals):
        lv = impl.levels[i]
        if i not in grouped:
            grouped.clear()
            grouped[i] = _group_by(labels[u[lv.explicit]], lv.explicit)
        explicit = _slice(*grouped[i], p)
        first = len(sets)
        if lv.scope >= 0:
            cl = impl.clusters(i)
            if p < lv.n_pieces:
                members = lv.piece_clusters[lv.piece_ptr[p]:lv.piece_ptr[p + 1]]
            else:
                members = np.array([p - lv.n_pieces])
            attach = np.concatenate([np.asarray(terminals, dtype=np.int64), u[explicit], v[explicit]])
            own, verts = _group_by(cl[attach], attach)
            for x in members.tolist():
                gamma = np.unique(_slice(own, verts, x))
                if gamma.size == 0:
                    raise TreeError(f"cluster {x} at level {i} has no attachment vertex")
                if gamma.size >= 2:
                    sets.append(gamma.tolist())
        jobs.append((i, terminals, explicit, first, len(sets) - first))

    _walk_levels(n, impl.t, impl.labels, link)
    pieces = offline_lca_contract(impl.clustering.tree, sets, base) if sets else []

    asm = _Assembler(n, lambda i, path: (base[np.asarray(path, dtype=np.int64)] * scales[i]).tolist())
    for i, terminals, explicit, first, count in jobs:
        small = []                 # (a, b, underlying path walked from a to b)
        for c in pieces[first:first + count]:
            for (a, b, _), path in zip(c.edges, c.paths):
                small.append((a, b, path))
        for e in explicit.tolist():
            small.append((int(u[e]), int(v[e]), [e]))
        c = contract_tree([(a, b, k) for k, (a, b, _) in enumerate(small)], terminals)
        paths = [_compose(a, keys, small) for (a, _, _), keys in zip(c.edges, c.paths)]
        asm.add(i, c.branch_nodes, [e[:2] for e in c.edges], paths)
    return asm.finish()


def _compose(start, keys, small):
    out = []
    x = start
    for k in keys:
        a, b, path = small[k]
        if x == a:
            out.extend(path)
            x = b
        else:
            out.extend(path[::-1])
            x = a
    return out
