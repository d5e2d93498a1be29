"""Rooted trees, lowest common ancestors and tree contraction.

Two LCA engines live here: a numpy binary-lifting index for large batches of
distance queries, and Tarjan's offline union-find algorithm used when
contracting a big tree to many small vertex sets at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class TreeError(ValueError):
    pass


@dataclass
class RootedTree:
    """A rooted forest over vertices ``0..n-1``.

    ``parent_edge`` holds the caller's edge identifier for the link to the
    parent and ``dist`` the weighted distance to the root of the tree.
    """

    n: int
    root: int
    parent: np.ndarray
    parent_edge: np.ndarray
    parent_len: np.ndarray
    depth: np.ndarray
    dist: np.ndarray
    order: np.ndarray          # DFS preorder
    tin: np.ndarray
    tout: np.ndarray
    _lift: list = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n, u, v, length, edge_ids=None, root=0) -> "RootedTree":
        u = np.asarray(u, dtype=np.int64).tolist()
        v = np.asarray(v, dtype=np.int64).tolist()
        length = np.asarray(length, dtype=float).tolist()
        edge_ids = list(range(len(u))) if edge_ids is None else np.asarray(edge_ids).tolist()
        adj = [[] for _ in range(n)]
        for a, b, w, e in zip(u, v, length, edge_ids):
            adj[a].append((b, w, e))
            adj[b].append((a, w, e))
        for lst in adj:
            lst.sort()
        parent = [-1] * n
        parent_edge = [-1] * n
        parent_len = [0.0] * n
        depth = [0] * n
        dist = [0.0] * n
        tin = [-1] * n
        tout = [-1] * n
        order = []
        clock = 0
        roots = [root] + [x for x in range(n) if x != root]
        for r in roots:
            if tin[r] != -1:
                continue
            tin[r] = clock
            clock += 1
            order.append(r)
            stack = [(r, iter(adj[r]))]
            while stack:
                x, it = stack[-1]
                for y, w, e in it:
                    if tin[y] == -1:
                        parent[y], parent_edge[y], parent_len[y] = x, e, w
                        depth[y] = depth[x] + 1
                        dist[y] = dist[x] + w
                        tin[y] = clock
                        clock += 1
                        order.append(y)
                        stack.append((y, iter(adj[y])))
                        break
                else:
                    tout[x] = clock
                    stack.pop()
        if len(u) != n - sum(1 for x in range(n) if parent[x] == -1):
            raise TreeError("edges do not form a forest")
        return cls(n, root, np.array(parent, dtype=np.int64), np.array(parent_edge, dtype=np.int64),
                   np.array(parent_len), np.array(depth, dtype=np.int64), np.array(dist),
                   np.array(order, dtype=np.int64), np.array(tin, dtype=np.int64), np.array(tout, dtype=np.int64))

    def is_ancestor(self, a: int, b: int) -> bool:
        return self.tin[a] <= self.tin[b] and self.tout[b] <= self.tout[a]

    # -- binary lifting --------------------------------------------------
    def _lifting(self):
        if self._lift is None:
            up = self.parent.copy()
            up[up < 0] = np.flatnonzero(up < 0)          # roots point to themselves
            levels = [up]
            for _ in range(max(1, int(self.depth.max(initial=0)).bit_length())):
                levels.append(levels[-1][levels[-1]])
            self._lift = levels
        return self._lift

    def lca(self, a, b) -> np.ndarray:
        """Vectorised LCA; vertices in different trees give -1."""
        up = self._lifting()
        a = np.array(a, dtype=np.int64, copy=True).reshape(-1)
        b = np.array(b, dtype=np.int64, copy=True).reshape(-1)
        swap = self.depth[a] < self.depth[b]
        a[swap], b[swap] = b[swap], a[swap]
        diff = self.depth[a] - self.depth[b]
        for k, level in enumerate(up):
            bit = ((diff >> k) & 1).astype(bool)
            a[bit] = level[a[bit]]
        for level in reversed(up):
            move = level[a] != level[b]
            a[move] = level[a[move]]
            b[move] = level[b[move]]
        joined = np.where(up[0][a] == up[0][b], up[0][a], -1)
        return np.where(a == b, a, joined)

    def distance(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        c = self.lca(a, b)
        if np.any(c < 0):
            raise TreeError("vertices lie in different trees")
        return self.dist[a] + self.dist[b] - 2.0 * self.dist[c]

    def path_to_ancestor(self, x: int, anc: int) -> list:
        """Edge identifiers on the path from ``x`` up to ``anc``."""
        out = []
        parent, pe = self.parent, self.parent_edge
        while x != anc:
            if x < 0:
                raise TreeError("not an ancestor")
            out.append(int(pe[x]))
            x = int(parent[x])
        return out


def tarjan_offline_lca(tree: RootedTree, queries) -> list:
    """Answer ``(a, b)`` LCA queries in one DFS using union-find.

    Pairs in different trees of the forest get ``-1``.
    """
    n = tree.n
    by_vertex = [[] for _ in range(n)]
    for qi, (a, b) in enumerate(queries):
        by_vertex[a].append((b, qi))
        by_vertex[b].append((a, qi))
    ans = [-1] * len(queries)
    uf = list(range(n))
    anchor = list(range(n))
    done = [False] * n
    owner = [-1] * n

    def find(x):
        r = x
        while uf[r] != r:
            r = uf[r]
        while uf[x] != r:
            uf[x], x = r, uf[x]
        return r

    children = [[] for _ in range(n)]
    parent = tree.parent.tolist()
    for x in tree.order.tolist():
        if parent[x] >= 0:
            children[parent[x]].append(x)
    for r in tree.order.tolist():
        if parent[r] != -1:
            continue
        stack = [(r, 0)]
        while stack:
            x, i = stack.pop()
            if i < len(children[x]):
                stack.append((x, i + 1))
                stack.append((children[x][i], 0))
                continue
            done[x] = True
            owner[x] = r
            for y, qi in by_vertex[x]:
                if done[y] and owner[y] == r:
                    ans[qi] = anchor[find(y)]
            p = parent[x]
            if p >= 0:
                rp, rx = find(p), find(x)
                uf[rx] = rp
                anchor[rp] = p
    # queries across different trees stay at -1
    return ans


@dataclass
class Contraction:
    """A contracted tree.

    ``nodes`` are the kept vertices (terminals first in the order given, then
    branch vertices by id); ``edges`` are ``(x, y, length)`` between node ids of
    the input tree; ``paths[k]`` lists the input edge ids walked from ``x`` to ``y``.
    """

    terminals: list
    nodes: list
    edges: list
    paths: list

    @property
    def branch_nodes(self):
        t = set(self.terminals)
        return [x for x in self.nodes if x not in t]


def contract_tree(edges, terminals, lengths=None) -> Contraction:
    """Contract a tree to ``terminals``: prune non-terminal leaves and splice
    out non-terminal vertices of degree two, until neither applies.

    ``edges`` is a list of ``(a, b, edge_id)`` over arbitrary hashable vertex
    names; ``lengths`` maps edge_id -> length (default: all ones).  Output
    lengths are exact (``math.fsum``) sums along the recorded paths, so the
    result does not depend on traversal order.
    """
    terminals = list(dict.fromkeys(terminals))
    if not terminals:
        raise TreeError("terminal set must be non-empty")
    adj: dict = {}
    for a, b, e in edges:
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    root = terminals[0]
    if len(terminals) == 1:
        if root not in adj and edges:
            raise TreeError("terminal not in tree")
        return Contraction(terminals, [root], [], [])
    tset = set(terminals)
    if root not in adj:
        raise TreeError("terminal not in tree")
    parent = {root: None}
    pedge = {}
    order = [root]
    stack = [root]
    while stack:
        x = stack.pop()
        for y, e in adj[x]:
            if y not in parent:
                parent[y] = x
                pedge[y] = e
                order.append(y)
                stack.append(y)
    missing = tset.difference(parent)
    if missing:
        raise TreeError(f"terminals not connected to the tree: {sorted(missing)[:5]}")
    # count, bottom-up, terminals below each vertex and kept children
    below = {x: (1 if x in tset else 0) for x in order}
    kept_children = {x: 0 for x in order}
    for x in reversed(order):
        p = parent[x]
        if p is not None and below[x]:
            below[p] += below[x]
            kept_children[p] += 1
    total = len(tset)
    key = {x for x in order if below[x] and (x in tset or kept_children[x] >= 2)}
    # a kept vertex with no terminals above it is unnecessary only above the root;
    # the root is a terminal so every kept vertex lies on a terminal-terminal path
    assert below[root] == total
    out_edges, out_paths = [], []
    for x in order:
        if x == root or x not in key:
            continue
        path = []
        y = x
        while True:
            path.append(pedge[y])
            y = parent[y]
            if y in key:
                break
        path.reverse()          # walk from the key ancestor y down to x
        a, b = y, x
        if _name_key(b) < _name_key(a):
            a, b = b, a
            path.reverse()
        length = math.fsum(lengths[e] for e in path) if lengths is not None else float(len(path))
        out_edges.append((a, b, length))
        out_paths.append(path)
    nodes = terminals + sorted((x for x in key if x not in tset), key=_name_key)
    order_idx = sorted(range(len(out_edges)), key=lambda k: (_name_key(out_edges[k][0]), _name_key(out_edges[k][1])))
    return Contraction(terminals, nodes, [out_edges[k] for k in order_idx], [out_paths[k] for k in order_idx])


def _name_key(x):
    return x if isinstance(x, tuple) else (x,)


def offline_lca_contract(tree: RootedTree, sets, lengths=None, labels=None) -> list:
    """Contract ``tree`` to each vertex set in one batch.

    The only vertices a contraction can keep are the set itself and the LCAs
    of preorder-adjacent members.  All those LCAs are answered together by
    :func:`tarjan_offline_lca`; each contracted tree is then rebuilt from its
    preorder with a stack.  If ``labels`` (a component label per vertex) is
    given, every set must lie inside one component.
    """
    tin = tree.tin
    sorted_sets = []
    queries = []
    for si, s in enumerate(sets):
        members = list(dict.fromkeys(int(x) for x in s))
        if not members:
            raise TreeError(f"set {si} is empty")
        if labels is not None:
            lab = {int(labels[x]) for x in members}
            if len(lab) > 1:
                raise TreeError(f"set {si} spans {len(lab)} components")
        members.sort(key=lambda x: tin[x])
        sorted_sets.append(members)
        queries.extend(zip(members, members[1:]))
    answers = tarjan_offline_lca(tree, queries)
    out = []
    pos = 0
    tout = tree.tout
    for si, members in enumerate(sorted_sets):
        k = len(members)
        lcas = answers[pos:pos + k - 1]
        pos += k - 1
        terminals = list(dict.fromkeys(int(x) for x in sets[si]))
        if k == 1:
            out.append(Contraction(terminals, terminals, [], []))
            continue
        if any(a < 0 for a in lcas):
            raise TreeError(f"set {si} spans several trees")
        gamma = sorted(set(members).union(lcas), key=lambda x: tin[x])
        children: dict = {x: [] for x in gamma}
        up: dict = {}
        stack = []
        for x in gamma:
            while stack and not (tin[stack[-1]] <= tin[x] and tout[x] <= tout[stack[-1]]):
                stack.pop()
            if stack:
                up[x] = stack[-1]
                children[stack[-1]].append(x)
            stack.append(x)
        tset = set(members)
        top = gamma[0]
        # the topmost LCA has no parent direction; with two children it is a
        # pass-through vertex and gets spliced out
        virtual = [(up[x], x, tree.path_to_ancestor(x, up[x])[::-1]) for x in gamma[1:]]
        if top not in tset and len(children[top]) == 2:
            c1, c2 = children[top]
            p1 = next(p for a, b, p in virtual if b == c1)
            p2 = next(p for a, b, p in virtual if b == c2)
            virtual = [t for t in virtual if t[0] != top]
            virtual.append((c1, c2, p1[::-1] + p2))
        edges, paths = [], []
        for a, b, path in virtual:
            if _name_key(b) < _name_key(a):
                a, b, path = b, a, path[::-1]
            length = math.fsum(lengths[e] for e in path) if lengths is not None else float(len(path))
            edges.append((a, b, length))
            paths.append(path)
        order = sorted(range(len(edges)), key=lambda j: (edges[j][0], edges[j][1]))
        kept = {x for e in edges for x in e[:2]}
        nodes = terminals + sorted(x for x in kept if x not in tset)
        out.append(Contraction(terminals, nodes, [edges[j] for j in order], [paths[j] for j in order]))
    return out
