"""Slow reference implementations used only by the tests.

None of these share code with the package.
"""

import itertools
import math

import numpy as np


def bellman_ford(n, edges, sources):
    """``edges`` as (u, v, length); ``sources`` as (vertex, start)."""
    dist = [math.inf] * n
    for s, d0 in sources:
        dist[s] = min(dist[s], d0)
    for _ in range(n):
        changed = False
        for a, b, w in edges:
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
            if dist[b] + w < dist[a]:
                dist[a] = dist[b] + w
                changed = True
        if not changed:
            break
    return dist


def floyd_warshall(n, edges):
    d = np.full((n, n), math.inf)
    np.fill_diagonal(d, 0.0)
    for a, b, w in edges:
        d[a, b] = min(d[a, b], w)
        d[b, a] = min(d[b, a], w)
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def components(n, pairs):
    """Connected-component label per vertex by repeated DFS, labels by first vertex."""
    adj = [[] for _ in range(n)]
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    label = [-1] * n
    nxt = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        stack = [s]
        label[s] = nxt
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if label[y] < 0:
                    label[y] = nxt
                    stack.append(y)
        nxt += 1
    return label


def tree_path(adj, a, b):
    """Vertices on the unique a-b path of a tree given as {x: [(y, w), ...]}."""
    prev = {a: None}
    stack = [a]
    while stack:
        x = stack.pop()
        for y, _ in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def random_tree(n, rng, maxlen=5):
    """Random recursive tree with integer lengths; returns [(a, b, length)]."""
    return [(int(rng.integers(0, i)), i, float(rng.integers(1, maxlen + 1))) for i in range(1, n)]


def random_connected(n, extra, rng, maxlen=8):
    edges = random_tree(n, rng, maxlen)
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((int(a), int(b), float(rng.integers(1, maxlen + 1))))
    return edges


def brute_lca(parent, a, b):
    seen = set()
    x = a
    while x is not None:
        seen.add(x)
        x = parent[x]
    x = b
    while x not in seen:
        x = parent[x]
    return x


def max_pair_distance(dist, members):
    return max((dist[a, b] for a, b in itertools.combinations(members, 2)), default=0.0)


def wide_graph(n, rng, extra=None, decades=8.0):
    """Random connected multigraph whose lengths span ``decades`` orders of magnitude."""
    from lowstretch.graph import MultiGraph
    base = random_connected(n, 2 * n if extra is None else extra, rng)
    return MultiGraph.from_edges(n, [(a, b, 10 ** rng.uniform(0, decades)) for a, b, _ in base])
