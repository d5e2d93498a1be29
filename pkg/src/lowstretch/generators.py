"""Benchmark graph families.

Specs are strings like ``grid:16x16``, ``path:10``, ``cycle:64``,
``er:100:300:8`` (n, m, max length) or ``geometric:200:0.15``.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import GraphError, MultiGraph

MAX_ATTEMPTS = 100


def path(n: int) -> MultiGraph:
    if n < 1:
        raise GraphError("path needs at least one vertex")
    return MultiGraph(n, np.arange(n - 1), np.arange(1, n), np.ones(n - 1))


def cycle(n: int) -> MultiGraph:
    if n < 3:
        raise GraphError("cycle needs at least three vertices")
    return MultiGraph(n, np.arange(n), (np.arange(n) + 1) % n, np.ones(n))


def grid(r: int, c: int) -> MultiGraph:
    if r < 1 or c < 1:
        raise GraphError("grid sides must be positive")
    ids = np.arange(r * c).reshape(r, c)
    u = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    v = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    return MultiGraph(r * c, u, v, np.ones(len(u)))


def erdos_renyi(n: int, m: int, maxlen: float, rng: np.random.Generator) -> MultiGraph:
    """``m`` distinct random pairs, lengths uniform in ``[1, maxlen]``; resampled until connected."""
    if n < 2 or m < n - 1 or m > n * (n - 1) // 2:
        raise GraphError(f"no connected simple graph with n={n}, m={m}")
    for _ in range(MAX_ATTEMPTS):
        pairs = set()
        while len(pairs) < m:
            a, b = rng.integers(0, n, size=2)
            if a != b:
                pairs.add((min(a, b), max(a, b)))
        pairs = sorted(pairs)
        u, v = np.array(pairs).T
        g = MultiGraph(n, u, v, _lengths(len(pairs), maxlen, rng))
        if g.is_connected():
            return g
    raise GraphError(f"no connected sample after {MAX_ATTEMPTS} attempts")


def geometric(n: int, radius: float, rng: np.random.Generator) -> MultiGraph:
    """Random points in the unit square joined when closer than ``radius``.

    Lengths are the Euclidean distances rescaled so the shortest edge has
    length 1.
    """
    for _ in range(MAX_ATTEMPTS):
        pts = rng.random((n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        u, v = np.nonzero(np.triu(dist < radius, 1))
        if len(u) == 0 and n > 1:
            continue
        g = MultiGraph(n, u, v, np.ones(len(u)))
        if g.is_connected():
            w = dist[u, v]
            return MultiGraph(n, u, v, w / w.min() if len(w) else w)
    raise GraphError(f"no connected sample after {MAX_ATTEMPTS} attempts")


def _lengths(m, maxlen, rng):
    if maxlen < 1:
        raise GraphError("maxlen must be at least 1")
    if maxlen == 1:
        return np.ones(m)
    return rng.uniform(1.0, maxlen, size=m)


def generate(spec: str, seed: int = 0) -> MultiGraph:
    """Build a graph from a spec string; randomised families use ``seed``."""
    kind, _, rest = spec.partition(":")
    args = [a for a in rest.replace("x", ":").split(":") if a] if kind == "grid" else [a for a in rest.split(":") if a]
    rng = np.random.default_rng(seed)
    try:
        if kind == "path":
            return path(int(args[0]))
        if kind == "cycle":
            return cycle(int(args[0]))
        if kind == "grid":
            r = int(args[0])
            return grid(r, int(args[1]) if len(args) > 1 else r)
        if kind == "er":
            return erdos_renyi(int(args[0]), int(args[1]), float(args[2]) if len(args) > 2 else 1.0, rng)
        if kind == "geometric":
            n = int(args[0])
            radius = float(args[1]) if len(args) > 1 else 2.0 * math.sqrt(math.log(n) / n)
            return geometric(n, radius, rng)
    except (IndexError, ValueError) as exc:
        raise GraphError(f"bad graph spec {spec!r}: {exc}") from None
    raise GraphError(f"unknown graph family {kind!r}")
