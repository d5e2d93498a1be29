"""Simplified mode: how many edges get tossed for each k, and what the rest pay."""

import math

import numpy as np

from lowstretch import full_pipeline, tree_stretch
from lowstretch.generators import grid

g = grid(24, 24)
ln = math.log(g.n)
for k in (4, 16, 64):
    tossed, kept, attempts = [], [], []
    for seed in range(20):
        r = full_pipeline(g, mode="simplified", k=float(k), seed=seed)
        tossed.append(len(r.ignored) / g.m)
        kept.append(tree_stretch(g, r.tree, 1.0, r.ignored).mean_stretch)
        attempts.append(r.attempts)
    print(f"k={k:3d}  p={r.p:.3f}  k|S|/m={k * np.mean(tossed):5.2f}  "
          f"kept stretch={np.mean(kept):7.2f}  "
          f"scaled={np.mean(kept) / (ln * math.log(k * ln) ** 2):5.3f}  attempts={np.mean(attempts):.1f}")
