"""Build low-stretch Steiner trees on unit grids and print how stretch grows with size."""

import math
import sys

import numpy as np

from lowstretch import full_pipeline, tree_stretch, verify_embedding
from lowstretch.generators import grid


def main(sides=(8, 16, 32, 64), seeds=5, p=0.5):
    print(f"{'n':>6} {'ln n':>6} {'mean lp':>9} {'max':>9} {'steiner':>8} {'congestion':>11}")
    for side in sides:
        g = grid(side, side)
        means, maxes, extra, cong = [], [], [], []
        for seed in range(seeds):
            t = full_pipeline(g, p, seed=seed).tree
            st = tree_stretch(g, t, p)
            means.append(st.mean)
            maxes.append(st.max)
            extra.append(t.n_total - g.n)
            cong.append(verify_embedding(g, t).congestion)
        print(f"{g.n:6d} {math.log(g.n):6.2f} {np.mean(means):9.3f} {np.max(maxes):9.1f} "
              f"{np.mean(extra):8.1f} {np.max(cong):11.6f}")


if __name__ == "__main__":
    main(tuple(int(s) for s in sys.argv[1:]) or (8, 16, 32, 64))
