"""Check that a Steiner tree plus the graph sandwiches the graph's own Laplacian."""

import numpy as np

from lowstretch import full_pipeline, laplacian_sandwich_check
from lowstretch.generators import generate

for spec in ("grid:8x8", "er:80:300:10", "geometric:120"):
    g = generate(spec, 3)
    t = full_pipeline(g, 0.5, seed=3).tree
    rep = laplacian_sandwich_check(g, t, 200, rng=np.random.default_rng(0))
    print(f"{spec:16s} vertices={t.n_total:4d} ratio in [{rep.min_ratio:.4f}, {rep.max_ratio:.4f}] ok={rep.ok}")
