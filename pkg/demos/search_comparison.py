"""
Prior-guided search against random and grid search
===================================================

Each method gets the same evaluation budget over 3- and 4-node networks.
We average the best-so-far Phi curves over a few repetitions.
"""
import sys

import numpy as np

from phiopt import SearchConfig, grid_search, prior_guided_search, random_search

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 3
iters = 30

curves = {}
for name, method in (("prior", prior_guided_search), ("random", random_search), ("grid", grid_search)):
    runs = []
    for r in range(reps):
        config = SearchConfig(3, 4, iters, batch_size=5, learning_rate=0.1,
                              initial_prior=(0.2, 0.8) if name == "prior" else None, seed=r)
        runs.append(method(config).best_so_far())
    curves[name] = np.mean(runs, axis=0)

# print every fifth iteration of the averaged curves
print("iter  " + "  ".join(f"{k:>7}" for k in curves))
for i in range(0, iters, 5):
    print(f"{i:4d}  " + "  ".join(f"{curves[k][i]:7.4f}" for k in curves))
print(f"{iters - 1:4d}  " + "  ".join(f"{curves[k][-1]:7.4f}" for k in curves))
