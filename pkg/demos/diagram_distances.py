"""
Wasserstein and bottleneck distances
====================================

Points may be matched to each other or sent to the diagonal. Costs use the
sup-norm, so a point (b, d) pays (d - b) / 2 to vanish.
"""

import math

import numpy as np

from pbgrid import PersistenceDiagram, PerturbationSpec, bottleneck, perturb_diagram, wasserstein
from pbgrid.metrics import brute_force_distance, wasserstein_matching

a = PersistenceDiagram([(0.0, 1.0), (0.2, 0.3)])
b = PersistenceDiagram([(0.0, 0.8)])

for p in (1, 2, math.inf):
    print(f"W_{p}(a, b) = {wasserstein(a, b, p):.4f}   brute force {brute_force_distance(a, b, p):.4f}")

m = wasserstein_matching(a, b, 1)
print("optimal matching (-1 is the diagonal):", m.pairs)

# perturbing by tau moves the diagram by at most tau in bottleneck distance
pd = PersistenceDiagram(np.sort(np.random.default_rng(0).uniform(0, 1, (30, 2)), axis=1))
for tau in (0.01, 0.05, 0.1):
    q = perturb_diagram(pd, PerturbationSpec(tau, seed=1))
    print(f"tau={tau}: bottleneck {bottleneck(pd, q):.4f}")
