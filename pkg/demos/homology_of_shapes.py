"""
Rips persistence of noisy shapes
================================

Edges enter at their length and triangles at their longest edge. A circle
leaves one long H1 bar; two circles leave two.
"""

import numpy as np

from pbgrid.datasets import SHAPES, sample_shape
from pbgrid.homology import persistence_diagrams

for kind in SHAPES:
    pts = sample_shape(kind, 100, noise=0.025, seed=0)
    dg = persistence_diagrams(pts)
    bars = np.sort(dg.h1.persistence)[::-1][:3]
    print(f"{kind:13s} H0 pairs {len(dg.h0):3d}   longest H1 bars {np.round(bars, 3)}")

# the unit square: three edges merge components at 1, the cycle fills at sqrt(2)
square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
dg = persistence_diagrams(square, 2, 2.0)
print("square H0", dg.h0.points.tolist())
print("square H1", dg.h1.points.tolist())
