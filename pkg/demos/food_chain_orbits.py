"""
Orbits of a discrete food-chain model
=====================================

Nine values of M0 give qualitatively different attractors. Each orbit is a
3D point cloud; a subsample goes through Rips persistence and the H1
diagram through the vectorizer.
"""

import numpy as np

from pbgrid import EminenceConfig, vectorize
from pbgrid.datasets import LINDSTROM_M0, OrbitSpec, lindstrom_orbit
from pbgrid.homology import persistence_diagrams

rows = []
for M0 in LINDSTROM_M0:
    orbit = lindstrom_orbit(OrbitSpec(M0, seed=1))
    # drop the transient and keep a desk-sized subsample
    cloud = orbit[1000::10]
    h1 = persistence_diagrams(cloud, 2).h1
    rows.append((M0, orbit[:, 0].min(), orbit[:, 0].max(), h1))
    print(f"M0={M0:<7} X in [{orbit[:, 0].min():.2f}, {orbit[:, 0].max():.2f}]   H1 points {len(h1)}")

m = max(float(h.points.max()) for *_, h in rows if len(h)) * 1.01
vecs = np.array([vectorize(h, EminenceConfig(m=m)).values for *_, h in rows])
print("vector norms", np.round(np.linalg.norm(vecs, axis=1), 3))
