"""
From a persistence diagram to a fixed-length vector
===================================================

A diagram is moved to birth-persistence coordinates, every point gets an
eminence value, and a cubic B-spline surface is fitted through the result.
The 20 x 20 control heights, read row by row, are the vector.
"""

import numpy as np

from pbgrid import EminenceConfig, LspiaConfig, PersistenceDiagram, prepare_fit_data, vectorize
from pbgrid.bspline import from_vector, reconstruct_surface
from pbgrid.experiments import sparsity_report

pd = PersistenceDiagram([(0.1, 0.8), (0.3, 0.7), (0.7, 0.9), (0.2, 0.25), (0.5, 0.52)])

# one normalizing constant for the whole corpus; here the corpus is one diagram
em = EminenceConfig(m=1.0)
print("fit data (s, t, z):")
print(prepare_fit_data(pd, em).samples)

v = vectorize(pd, em, LspiaConfig(h=20, iterations=100))
print("vector length", len(v), "norm", np.linalg.norm(v.values))

# most control points sit far from every data site and stay at zero
print("zero fraction", sparsity_report([v.values]))

# the vector carries the whole surface: sample it on a coarse lattice
field = reconstruct_surface(v, 6)
np.set_printoptions(precision=3, suppress=True)
print(field)

# the largest control height sits next to the most persistent point
i, j = divmod(int(np.argmax(v.values)), 20)
print("peak control point", (i, j), "of grid", from_vector(v).heights.shape)
