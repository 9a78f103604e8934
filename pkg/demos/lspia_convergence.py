"""
Least-squares progressive iteration
===================================

The fit starts from a zero grid and repeatedly moves the control heights
along the transposed residual. With step 1/C it converges to the
minimum-norm least-squares solution, which we compute directly for
comparison.
"""

import numpy as np

from pbgrid.bspline import basis_matrix
from pbgrid.lspia import lspia_iterate, min_norm_lsq_oracle, step_weight

rng = np.random.default_rng(3)

# well separated sites give a well conditioned basis matrix
sites = []
while len(sites) < 20:
    p = rng.uniform(0, 1, 2)
    if all(np.hypot(*(p - q)) >= 0.12 for q in sites):
        sites.append(p)
sites = np.array(sites)
Z = rng.uniform(0, 1, len(sites))

B = basis_matrix(sites, 7)
mu = step_weight(B)
print("basis matrix", B.shape, "non-zeros", B.entries.nnz, "step", mu)

target = min_norm_lsq_oracle(B, Z).values
z, residuals, snaps = lspia_iterate(B, Z, mu, 10_000, checkpoints=[10, 100, 1000, 10_000])
for n, zn in snaps.items():
    print(f"N={n:6d}  residual {residuals[n - 1]:.2e}  distance to limit {np.abs(zn - target).max():.2e}")

# singular values decide the pace: each mode shrinks by (1 - mu s^2) per step
s = np.linalg.svd(B.toarray(), compute_uv=False)
print("slowest mode contraction per step", 1 - mu * s[s > 1e-12].min() ** 2)
