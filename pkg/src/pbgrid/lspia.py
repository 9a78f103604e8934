"""LSPIA fitting of the persistence B-spline surface.

Starting from a zero control grid, every iteration moves the heights along
the transposed residual,

    z <- z + mu * B^T (Z - B z),    mu = step_scale / C,

where ``C`` is the largest column sum of the basis matrix ``B``. With
``step_scale <= 1`` the iteration converges to the minimum-norm least-squares
solution ``B^+ Z``; :func:`min_norm_lsq_oracle` computes that limit directly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .bspline import (
    MIN_GRID,
    BasisMatrix,
    PBGrid,
    PersistenceVector,
    basis_matrix,
    curve_basis_matrix,
    to_vector,
)
from .diagram import PersistenceDiagram
from .transform import EminenceConfig, FitDataset, prepare_fit_data

__all__ = [
    "NumericFailure",
    "LspiaConfig",
    "LspiaTrace",
    "step_weight",
    "lspia_iterate",
    "lspia_fit",
    "lspia_fit_curve",
    "min_norm_lsq_oracle",
    "vectorize",
    "vectorize_many",
    "vectorize_curve",
]

log = logging.getLogger(__name__)

ORACLE_MAX_SIZE = 2000


class NumericFailure(FloatingPointError):
    """The iteration produced a non-finite value."""


@dataclass(frozen=True)
class LspiaConfig:
    """Grid size, iteration count and step multiplier.

    ``step_scale`` multiplies ``1/C``. Values in ``(0, 1]`` carry the
    convergence guarantee; up to 2 is accepted only with ``unsafe_step=True``.
    """

    h: int = 20
    iterations: int = 100
    step_scale: float = 1.0
    unsafe_step: bool = False

    def __post_init__(self):
        if self.h < MIN_GRID:
            raise ValueError(f"h must be >= {MIN_GRID}, got {self.h}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        upper = 2.0 if self.unsafe_step else 1.0
        if not 0 < self.step_scale <= upper:
            raise ValueError(f"step_scale must be in (0, {upper:g}], got {self.step_scale}")


@dataclass(frozen=True, eq=False)
class LspiaTrace:
    """``residual_norms[b]`` is ``||Z - B z||_2`` after iteration ``b + 1``."""

    residual_norms: np.ndarray
    final_grid: PBGrid
    step: float = field(default=float("nan"))


def _entries(B):
    return B.entries if isinstance(B, BasisMatrix) else B


def step_weight(B, step_scale: float = 1.0) -> float:
    """``step_scale / C`` with ``C`` the maximal column sum of ``B``."""
    M = _entries(B)
    if M.shape[0] == 0:
        raise ValueError("step weight undefined for an empty dataset")
    C = float(np.max(np.asarray(M.sum(axis=0)).ravel()))
    if not C > 0:
        raise ValueError("basis matrix has no positive column sum")
    return step_scale / C


def lspia_iterate(B, Z, mu: float, iterations: int, checkpoints: Iterable[int] = ()):
    """Run the update ``iterations`` times from zero.

    Returns ``(z, residual_norms, snapshots)`` where ``snapshots`` maps each
    requested iteration count to a copy of ``z`` at that point.
    """
    M = sp.csr_matrix(_entries(B))
    MT = M.T.tocsr()
    Z = np.asarray(Z, dtype=float)
    wanted = set(int(c) for c in checkpoints)
    z = np.zeros(M.shape[1])
    resid = Z.copy()
    norms = np.empty(iterations)
    snapshots = {}
    for b in range(iterations):
        z += mu * (MT @ resid)
        resid = Z - M @ z
        nrm = float(np.linalg.norm(resid))
        if not np.isfinite(nrm):
            raise NumericFailure(f"non-finite residual at iteration {b + 1}")
        norms[b] = nrm
        if b + 1 in wanted:
            snapshots[b + 1] = z.copy()
    return z, norms, snapshots


def lspia_fit(data: FitDataset, cfg: LspiaConfig = LspiaConfig()) -> LspiaTrace:
    if len(data) == 0:
        raise ValueError("cannot fit an empty dataset")
    B = basis_matrix(data.sites, cfg.h)
    mu = step_weight(B, cfg.step_scale)
    z, norms, _ = lspia_iterate(B, data.values, mu, cfg.iterations)
    return LspiaTrace(norms, PBGrid(z.reshape(cfg.h, cfg.h)), mu)


def lspia_fit_curve(data, h: int = 20, iterations: int = 100) -> np.ndarray:
    """Curve analogue of :func:`lspia_fit` for ``(t, z)`` rows; returns ``h`` heights."""
    data = np.asarray(data, dtype=float).reshape(-1, 2)
    if data.shape[0] == 0:
        raise ValueError("cannot fit an empty dataset")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    B = curve_basis_matrix(data[:, 0], h)
    z, _, _ = lspia_iterate(B, data[:, 1], step_weight(B), iterations)
    return z


def min_norm_lsq_oracle(B, Z) -> PersistenceVector | np.ndarray:
    """Minimum-norm least-squares solution of ``B x = Z`` via SVD.

    Dense and direct, so limited to ``k, h^2 <= 2000``. Returns a
    :class:`PersistenceVector` for surface bases and a plain array otherwise.
    """
    M = _entries(B)
    k, n = M.shape
    if k > ORACLE_MAX_SIZE or n > ORACLE_MAX_SIZE:
        raise ValueError(f"oracle limited to {ORACLE_MAX_SIZE} rows/columns, got {M.shape}")
    A = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    x, *_ = np.linalg.lstsq(A, np.asarray(Z, dtype=float), rcond=None)
    if isinstance(B, BasisMatrix):
        return PersistenceVector(x)
    return x


def vectorize(
    pd: PersistenceDiagram, em: EminenceConfig, cfg: LspiaConfig = LspiaConfig()
) -> PersistenceVector:
    """Persistence vector of one diagram; the empty diagram maps to zeros."""
    if len(pd) == 0:
        return PersistenceVector(np.zeros(cfg.h * cfg.h))
    return to_vector(lspia_fit(prepare_fit_data(pd, em), cfg).final_grid)


def vectorize_many(
    pds: Sequence[PersistenceDiagram], em: EminenceConfig, cfg: LspiaConfig = LspiaConfig()
) -> np.ndarray:
    """Stack the vectors of a corpus into an ``(n, h^2)`` array."""
    if not pds:
        return np.zeros((0, cfg.h * cfg.h))
    return np.vstack([vectorize(pd, em, cfg).values for pd in pds])


def vectorize_curve(
    pd: PersistenceDiagram, em: EminenceConfig, h: int = 20, iterations: int = 100
) -> np.ndarray:
    """Curve vector for diagrams whose births are all zero (reduced H0)."""
    if len(pd) == 0:
        return np.zeros(h)
    data = prepare_fit_data(pd, em)
    if np.any(data.sites[:, 0] != 0):
        log.warning("curve fit ignores non-zero births")
    return lspia_fit_curve(data.samples[:, 1:], h, iterations)
