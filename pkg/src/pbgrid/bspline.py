"""Clamped uniform cubic B-splines on [0, 1].

An ``h``-point control polygon per direction uses the knot vector
``{0,0,0,0, 1/(h-3), ..., (h-4)/(h-3), 1,1,1,1}``, which has ``h + 4`` knots and
exactly ``h`` cubic basis functions. Basis indices are 0-based throughout.

Two evaluators are provided: :func:`basis_value` runs the textbook
Cox-de Boor recursion for one function, and :func:`nonzero_basis` computes the
four active functions of a span for many parameters at once. The second is
what the fitting code uses; the first is kept as a reference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "DEGREE",
    "KnotVector",
    "BasisMatrix",
    "PBGrid",
    "PersistenceVector",
    "knot_vector",
    "basis_value",
    "find_span",
    "nonzero_basis",
    "basis_functions",
    "curve_basis_matrix",
    "basis_matrix",
    "eval_surface",
    "eval_curve",
    "to_vector",
    "from_vector",
    "reconstruct_surface",
    "vector_to_json",
    "vector_from_json",
    "write_height_field",
]

DEGREE = 3
MIN_GRID = 5


@dataclass(frozen=True, eq=False)
class KnotVector:
    knots: np.ndarray
    degree: int = DEGREE

    @property
    def h(self) -> int:
        """Number of basis functions."""
        return len(self.knots) - self.degree - 1


def knot_vector(h: int) -> KnotVector:
    if h < MIN_GRID:
        raise ValueError(f"grid size h must be >= {MIN_GRID}, got {h}")
    interior = np.arange(1, h - 3) / (h - 3)
    knots = np.concatenate([np.zeros(4), interior, np.ones(4)])
    knots.setflags(write=False)
    return KnotVector(knots)


def basis_value(i: int, t: float, knots: KnotVector) -> float:
    """Value of the ``i``-th cubic basis function at ``t`` by direct recursion.

    Order-1 functions are indicators of half-open spans ``[u_i, u_{i+1})``,
    except that ``t = 1`` belongs to the last non-empty span. ``0/0`` terms
    are taken as 0.
    """
    U = knots.knots
    last = len(U) - 1

    def step(j: int) -> float:
        if U[j] <= t < U[j + 1]:
            return 1.0
        if t == U[last] and U[j] < U[j + 1] == U[last]:
            return 1.0
        return 0.0

    def rec(j: int, order: int) -> float:
        if order == 1:
            return step(j)
        value = 0.0
        den = U[j + order - 1] - U[j]
        if den != 0:
            value += (t - U[j]) / den * rec(j, order - 1)
        den = U[j + order] - U[j + 1]
        if den != 0:
            value += (U[j + order] - t) / den * rec(j + 1, order - 1)
        return value

    return rec(i, knots.degree + 1)


def find_span(t, h: int) -> np.ndarray:
    """Index ``s`` of the knot span ``[u_s, u_{s+1})`` containing each ``t``."""
    U = knot_vector(h).knots
    s = np.searchsorted(U, t, side="right") - 1
    return np.clip(s, DEGREE, h - 1)


def nonzero_basis(t, h: int):
    """Active basis values for every parameter in ``t``.

    Returns
    -------
    first : ndarray of int, shape (n,)
        Index of the first active function; functions ``first .. first+3``
        are the only ones that can be non-zero.
    values : ndarray, shape (n, 4)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    U = knot_vector(h).knots
    span = find_span(t, h)
    n = t.shape[0]
    N = np.zeros((n, 4))
    N[:, 0] = 1.0
    left = np.zeros((n, 4))
    right = np.zeros((n, 4))
    for j in range(1, 4):
        left[:, j] = t - U[span + 1 - j]
        right[:, j] = U[span + j] - t
        saved = np.zeros(n)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved
    # clamped ends interpolate exactly; the recurrence can miss by one ulp
    N[t == 0.0] = (1.0, 0.0, 0.0, 0.0)
    N[t == 1.0] = (0.0, 0.0, 0.0, 1.0)
    return span - DEGREE, N


def _check_unit(x, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any((x < 0) | (x > 1)):
        raise ValueError(f"{what} must lie in [0, 1]")
    return x


def basis_functions(t, h: int) -> np.ndarray:
    """Dense (n, h) matrix of all basis values at the parameters ``t``."""
    t = _check_unit(np.atleast_1d(t), "parameters")
    first, vals = nonzero_basis(t, h)
    out = np.zeros((t.shape[0], h))
    rows = np.arange(t.shape[0])
    for r in range(4):
        out[rows, first + r] = vals[:, r]
    return out


def curve_basis_matrix(t, h: int) -> sp.csr_matrix:
    """Sparse (k, h) basis matrix of a curve fit."""
    t = _check_unit(np.atleast_1d(t), "parameters")
    first, vals = nonzero_basis(t, h)
    k = t.shape[0]
    rows = np.repeat(np.arange(k), 4)
    cols = (first[:, None] + np.arange(4)).ravel()
    B = sp.csr_matrix((vals.ravel(), (rows, cols)), shape=(k, h))
    B.eliminate_zeros()
    return B


@dataclass(frozen=True, eq=False)
class BasisMatrix:
    """Tensor-product basis evaluated at the data sites.

    ``entries[l, i*h + j] = B_i(s_l) * B_j(t_l)``, stored as CSR with at most
    16 non-zeros per row.
    """

    entries: sp.csr_matrix
    h: int
    sites: np.ndarray

    @property
    def shape(self):
        return self.entries.shape

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()


def basis_matrix(sites, h: int) -> BasisMatrix:
    sites = np.asarray(sites, dtype=float).reshape(-1, 2)
    _check_unit(sites, "sites")
    k = sites.shape[0]
    fs, vs = nonzero_basis(sites[:, 0], h)
    ft, vt = nonzero_basis(sites[:, 1], h)
    a = np.arange(4)
    cols = (fs[:, None, None] + a[None, :, None]) * h + (ft[:, None, None] + a[None, None, :])
    vals = vs[:, :, None] * vt[:, None, :]
    rows = np.repeat(np.arange(k), 16)
    B = sp.csr_matrix((vals.ravel(), (rows, cols.ravel())), shape=(k, h * h))
    B.eliminate_zeros()
    sites = sites.copy()
    sites.setflags(write=False)
    return BasisMatrix(B, h, sites)


@dataclass(frozen=True, eq=False)
class PBGrid:
    """Square grid of control-point heights."""

    heights: np.ndarray

    def __post_init__(self):
        H = np.array(self.heights, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError(f"grid must be square, got shape {H.shape}")
        if not np.all(np.isfinite(H)):
            raise ValueError("grid heights must be finite")
        H.setflags(write=False)
        object.__setattr__(self, "heights", H)

    @property
    def h(self) -> int:
        return self.heights.shape[0]


@dataclass(frozen=True, eq=False)
class PersistenceVector:
    """Row-major flattening of a :class:`PBGrid`."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        h = math.isqrt(v.size)
        if h * h != v.size:
            raise ValueError(f"vector length {v.size} is not a perfect square")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def h(self) -> int:
        return math.isqrt(self.values.size)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def eval_surface(grid: PBGrid, s, t):
    """Evaluate the surface at ``(s, t)``; scalars in, scalar out."""
    scalar = np.ndim(s) == 0 and np.ndim(t) == 0
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    shape = s.shape
    s = _check_unit(s.ravel(), "s")
    t = _check_unit(t.ravel(), "t")
    P = grid.heights
    fs, vs = nonzero_basis(s, grid.h)
    ft, vt = nonzero_basis(t, grid.h)
    out = np.zeros(s.shape[0])
    # fixed accumulation order keeps results independent of batch size
    for a in range(4):
        for b in range(4):
            out += P[fs + a, ft + b] * (vs[:, a] * vt[:, b])
    if scalar:
        return float(out[0])
    return out.reshape(shape)


def eval_curve(ctrl, t):
    ctrl = np.asarray(ctrl, dtype=float)
    scalar = np.ndim(t) == 0
    t = _check_unit(np.atleast_1d(t), "t")
    first, vals = nonzero_basis(t, ctrl.shape[0])
    out = np.zeros(t.shape[0])
    for a in range(4):
        out += ctrl[first + a] * vals[:, a]
    return float(out[0]) if scalar else out


def to_vector(grid: PBGrid) -> PersistenceVector:
    return PersistenceVector(grid.heights.ravel())


def from_vector(v) -> PBGrid:
    if not isinstance(v, PersistenceVector):
        v = PersistenceVector(v)
    return PBGrid(v.values.reshape(v.h, v.h))


def reconstruct_surface(v, samples: int) -> np.ndarray:
    """Surface heights on the ``samples x samples`` lattice of the unit square.

    Entry ``[a, b]`` is the surface at ``(a/(samples-1), b/(samples-1))``.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    grid = from_vector(v)
    u = np.arange(samples) / (samples - 1)
    S, T = np.meshgrid(u, u, indexing="ij")
    return eval_surface(grid, S, T)


def vector_to_json(v: PersistenceVector, id: str | None = None) -> str:
    obj = {"h": v.h, "values": [float(x) for x in v.values]}
    if id is not None:
        obj = {"id": id, **obj}
    return json.dumps(obj)


def vector_from_json(text: str) -> PersistenceVector:
    obj = json.loads(text)
    v = PersistenceVector(obj["values"])
    if v.h != obj["h"]:
        raise ValueError(f"h={obj['h']} does not match {len(v)} values")
    return v


def write_height_field(field: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in np.asarray(field):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
