"""Diagram -> fitting data: birth-persistence coordinates, normalization, eminence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .diagram import PersistenceDiagram

__all__ = [
    "EminenceConfig",
    "FitDataset",
    "to_birth_persistence",
    "choose_m",
    "normalize",
    "persistence_cap",
    "neighbor_counts",
    "eminence",
    "prepare_fit_data",
]

DEFAULT_MARGIN = 0.01


@dataclass(frozen=True)
class EminenceConfig:
    """Parameters of the eminence function and the normalizing constant.

    Parameters
    ----------
    m : float
        Normalizing constant shared by the whole corpus; coordinates are
        divided by it.
    epsilon : float
        Radius of the open density ball (Euclidean, birth-death plane).
        ``0`` disables density weighting.
    M : int
        Cap on the neighbour count.
    L : float, optional
        Cap on the persistence. Defaults to ``m``.
    """

    m: float
    epsilon: float = 0.0
    M: int = 10
    L: Optional[float] = None

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ValueError(f"m must be positive, got {self.m}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.L is None:
            object.__setattr__(self, "L", float(self.m))
        elif not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")


@dataclass(frozen=True, eq=False)
class FitDataset:
    """Rows ``(s, t, z)``: normalized birth, normalized persistence, eminence."""

    samples: np.ndarray
    m_used: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float).reshape(-1, 3)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def sites(self) -> np.ndarray:
        return self.samples[:, :2]

    @property
    def values(self) -> np.ndarray:
        return self.samples[:, 2]


def to_birth_persistence(pd: PersistenceDiagram) -> np.ndarray:
    """Map ``(x, y)`` to ``(x, y - x)``; returns a (k, 2) array."""
    pts = pd.points
    return np.column_stack([pts[:, 0], pts[:, 1] - pts[:, 0]])


def choose_m(diagrams: Iterable[PersistenceDiagram], margin: float = DEFAULT_MARGIN) -> float:
    """Corpus-wide normalizing constant ``(1 + margin) * max coordinate``."""
    if not margin >= 0:
        raise ValueError("margin must be non-negative")
    top = -math.inf
    for pd in diagrams:
        if len(pd):
            top = max(top, float(pd.points.max()))
    if top == -math.inf:
        raise ValueError("cannot choose m: every diagram is empty")
    if top == 0:
        raise ValueError("cannot choose m: all coordinates are zero")
    return (1.0 + margin) * top


def normalize(points, m: float) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    bad = np.flatnonzero(np.any((points > m) | (points < 0), axis=1))
    if bad.size:
        i = bad[0]
        raise ValueError(
            f"point {i} {tuple(points[i].tolist())} lies outside [0, m] with m={m}"
        )
    return points / m


def persistence_cap(x, L: float):
    """Clip persistence at ``L``; identity below it."""
    return np.minimum(x, L)


def neighbor_counts(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Number of points in the open ``epsilon``-ball around each point, itself included.

    ``epsilon == 0`` gives 1 for every point.
    """
    k = points.shape[0]
    if epsilon == 0 or k == 0:
        return np.ones(k, dtype=int)
    # cKDTree balls are closed; shrink by one ulp to make them open
    radius = np.nextafter(epsilon, 0.0)
    tree = cKDTree(points)
    return np.asarray(tree.query_ball_point(points, radius, return_length=True), dtype=int)


def eminence(pd: PersistenceDiagram, cfg: EminenceConfig) -> np.ndarray:
    """Eminence ``min(n_eps, M) * min(death - birth, L)`` for every point."""
    counts = neighbor_counts(pd.points, cfg.epsilon)
    return np.minimum(counts, cfg.M) * persistence_cap(pd.persistence, cfg.L)


def prepare_fit_data(pd: PersistenceDiagram, cfg: EminenceConfig) -> FitDataset:
    bp = to_birth_persistence(pd)
    if len(pd):
        # range check on the raw diagram, then scale birth-persistence
        normalize(pd.points, cfg.m)
    st = bp / cfg.m
    z = eminence(pd, cfg)
    return FitDataset(np.column_stack([st, z]), float(cfg.m))
