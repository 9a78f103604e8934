"""Seeded synthetic data: random diagrams, toy point clouds, food-chain orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .diagram import PersistenceDiagram, PerturbationSpec, perturb_diagram

__all__ = [
    "P1",
    "P2",
    "P3",
    "SHAPES",
    "RandomPdSpec",
    "OrbitSpec",
    "random_pd",
    "random_count",
    "perturbed_point",
    "sample_shape",
    "lindstrom_K",
    "lindstrom_orbit",
    "LINDSTROM_M0",
]

# long-persistence fixture points used to tag diagram categories
P1 = (0.1, 0.8)
P2 = (0.3, 0.7)
P3 = (0.7, 0.9)

SHAPES = ("circle", "concentric", "two_circles", "cluster", "two_clusters")

LINDSTROM_M0 = (3.0, 3.3, 3.48, 3.54, 3.57, 3.532, 3.571, 3.3701, 3.4001)


@dataclass(frozen=True)
class RandomPdSpec:
    tau: float
    count: int
    seed: int = 0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.count < 0:
            raise ValueError(f"count must be non-negative, got {self.count}")


def random_pd(spec: RandomPdSpec, homology_dim: int = 1) -> PersistenceDiagram:
    """Points ``(x - tau|y|/2, x + tau|y|/2)`` with ``x ~ U[0,1]``, ``y ~ N(0,1)``.

    Candidates leaving ``[0, 1]`` are discarded and redrawn until ``count``
    points are accepted.
    """
    rng = np.random.default_rng(spec.seed)
    accepted = []
    need = spec.count
    while need > 0:
        batch = max(2 * need, 16)
        x = rng.uniform(0.0, 1.0, batch)
        half = spec.tau * np.abs(rng.standard_normal(batch)) / 2.0
        b, d = x - half, x + half
        ok = (b >= 0) & (d <= 1)
        pts = np.column_stack([b[ok], d[ok]])[:need]
        accepted.append(pts)
        need -= pts.shape[0]
    pts = np.vstack(accepted) if accepted else np.empty((0, 2))
    return PersistenceDiagram(pts, homology_dim)


def random_count(rng: np.random.Generator, mean: float = 200.0, std: float = 10.0) -> int:
    """Normal draw rounded half away from zero, at least 1."""
    v = rng.normal(mean, std)
    return max(1, int(math.copysign(math.floor(abs(v) + 0.5), v)))


def perturbed_point(point: Tuple[float, float], tau: float, seed: int) -> PersistenceDiagram:
    """Single-point diagram holding ``point`` moved by at most ``tau`` per coordinate."""
    return perturb_diagram(PersistenceDiagram([point]), PerturbationSpec(tau, seed))


def _circle(rng, n, r, center=(0.0, 0.0)):
    th = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])


def sample_shape(kind: str, n: int, noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """Sample ``n`` planar points from one of :data:`SHAPES` inside ``[-0.5, 0.5]^2``.

    ``circle``: radius 0.4. ``concentric``: radii 0.2 and 0.4, split evenly.
    ``two_circles``: radius 0.2 centred at ``(+-0.25, 0)``. ``cluster``:
    uniform in the square. ``two_clusters``: uniform in the squares
    ``[-0.5, 0]^2`` and ``[0, 0.5]^2``. Isotropic Gaussian noise with standard
    deviation ``noise`` is added last.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    first = (n + 1) // 2
    if kind == "circle":
        pts = _circle(rng, n, 0.4)
    elif kind == "concentric":
        pts = np.vstack([_circle(rng, first, 0.2), _circle(rng, n - first, 0.4)])
    elif kind == "two_circles":
        pts = np.vstack([_circle(rng, first, 0.2, (-0.25, 0)), _circle(rng, n - first, 0.2, (0.25, 0))])
    elif kind == "cluster":
        pts = rng.uniform(-0.5, 0.5, (n, 2))
    elif kind == "two_clusters":
        pts = np.vstack([rng.uniform(-0.5, 0.0, (first, 2)), rng.uniform(0.0, 0.5, (n - first, 2))])
    else:
        raise ValueError(f"unknown shape {kind!r}; expected one of {SHAPES}")
    if noise:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts


@dataclass(frozen=True)
class OrbitSpec:
    M0: float
    M1: float = 1.0
    M2: float = 4.0
    M3: float = 4.0
    initial: Optional[Tuple[float, float, float]] = None
    iterations: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


def lindstrom_K(x: float) -> float:
    """``(1 - exp(-x)) / x``, with the removable singularity ``K(0) = 1``."""
    if x == 0:
        return 1.0
    return -math.expm1(-x) / x


def lindstrom_orbit(spec: OrbitSpec) -> np.ndarray:
    """Orbit ``(X_t, Y_t, Z_t)``, ``t = 1..iterations``, of the discrete food-chain map.

    Without an explicit initial value one is drawn from ``(1,2) x (0,1)^2``.
    """
    if spec.initial is None:
        rng = np.random.default_rng(spec.seed)
        x, y, z = rng.uniform((1.0, 0.0, 0.0), (2.0, 1.0, 1.0))
    else:
        x, y, z = (float(v) for v in spec.initial)
    K = lindstrom_K
    out = np.empty((spec.iterations, 3))
    for t in range(spec.iterations):
        try:
            ey = math.exp(-y)
            x, y, z = (
                spec.M0 * x * ey / (1.0 + x * max(ey, K(z) * K(y))),
                spec.M1 * x * y * math.exp(-z) * K(y) * K(spec.M3 * y * z),
                spec.M2 * y * z,
            )
        except (OverflowError, ZeroDivisionError):
            raise FloatingPointError(f"orbit left the finite range at step {t + 1}") from None
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            raise FloatingPointError(f"orbit left the finite range at step {t + 1}")
        out[t] = (x, y, z)
    return out
