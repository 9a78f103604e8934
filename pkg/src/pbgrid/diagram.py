"""Persistence diagrams: the core value type, CSV IO and seeded perturbation.

A diagram is a finite multiset of ``(birth, death)`` pairs with
``0 <= birth <= death < inf``. Duplicate points are kept.

CSV layout::

    # dim=1
    birth,death
    0.1,0.8
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TextIO, Union

import numpy as np

__all__ = [
    "DiagramParseError",
    "InfiniteDeathError",
    "PersistenceDiagram",
    "PerturbationSpec",
    "parse_diagram",
    "serialize_diagram",
    "read_diagram",
    "write_diagram",
    "perturb_diagram",
]


class DiagramParseError(ValueError):
    """Raised when diagram text is malformed or violates the point invariants."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class InfiniteDeathError(DiagramParseError):
    """Raised for essential classes (infinite death); use reduced H0 instead."""


def _check_points(points: np.ndarray) -> None:
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f"points must have shape (k, 2), got {points.shape}")
    if not np.all(np.isfinite(points)):
        raise ValueError("diagram points must be finite")
    if np.any(points[:, 0] < 0):
        raise ValueError("negative birth in diagram")
    if np.any(points[:, 1] < points[:, 0]):
        raise ValueError("death < birth in diagram")


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Immutable multiset of birth-death pairs in one homology dimension.

    Parameters
    ----------
    points : array_like, shape (k, 2)
        Birth-death pairs, kept in the given order.
    homology_dim : int
        Homology dimension the pairs come from.
    """

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    homology_dim: int = 1

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        _check_points(pts)
        if self.homology_dim < 0:
            raise ValueError("homology_dim must be non-negative")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.homology_dim == other.homology_dim and np.array_equal(
            self.points, other.points
        )

    def __hash__(self):
        return hash((self.homology_dim, self.points.tobytes()))

    @property
    def births(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def persistence(self) -> np.ndarray:
        return self.points[:, 1] - self.points[:, 0]

    def union(self, *others: "PersistenceDiagram") -> "PersistenceDiagram":
        """Multiset union, keeping this diagram's homology dimension."""
        pts = np.vstack([self.points] + [o.points for o in others])
        return PersistenceDiagram(pts, self.homology_dim)


@dataclass(frozen=True)
class PerturbationSpec:
    tau: float
    seed: int = 0

    def __post_init__(self):
        # tau == 0 is accepted as the identity perturbation
        if not (self.tau >= 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be a finite non-negative number, got {self.tau}")


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DiagramParseError(f"malformed number {token.strip()!r}", lineno) from None
    if math.isnan(value):
        raise DiagramParseError("NaN coordinate", lineno)
    return value


def parse_diagram(text: Union[str, TextIO]) -> PersistenceDiagram:
    """Parse the ``birth,death`` CSV format.

    Leading ``#`` lines are comments; ``# dim=<n>`` sets the homology
    dimension (default 1). Errors name the 1-based line number.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.split("\n")
    dim = 1
    header_seen = False
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if not header_seen:
            if line.startswith("#"):
                body = line[1:].strip().replace(" ", "")
                if body.startswith("dim="):
                    try:
                        dim = int(body[4:])
                    except ValueError:
                        raise DiagramParseError("malformed dim comment", lineno) from None
                    if dim < 0:
                        raise DiagramParseError("negative homology dimension", lineno)
                continue
            if line.replace(" ", "") != "birth,death":
                raise DiagramParseError("expected header 'birth,death'", lineno)
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DiagramParseError("expected two comma-separated values", lineno)
        birth = _parse_float(parts[0], lineno)
        death = _parse_float(parts[1], lineno)
        if math.isinf(death) or math.isinf(birth):
            raise InfiniteDeathError("infinite coordinate (use reduced H0)", lineno)
        if birth < 0:
            raise DiagramParseError("negative birth", lineno)
        if death < birth:
            raise DiagramParseError("death < birth", lineno)
        rows.append((birth, death))
    if not header_seen:
        raise DiagramParseError("missing header 'birth,death'")
    return PersistenceDiagram(np.array(rows, dtype=float).reshape(-1, 2), dim)


def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips bit-exactly
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def serialize_diagram(pd: PersistenceDiagram) -> str:
    out = [f"# dim={pd.homology_dim}", "birth,death"]
    out.extend(f"{_fmt(b)},{_fmt(d)}" for b, d in pd.points)
    return "\n".join(out) + "\n"


def read_diagram(path) -> PersistenceDiagram:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_diagram(fh)


def write_diagram(pd: PersistenceDiagram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_diagram(pd))


def perturb_diagram(pd: PersistenceDiagram, spec: PerturbationSpec) -> PersistenceDiagram:
    """Move every point by at most ``tau`` in each coordinate.

    Each point becomes ``(x +- tau*r1, y +- tau*r2)`` with ``r1, r2 ~ U(0, 1)``
    and independent fair signs. Births are clamped at 0 and deaths are raised
    to the birth when the draw inverts the pair, so the output stays a valid
    diagram of the same size and every point stays within sup-distance ``tau``
    of its source.
    """
    rng = np.random.default_rng(spec.seed)
    k = len(pd)
    r = rng.uniform(0.0, 1.0, size=(k, 2))
    signs = np.where(rng.random((k, 2)) < 0.5, -1.0, 1.0)
    moved = pd.points + spec.tau * signs * r
    births = np.maximum(moved[:, 0], 0.0)
    deaths = np.maximum(moved[:, 1], births)
    return PersistenceDiagram(np.column_stack([births, deaths]), pd.homology_dim)

