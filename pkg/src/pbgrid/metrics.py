"""Wasserstein and bottleneck distances between diagrams, plus vector norms.

Ground cost between two diagram points is the sup-norm. A point may also be
matched to the diagonal at cost ``(death - birth) / 2``, its sup-norm distance
to the nearest diagonal point. Exact matchings come from an assignment problem
on the diagonal-augmented cost matrix of size ``(n + m) x (n + m)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagram import PersistenceDiagram

__all__ = [
    "DIAGONAL",
    "Matching",
    "DistanceMatrix",
    "wasserstein",
    "wasserstein_matching",
    "bottleneck",
    "brute_force_distance",
    "vector_distance",
    "distance_matrix",
]

DIAGONAL = -1
BRUTE_FORCE_MAX_POINTS = 8


@dataclass(frozen=True)
class Matching:
    """Optimal partial matching; ``DIAGONAL`` marks a point sent to the diagonal."""

    pairs: list
    cost: float


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    entries: np.ndarray
    labels: list

    def to_csv(self) -> str:
        lines = [",".join(str(lab) for lab in self.labels)]
        lines.extend(",".join(repr(float(x)) for x in row) for row in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        labels = rows[0].split(",")
        entries = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
        if entries.shape != (len(labels), len(labels)):
            raise ValueError("distance matrix CSV is not square")
        return cls(entries, labels)


def _points(pd) -> np.ndarray:
    if isinstance(pd, PersistenceDiagram):
        return pd.points
    return np.asarray(pd, dtype=float).reshape(-1, 2)


def _diag_cost(P: np.ndarray) -> np.ndarray:
    return (P[:, 1] - P[:, 0]) / 2.0


def _pair_cost(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)


def _augmented_costs(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Sup-norm costs; rows are A then B's diagonal slots, columns B then A's."""
    n, m = len(A), len(B)
    C = np.full((n + m, m + n), np.inf)
    C[:n, :m] = _pair_cost(A, B)
    C[:n, m:][np.arange(n), np.arange(n)] = _diag_cost(A)
    C[n:, :m][np.arange(m), np.arange(m)] = _diag_cost(B)
    C[n:, m:] = 0.0
    return C


def _check_p(p: float) -> None:
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")


def wasserstein_matching(pd1, pd2, p: float = 1.0) -> Matching:
    _check_p(p)
    A, B = _points(pd1), _points(pd2)
    n, m = len(A), len(B)
    if n + m == 0:
        return Matching([], 0.0)
    C = _augmented_costs(A, B)
    if math.isinf(p):
        return _bottleneck_matching(C, n, m)
    W = C ** p
    rows, cols = linear_sum_assignment(W)
    pairs = []
    total = 0.0
    for r, c in zip(rows, cols):
        if r >= n and c >= m:
            continue
        total += W[r, c]
        pairs.append((int(r) if r < n else DIAGONAL, int(c) if c < m else DIAGONAL))
    return Matching(pairs, total ** (1.0 / p))


def wasserstein(pd1, pd2, p: float = 1.0) -> float:
    """p-Wasserstein distance; ``p = inf`` gives the bottleneck distance."""
    return wasserstein_matching(pd1, pd2, p).cost


def _bottleneck_matching(C: np.ndarray, n: int, m: int) -> Matching:
    candidates = np.unique(C[np.isfinite(C)])

    def feasible(r):
        graph = csr_matrix((C <= r).astype(np.int8))
        match = maximum_bipartite_matching(graph, perm_type="column")
        return match, bool(np.all(match >= 0))

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid])[1]:
            hi = mid
        else:
            lo = mid + 1
    best = candidates[lo]
    match, _ = feasible(best)
    pairs = []
    for r, c in enumerate(match):
        if r >= n and c >= m:
            continue
        pairs.append((r if r < n else DIAGONAL, int(c) if c < m else DIAGONAL))
    return Matching(pairs, float(best))


def bottleneck(pd1, pd2) -> float:
    """Bottleneck distance by binary search over candidate costs."""
    A, B = _points(pd1), _points(pd2)
    if len(A) + len(B) == 0:
        return 0.0
    return _bottleneck_matching(_augmented_costs(A, B), len(A), len(B)).cost


def brute_force_distance(pd1, pd2, p: float = 1.0) -> float:
    """Exhaustive minimum over all partial matchings; test oracle for tiny diagrams.

    Every injection from a subset of ``pd1`` into ``pd2`` is tried; unmatched
    points on either side pay their diagonal cost.
    """
    _check_p(p)
    A, B = _points(pd1), _points(pd2)
    n, m = len(A), len(B)
    if n + m > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_POINTS} points in total")
    da, db = _diag_cost(A), _diag_cost(B)
    D = _pair_cost(A, B) if n and m else np.zeros((n, m))
    best = math.inf
    for size in range(min(n, m) + 1):
        for left in itertools.combinations(range(n), size):
            for right in itertools.permutations(range(m), size):
                matched = [D[i, j] for i, j in zip(left, right)]
                rest = [da[i] for i in range(n) if i not in left]
                rest += [db[j] for j in range(m) if j not in right]
                costs = matched + rest
                if math.isinf(p):
                    value = max(costs, default=0.0)
                else:
                    value = sum(c ** p for c in costs)
                best = min(best, value)
    if math.isinf(p):
        return best
    return best ** (1.0 / p)


def vector_distance(v1, v2, p: float = 2.0) -> float:
    a = np.asarray(v1, dtype=float).ravel()
    b = np.asarray(v2, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if not (p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float(np.linalg.norm(a - b, ord=p))


def distance_matrix(
    items: Sequence,
    metric: Callable[[object, object], float],
    labels: Optional[Sequence] = None,
) -> DistanceMatrix:
    """Pairwise distances, evaluating only ``i < j`` and mirroring."""
    n = len(items)
    labels = [str(i) for i in range(n)] if labels is None else [str(x) for x in labels]
    if len(labels) != n:
        raise ValueError("labels must align with items")
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = metric(items[i], items[j])
    return DistanceMatrix(D, labels)
