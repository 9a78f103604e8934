"""Desk-scale reruns of the stability and classification studies.

Every experiment is a deterministic function of its master seed; per-task
seeds are derived with :class:`numpy.random.SeedSequence` so results do not
depend on evaluation order.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .bspline import basis_matrix
from .datasets import (
    P1,
    P2,
    P3,
    SHAPES,
    RandomPdSpec,
    perturbed_point,
    random_count,
    random_pd,
    sample_shape,
)
from .diagram import PersistenceDiagram
from .homology import persistence_diagrams
from .lspia import LspiaConfig, lspia_iterate, step_weight, vectorize, vectorize_many
from .metrics import DistanceMatrix, wasserstein
from .transform import EminenceConfig, choose_m, prepare_fit_data

__all__ = [
    "RatioCurve",
    "ClassificationReport",
    "subseed",
    "stable_coefficient",
    "ratio_curve",
    "vector_distance_matrix",
    "stratified_split",
    "knn_predict",
    "knn_classify",
    "feature_designs",
    "feature_extraction_suite",
    "overperformance_suite",
    "shape_diagrams",
    "shape_suite",
    "sparsity_report",
]

log = logging.getLogger(__name__)

DEFAULT_NS = (10, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000)
NORMS = (1, 2, math.inf)


def subseed(seed: int, *keys: int) -> int:
    """Independent child seed for task ``keys`` of master ``seed``."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


# --- stability coefficient ------------------------------------------------


def stable_coefficient(
    pd: PersistenceDiagram, N: int, p: float, em: EminenceConfig, h: int = 20
) -> float:
    """``||v_N||_p / W_p(pd, empty)`` for the vector ``v_N`` after ``N`` iterations."""
    if len(pd) == 0:
        raise ValueError("stable coefficient undefined for the empty diagram")
    v = vectorize(pd, em, LspiaConfig(h=h, iterations=N))
    return float(np.linalg.norm(v.values, ord=p)) / wasserstein(pd, [], p)


@dataclass
class RatioCurve:
    """Mean and std of ``||v_N||_p / ||v_ref||_p`` over a corpus, per norm."""

    Ns: List[int]
    mean: Dict[float, np.ndarray]
    std: Dict[float, np.ndarray]
    count: int = 0

    def at(self, N: int, p: float) -> float:
        return float(self.mean[p][self.Ns.index(N)])

    def to_csv(self) -> str:
        lines = ["N,p,mean,std"]
        for p in self.mean:
            label = "inf" if math.isinf(p) else f"{p:g}"
            for i, N in enumerate(self.Ns):
                lines.append(f"{N},{label},{float(self.mean[p][i])!r},{float(self.std[p][i])!r}")
        return "\n".join(lines) + "\n"


def ratio_curve(
    pds: Iterable[PersistenceDiagram],
    Ns: Sequence[int] = DEFAULT_NS,
    ps: Sequence[float] = NORMS,
    em: Optional[EminenceConfig] = None,
    h: int = 20,
) -> RatioCurve:
    """Growth of the stability coefficient with the iteration count.

    The diagram distance cancels in the quotient, so only vector norms are
    needed; the largest entry of ``Ns`` is the reference. Each diagram is
    fitted once, with snapshots taken at every ``N``.
    """
    Ns = sorted(int(n) for n in Ns)
    if len(set(Ns)) != len(Ns) or Ns[0] < 1:
        raise ValueError("Ns must be distinct positive integers")
    em = em or EminenceConfig(m=1.0)
    ref = Ns[-1]
    rows = {p: [] for p in ps}
    for pd in pds:
        if len(pd) == 0:
            log.warning("skipping empty diagram in ratio curve")
            continue
        data = prepare_fit_data(pd, em)
        B = basis_matrix(data.sites, h)
        _, _, snaps = lspia_iterate(B, data.values, step_weight(B), ref, Ns)
        for p in ps:
            norms = np.array([np.linalg.norm(snaps[n], ord=p) for n in Ns])
            if norms[-1] == 0:
                log.warning("skipping diagram with zero reference norm")
                continue
            rows[p].append(norms / norms[-1])
    mean = {p: np.mean(r, axis=0) for p, r in rows.items()}
    std = {p: np.std(r, axis=0) for p, r in rows.items()}
    count = min(len(r) for r in rows.values())
    return RatioCurve(list(Ns), mean, std, count)


# --- kNN harness ----------------------------------------------------------


@dataclass
class ClassificationReport:
    accuracy_mean: float
    accuracy_std: float
    trials: int
    k: int
    split: float
    accuracies: List[float] = field(default_factory=list, repr=False)

    def to_json(self, experiment: str, params: Optional[dict] = None) -> str:
        body = {
            "experiment": experiment,
            "accuracy_mean": self.accuracy_mean,
            "accuracy_std": self.accuracy_std,
            "params": {"trials": self.trials, "k": self.k, "split": self.split, **(params or {})},
        }
        return json.dumps(body, sort_keys=True)


def vector_distance_matrix(X: np.ndarray, p: float = 2) -> np.ndarray:
    from scipy.spatial.distance import cdist

    if math.isinf(p):
        return cdist(X, X, "chebyshev")
    return cdist(X, X, "minkowski", p=p)


def stratified_split(labels: np.ndarray, split: float, rng: np.random.Generator):
    """Shuffled split keeping a ``split`` share of every class for training.

    One permutation of all items is drawn and each class takes its first
    members in that order, so the split does not depend on label values.
    """
    order = rng.permutation(labels.size)
    train, test = [], []
    for c in np.unique(labels):
        idx = order[labels[order] == c]
        n_train = min(max(1, int(round(split * idx.size))), idx.size - 1)
        train.append(idx[:n_train])
        test.append(idx[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def knn_predict(D: np.ndarray, train: np.ndarray, test: np.ndarray, labels: np.ndarray, k: int):
    """Majority vote of the ``k`` nearest training items for each test row.

    Ties go to the class with the smaller mean distance among the voters,
    then to the lower label.
    """
    classes = np.unique(labels)
    out = np.empty(test.size, dtype=labels.dtype)
    kk = min(k, train.size)
    for n, i in enumerate(test):
        d = D[i, train]
        near = np.argsort(d, kind="stable")[:kk]
        votes = labels[train[near]]
        best = None
        for c in classes:
            mask = votes == c
            if not mask.any():
                continue
            key = (-int(mask.sum()), float(d[near][mask].mean()), c)
            if best is None or key < best:
                best = key
        out[n] = best[2]
    return out


def knn_classify(
    dm,
    labels,
    k: int = 3,
    split: float = 0.7,
    trials: int = 100,
    seed: int = 0,
) -> ClassificationReport:
    """Mean and std of kNN test accuracy over seeded stratified splits."""
    D = dm.entries if isinstance(dm, DistanceMatrix) else np.asarray(dm, dtype=float)
    labels = np.asarray(labels)
    if D.shape != (labels.size, labels.size):
        raise ValueError("labels must align with the distance matrix")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < split < 1:
        raise ValueError("split must be in (0, 1)")
    _, counts = np.unique(labels, return_counts=True)
    if counts.min() < 2:
        raise ValueError("every class needs at least two items")
    accs = []
    for t in range(trials):
        rng = np.random.default_rng(subseed(seed, t))
        train, test = stratified_split(labels, split, rng)
        pred = knn_predict(D, train, test, labels, k)
        accs.append(float(np.mean(pred == labels[test])))
    return ClassificationReport(float(np.mean(accs)), float(np.std(accs)), trials, k, split, accs)


def _classify_vectors(X, labels, k, split, trials, seed, p=2):
    return knn_classify(vector_distance_matrix(X, p), labels, k, split, trials, seed)


# --- random-diagram feature tests -----------------------------------------


def feature_designs(design: int, seed: int, per_class: int = 20, count: int = 50, tau: float = 0.02):
    """Diagrams and labels of the two five-category designs.

    Design 1 tags a random diagram with none, one or two perturbed copies of
    the fixture points (``P1``, ``P2``, ``P3``, ``P2 + P3``). Design 2 adds
    ``i`` perturbed copies of ``P1`` for ``i = 1..5``.
    """
    if design == 1:
        recipes = [(), (P1,), (P2,), (P3,), (P2, P3)]
    elif design == 2:
        recipes = [(P1,) * i for i in range(1, 6)]
    else:
        raise ValueError("design must be 1 or 2")
    pds, labels = [], []
    for c, extra in enumerate(recipes):
        for r in range(per_class):
            base = random_pd(RandomPdSpec(tau, count, subseed(seed, design, c, r)))
            tags = [perturbed_point(pt, tau, subseed(seed, design, c, r, 1 + j)) for j, pt in enumerate(extra)]
            pds.append(base.union(*tags))
            labels.append(c)
    return pds, np.array(labels)


def feature_extraction_suite(
    seed: int = 0,
    design: int = 1,
    epsilons: Sequence[float] = (0.0, 0.01, 0.02, 0.05),
    h: int = 20,
    iterations: int = 100,
    k: int = 3,
    trials: int = 100,
) -> Dict[float, ClassificationReport]:
    pds, labels = feature_designs(design, seed)
    m = choose_m(pds)
    cfg = LspiaConfig(h=h, iterations=iterations)
    out = {}
    for eps in epsilons:
        X = vectorize_many(pds, EminenceConfig(m=m, epsilon=eps), cfg)
        out[eps] = _classify_vectors(X, labels, k, 0.7, trials, subseed(seed, 7))
        log.info("design %d eps=%g accuracy %.3f", design, eps, out[eps].accuracy_mean)
    return out


def overperformance_suite(
    seed: int = 0,
    n_pds: int = 100,
    n_classes: int = 5,
    label_draws: int = 50,
    trials: int = 100,
    epsilon: float = 0.0,
    h: int = 20,
    iterations: int = 100,
    k: int = 3,
) -> ClassificationReport:
    """kNN on random diagrams with random balanced labels.

    ``accuracy_mean`` averages over all label draws and splits;
    ``accuracy_std`` is the spread of the per-draw mean accuracies.
    """
    rng = np.random.default_rng(subseed(seed, 0))
    pds = [random_pd(RandomPdSpec(1.0, random_count(rng), subseed(seed, 1, i))) for i in range(n_pds)]
    m = choose_m(pds)
    X = vectorize_many(pds, EminenceConfig(m=m, epsilon=epsilon), LspiaConfig(h=h, iterations=iterations))
    D = vector_distance_matrix(X)
    base = np.arange(n_pds) % n_classes
    draws = []
    for d in range(label_draws):
        labels = np.random.default_rng(subseed(seed, 2, d)).permutation(base)
        draws.append(knn_classify(D, labels, k, 0.7, trials, subseed(seed, 3, d)).accuracy_mean)
    return ClassificationReport(float(np.mean(draws)), float(np.std(draws)), trials, k, 0.7, draws)


# --- toy shapes -----------------------------------------------------------


def shape_diagrams(
    seed: int = 0,
    points_per_cloud: int = 150,
    clouds_per_class: int = 20,
    kinds: Sequence[str] = SHAPES,
    noise: float = 0.025,
    r_max: float = np.inf,
):
    """H1 diagrams of noisy samples of every shape, with integer labels."""
    if points_per_cloud > 150:
        raise ValueError("points_per_cloud is limited to 150 for triangle filtrations")
    pds, labels = [], []
    for c, kind in enumerate(kinds):
        ci = SHAPES.index(kind)
        for r in range(clouds_per_class):
            pts = sample_shape(kind, points_per_cloud, noise, subseed(seed, ci, r))
            pds.append(persistence_diagrams(pts, 2, r_max).h1)
            labels.append(c)
    return pds, np.array(labels)


def shape_suite(
    seed: int = 0,
    points_per_cloud: int = 150,
    clouds_per_class: int = 20,
    kinds: Sequence[str] = SHAPES,
    epsilon: float = 1e-10,
    h: int = 20,
    iterations: int = 100,
    k: int = 3,
    trials: int = 100,
    diagrams=None,
) -> ClassificationReport:
    """Classify shapes from the vectors of their H1 diagrams.

    ``diagrams`` may pass precomputed ``(pds, labels)`` from :func:`shape_diagrams`.
    """
    if diagrams is None:
        diagrams = shape_diagrams(seed, points_per_cloud, clouds_per_class, kinds)
    pds, labels = diagrams
    m = choose_m(pds)
    X = vectorize_many(pds, EminenceConfig(m=m, epsilon=epsilon), LspiaConfig(h=h, iterations=iterations))
    return _classify_vectors(X, labels, k, 0.7, trials, subseed(seed, 11))


def sparsity_report(vectors, tol: float = 1e-9) -> float:
    """Mean fraction of entries with ``|value| < tol``."""
    X = np.atleast_2d(np.asarray([np.asarray(v, dtype=float).ravel() for v in vectors]))
    if X.size == 0:
        raise ValueError("no vectors given")
    return float(np.mean(np.abs(X) < tol))
