"""Vietoris-Rips persistent homology for small point clouds.

Edges enter at the pairwise Euclidean distance and triangles at their
longest edge. Persistence pairs come from left-to-right reduction of the Z2
boundary matrix, with columns held as Python-int bitsets (column addition
is XOR). Higher dimensions are reduced first so columns of simplices already
known to be positive can be skipped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .diagram import PersistenceDiagram

__all__ = [
    "UNPAIRED",
    "Simplex",
    "Filtration",
    "Diagrams",
    "vr_filtration",
    "boundary_matrix",
    "reduce_and_pair",
    "persistence_diagrams",
    "read_point_cloud",
    "write_point_cloud",
]

log = logging.getLogger(__name__)

UNPAIRED = -1
MAX_POINTS = {1: 400, 2: 150}


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True, eq=False)
class Filtration:
    """Simplices sorted by ``(value, dimension, vertices)``.

    ``vertices`` is an ``(N, 3)`` int array padded with -1; row ``i`` holds
    the ``i``-th simplex of the order.
    """

    vertices: np.ndarray
    values: np.ndarray
    dims: np.ndarray
    max_dim: int
    r_max: float

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> Simplex:
        d = int(self.dims[i])
        return Simplex(tuple(int(v) for v in self.vertices[i, : d + 1]), float(self.values[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def indices(self, dim: int) -> np.ndarray:
        """Global positions of the ``dim``-simplices, in filtration order."""
        return np.flatnonzero(self.dims == dim)


def vr_filtration(points, max_dim: int = 2, r_max: float = np.inf) -> Filtration:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if max_dim not in MAX_POINTS:
        raise ValueError(f"max_dim must be 1 or 2, got {max_dim}")
    n = pts.shape[0]
    if n > MAX_POINTS[max_dim]:
        raise ValueError(
            f"{n} points exceeds the limit of {MAX_POINTS[max_dim]} for max_dim={max_dim}"
        )
    D = cdist(pts, pts)
    adj = D <= r_max
    np.fill_diagonal(adj, False)

    iu, ju = np.nonzero(np.triu(adj, 1))
    blocks_v = [np.column_stack([np.arange(n), -np.ones((n, 2), int)])]
    blocks_x = [np.zeros(n)]
    blocks_d = [np.zeros(n, int)]
    if iu.size:
        blocks_v.append(np.column_stack([iu, ju, -np.ones(iu.size, int)]))
        blocks_x.append(D[iu, ju])
        blocks_d.append(np.ones(iu.size, int))
    if max_dim >= 2 and iu.size:
        tris, vals = [], []
        for i, j in zip(iu, ju):
            ks = np.flatnonzero(adj[i, j + 1:] & adj[j, j + 1:]) + j + 1
            if ks.size:
                tris.append(np.column_stack([np.full(ks.size, i), np.full(ks.size, j), ks]))
                vals.append(np.maximum(D[i, j], np.maximum(D[i, ks], D[j, ks])))
        if tris:
            t = np.vstack(tris)
            blocks_v.append(t)
            blocks_x.append(np.concatenate(vals))
            blocks_d.append(np.full(t.shape[0], 2))
    V = np.vstack(blocks_v)
    X = np.concatenate(blocks_x)
    Dm = np.concatenate(blocks_d)
    order = np.lexsort((V[:, 2], V[:, 1], V[:, 0], Dm, X))
    return Filtration(V[order], X[order], Dm[order], max_dim, float(r_max))


def _ranks(f: Filtration):
    """Rank of every simplex within its dimension, and an edge lookup table."""
    rank = np.empty(len(f), dtype=np.int64)
    for d in range(3):
        idx = f.indices(d)
        rank[idx] = np.arange(idx.size)
    n = int(np.sum(f.dims == 0))
    edge_rank = np.full((n, n), -1, dtype=np.int64)
    eidx = f.indices(1)
    if eidx.size:
        u, v = f.vertices[eidx, 0], f.vertices[eidx, 1]
        edge_rank[u, v] = rank[eidx]
        edge_rank[v, u] = rank[eidx]
    vertex_rank = np.full(n, -1, dtype=np.int64)
    vidx = f.indices(0)
    vertex_rank[f.vertices[vidx, 0]] = rank[vidx]
    return rank, vertex_rank, edge_rank


def _faces(f: Filtration, dim: int, vertex_rank, edge_rank) -> np.ndarray:
    """Ranks of the codimension-1 faces of every ``dim``-simplex."""
    V = f.vertices[f.indices(dim)]
    if dim == 1:
        return np.column_stack([vertex_rank[V[:, 0]], vertex_rank[V[:, 1]]])
    return np.column_stack(
        [edge_rank[V[:, 0], V[:, 1]], edge_rank[V[:, 0], V[:, 2]], edge_rank[V[:, 1], V[:, 2]]]
    )


def boundary_matrix(f: Filtration, dim: int) -> sp.csc_matrix:
    """Z2 boundary map from ``dim``-simplices to their faces, both in filtration order."""
    _, vertex_rank, edge_rank = _ranks(f)
    rows = f.indices(dim - 1).size
    cols = f.indices(dim).size
    if cols == 0:
        return sp.csc_matrix((rows, 0), dtype=np.int64)
    F = _faces(f, dim, vertex_rank, edge_rank)
    if np.any(F < 0):
        raise ValueError(f"a {dim}-simplex has a face missing from the filtration")
    r = F.ravel()
    c = np.repeat(np.arange(cols), F.shape[1])
    return sp.csc_matrix((np.ones(r.size, dtype=np.int64), (r, c)), shape=(rows, cols))


def _check_order(f: Filtration, dim: int, faces: np.ndarray) -> None:
    face_pos = f.indices(dim - 1)[faces]
    own = f.indices(dim)
    if np.any(face_pos.max(axis=1) >= own):
        bad = int(own[np.argmax(face_pos.max(axis=1) >= own)])
        raise ValueError(f"simplex {bad} precedes one of its faces in the filtration")


def reduce_and_pair(f: Filtration) -> list:
    """Persistence pairs ``(birth, death)`` as global filtration positions.

    A creator that is never killed is paired with :data:`UNPAIRED`.
    """
    _, vertex_rank, edge_rank = _ranks(f)
    top = int(f.dims.max()) if len(f) else 0
    pivots = {}  # dim -> {low face rank: column rank}
    positive = {d: set() for d in range(top + 1)}
    for dim in range(top, 0, -1):
        faces = _faces(f, dim, vertex_rank, edge_rank)
        if np.any(faces < 0):
            raise ValueError(f"a {dim}-simplex has a face missing from the filtration")
        _check_order(f, dim, faces)
        low_of = {}
        reduced = {}
        skip = positive[dim]
        created = positive[dim - 1]
        for col, (a, b, *rest) in enumerate(faces.tolist()):
            if col in skip:
                continue
            c = (1 << a) ^ (1 << b)
            if rest:
                c ^= 1 << rest[0]
            while c:
                low = c.bit_length() - 1
                other = reduced.get(low)
                if other is None:
                    reduced[low] = c
                    low_of[low] = col
                    created.add(low)
                    break
                c ^= other
        pivots[dim] = low_of

    pairs = []
    for dim in range(top + 1):
        pos = f.indices(dim)
        killed = pivots.get(dim + 1, {})
        killers = set(pivots.get(dim, {}).values())
        up = f.indices(dim + 1)
        for r in range(pos.size):
            if r in killers:
                continue
            if r in killed:
                pairs.append((int(pos[r]), int(up[killed[r]])))
            else:
                pairs.append((int(pos[r]), UNPAIRED))
    return pairs


class Diagrams(NamedTuple):
    h0: PersistenceDiagram
    h1: PersistenceDiagram


def persistence_diagrams(points, max_dim: int = 2, r_max: float = np.inf) -> Diagrams:
    """Reduced-H0 and H1 diagrams of the Rips filtration.

    Classes that never die are dropped (the essential component of H0, and any
    H1 cycle still open at ``r_max``), as are zero-persistence pairs. With
    ``max_dim=1`` no triangles exist, so the H1 diagram is left empty.
    """
    f = vr_filtration(points, max_dim, r_max)
    h0, h1 = [], []
    open_cycles = 0
    for b, d in reduce_and_pair(f):
        dim = int(f.dims[b])
        if dim > 1:
            continue
        if d == UNPAIRED:
            if dim == 1 and max_dim >= 2:
                open_cycles += 1
            continue
        birth, death = float(f.values[b]), float(f.values[d])
        if death > birth:
            (h0 if dim == 0 else h1).append((birth, death))
    if open_cycles:
        log.warning("dropped %d H1 classes still alive at r_max=%g", open_cycles, r_max)
    return Diagrams(
        PersistenceDiagram(np.array(h0).reshape(-1, 2), 0),
        PersistenceDiagram(np.array(h1).reshape(-1, 2), 1),
    )


def read_point_cloud(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header not in (["x", "y"], ["x", "y", "z"]):
            raise ValueError(f"expected header 'x,y' or 'x,y,z', got {','.join(header)!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        return np.empty((0, len(header)))
    if data.shape[1] != len(header):
        raise ValueError("row width does not match header")
    return data


def write_point_cloud(points, path) -> None:
    pts = np.asarray(points, dtype=float)
    cols = ["x", "y", "z"][: pts.shape[1]]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in pts:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
