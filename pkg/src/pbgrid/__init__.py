"""Persistence B-spline grids: fixed-length vectors for persistence diagrams.

A diagram is mapped to birth-persistence coordinates, weighted by eminence,
and fitted with a clamped uniform cubic B-spline surface by least-squares
progressive iteration. The flattened control grid is the feature vector.
"""

from .bspline import (
    PBGrid,
    PersistenceVector,
    basis_matrix,
    eval_surface,
    from_vector,
    reconstruct_surface,
    to_vector,
)
from .diagram import (
    DiagramParseError,
    PersistenceDiagram,
    PerturbationSpec,
    parse_diagram,
    perturb_diagram,
    read_diagram,
    serialize_diagram,
    write_diagram,
)
from .homology import persistence_diagrams
from .lspia import LspiaConfig, lspia_fit, min_norm_lsq_oracle, vectorize, vectorize_many
from .metrics import bottleneck, distance_matrix, wasserstein
from .transform import EminenceConfig, choose_m, prepare_fit_data

__version__ = "0.1.0"

__all__ = [
    "PBGrid",
    "PersistenceVector",
    "basis_matrix",
    "eval_surface",
    "from_vector",
    "reconstruct_surface",
    "to_vector",
    "DiagramParseError",
    "PersistenceDiagram",
    "PerturbationSpec",
    "parse_diagram",
    "perturb_diagram",
    "read_diagram",
    "serialize_diagram",
    "write_diagram",
    "persistence_diagrams",
    "LspiaConfig",
    "lspia_fit",
    "min_norm_lsq_oracle",
    "vectorize",
    "vectorize_many",
    "bottleneck",
    "distance_matrix",
    "wasserstein",
    "EminenceConfig",
    "choose_m",
    "prepare_fit_data",
]
