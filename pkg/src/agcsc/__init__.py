"""Adaptive graph-convolutional subspace clustering toolkit.

Solves the self-expressive model with an adaptively updated graph
convolutional operator by ADMM, builds affinity matrices (optionally
thresholded), clusters them with normalized-cuts spectral clustering,
and evaluates ACC/NMI. The :mod:`agcsc.experiment` module and the
``agcsc`` command drive parameter-grid experiments end to end.
"""

from .data import (
    DataMatrix,
    SyntheticSpec,
    generate_union_of_subspaces,
    load_dense_matrix,
    load_labels,
    normalize_pixel_range,
    save_dense_matrix,
)
from .graph import (
    affinity_from_coefficients,
    aggregate_features,
    gco_from_coefficients,
    off_block_energy_fraction,
    threshold_m_largest,
)
from .metrics import accuracy, contingency_table, nmi, optimal_label_map
from .solver import (
    FactorizationError,
    SolverConfig,
    SolverResult,
    SolverState,
    augmented_lagrangian,
    initialize,
    project_Z,
    residuals,
    solve,
    update_C,
    update_F,
    update_Z,
    update_multipliers,
)
from .spectral import SpectralEmbedding, cluster_affinity, kmeans, ncuts_embedding

__version__ = "0.1.0"

__all__ = [
    "DataMatrix",
    "SyntheticSpec",
    "generate_union_of_subspaces",
    "load_dense_matrix",
    "load_labels",
    "normalize_pixel_range",
    "save_dense_matrix",
    "affinity_from_coefficients",
    "aggregate_features",
    "gco_from_coefficients",
    "off_block_energy_fraction",
    "threshold_m_largest",
    "accuracy",
    "contingency_table",
    "nmi",
    "optimal_label_map",
    "FactorizationError",
    "SolverConfig",
    "SolverResult",
    "SolverState",
    "augmented_lagrangian",
    "initialize",
    "project_Z",
    "residuals",
    "solve",
    "update_C",
    "update_F",
    "update_Z",
    "update_multipliers",
    "SpectralEmbedding",
    "cluster_affinity",
    "kmeans",
    "ncuts_embedding",
]
