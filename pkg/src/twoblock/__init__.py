"""Sparse twoblock partial least squares.

Simultaneous sparse dimension reduction of a predictor block and a
response block with intrinsic variable selection, plus dense variants,
classical NIPALS baselines, JSON model persistence, cross-validated
hyperparameter search, and a Monte-Carlo simulation harness.
"""

from .cross_validation import (
    CvConfig,
    CvPoint,
    CvReport,
    build_estimator,
    grid_search,
    make_folds,
)
from .exceptions import (
    AllPointsInfeasible,
    ColumnMismatch,
    ComponentCountTooLarge,
    ConstantColumn,
    CorruptArchive,
    DegenerateResidualWarning,
    DimensionMismatch,
    IoFailure,
    NoConvergence,
    NonFiniteInput,
    SchemaMismatch,
    SingularGram,
    TooFewRows,
    TwoblockError,
    ZeroMatrix,
    ZeroVector,
)
from .linalg import AUTOSCALE, CENTER, CenteringInfo, center_scale, dominant_singular_pair
from .model_io import load_model, save_model
from .nipals import NipalsPLS, Pls1Set
from .simulation import (
    SimScenario,
    SimTruth,
    compute_metrics,
    generate_dataset,
    plot_frames,
    run_batch,
)
from .sparse import (
    SelectionReport,
    SparseTwoblockPLS,
    compute_coefficients,
    predictor_reduction,
    response_reduction,
    selection_report,
    soft_threshold_vector,
)

__version__ = "0.1.0"

__all__ = [
    "AUTOSCALE",
    "AllPointsInfeasible",
    "CENTER",
    "CenteringInfo",
    "ColumnMismatch",
    "ComponentCountTooLarge",
    "ConstantColumn",
    "CorruptArchive",
    "CvConfig",
    "CvPoint",
    "CvReport",
    "DegenerateResidualWarning",
    "DimensionMismatch",
    "IoFailure",
    "NipalsPLS",
    "NoConvergence",
    "NonFiniteInput",
    "Pls1Set",
    "SchemaMismatch",
    "SelectionReport",
    "SimScenario",
    "SimTruth",
    "SingularGram",
    "SparseTwoblockPLS",
    "TooFewRows",
    "TwoblockError",
    "ZeroMatrix",
    "ZeroVector",
    "build_estimator",
    "center_scale",
    "compute_coefficients",
    "compute_metrics",
    "dominant_singular_pair",
    "generate_dataset",
    "grid_search",
    "load_model",
    "make_folds",
    "plot_frames",
    "predictor_reduction",
    "response_reduction",
    "run_batch",
    "save_model",
    "selection_report",
    "soft_threshold_vector",
    "__version__",
]
