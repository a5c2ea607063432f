"""Label-flip robustness bounds for linear classifiers."""

from ._flipbound import (
    BlockResult,
    BoundsReport,
    Dataset,
    ExactResult,
    Graph,
    InputError,
    LinearClassifier,
    LowerBoundReport,
    NumericalError,
    SanitizeResult,
    TargetUnreachable,
    TrainResult,
    UpperBoundReport,
    bounds,
    brute_force_robustness,
    derive_seed,
    exact_robustness,
    load_csv,
    lower_bound,
    min_vertex_cover,
    objective,
    reduce,
    sanitize,
    save_csv,
    synthetic_separable,
    train,
    upper_bound,
    verify_certificate,
)

__version__ = "0.1.0"
