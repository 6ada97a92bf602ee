"""Supervised dimensionality reduction by greedy feature aggregation.

Inputs are scanned in column order and merged into clusters whose mean (or
another aggregation) replaces them, as long as the merge costs little
predictive power relative to the variance it saves.

Main entry points:

- :func:`nonlin_partition` merges while the drop in training R2 stays below
  ``epsilon`` (regression).
- :func:`genlin_partition` merges by a deviance bound for Gaussian or
  Bernoulli targets.
- :func:`lincfa_partition` and :func:`forward_selection` are reference methods.
- :mod:`featagg.synthgen` builds seeded benchmarks and :mod:`featagg.theory`
  checks the bias/variance results numerically.
"""

from .baselines import forward_selection, lincfa_partition
from .core import (
    IDENTITY,
    MEAN,
    SQUARE,
    SUM_OF_SQUARES,
    AggregationSpec,
    CenteringStats,
    Dataset,
    ExponentialFamily,
    Form,
    GenerativeSpec,
    Partition,
    ReductionConfig,
    Task,
    TransformSpec,
    get_aggregation,
    get_transform,
    register_aggregation,
    register_transform,
)
from .errors import (
    ConfigError,
    DegenerateTarget,
    FeatAggError,
    InsufficientSamples,
    InvalidData,
    InvalidMoments,
    ParseError,
    SingularDesign,
)
from .estimators import (
    FitResult,
    accuracy,
    center_columns,
    logistic_fit,
    ols_fit,
    r2_score,
    sample_covariance,
    sample_variance,
    scaled_deviance_gap,
)
from .genlincfa import genlin_partition, genlin_threshold, make_bernoulli_family, make_gaussian_family
from .harness import ExperimentConfig, ExperimentReport, load_csv, run_experiment
from .nonlincfa import nonlin_partition, nonlin_threshold
from .synthgen import gen_linear, gen_quadratic, make_spec, to_classification

__version__ = "0.1.0"

__all__ = [
    "AggregationSpec",
    "CenteringStats",
    "ConfigError",
    "Dataset",
    "DegenerateTarget",
    "ExperimentConfig",
    "ExperimentReport",
    "ExponentialFamily",
    "FeatAggError",
    "FitResult",
    "Form",
    "GenerativeSpec",
    "IDENTITY",
    "InsufficientSamples",
    "InvalidData",
    "InvalidMoments",
    "MEAN",
    "ParseError",
    "Partition",
    "ReductionConfig",
    "SQUARE",
    "SUM_OF_SQUARES",
    "SingularDesign",
    "Task",
    "TransformSpec",
    "accuracy",
    "center_columns",
    "forward_selection",
    "gen_linear",
    "gen_quadratic",
    "genlin_partition",
    "genlin_threshold",
    "get_aggregation",
    "get_transform",
    "lincfa_partition",
    "load_csv",
    "logistic_fit",
    "make_bernoulli_family",
    "make_gaussian_family",
    "make_spec",
    "nonlin_partition",
    "nonlin_threshold",
    "ols_fit",
    "r2_score",
    "register_aggregation",
    "register_transform",
    "run_experiment",
    "sample_covariance",
    "sample_variance",
    "scaled_deviance_gap",
    "to_classification",
]
