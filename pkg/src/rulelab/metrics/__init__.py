"""Quantitative measures: accuracies, correlation, grading, trajectories."""

from .core import (
    EmptyWindowError,
    WINDOWS,
    ZeroVarianceError,
    accuracy,
    chance_baseline,
    cross_entropy,
    cross_entropy_series,
    last_quarter_count,
    pearson_r,
    r_squared,
)
from .grading import (
    MatchReport,
    RuleVerdict,
    SetReport,
    consistency,
    match_rate,
    rule_likelihood,
    rule_likelihood_counts,
)
from .reports import (
    AccuracySummary,
    RULE_CLASSES,
    hash_inputs,
    summarize_series,
    write_delta_csv,
    write_summary_csv,
    write_trajectory_csv,
)
from .series import LabelSeries, ObjectRecord, load_series, save_series
from .trajectory import (
    CohortReport,
    DEFAULT_PERCENTILES,
    RuleComparison,
    TrajectoryReport,
    cohort_report,
    quantile,
    set_trajectory,
    subsample_baseline,
)

__all__ = [
    "AccuracySummary",
    "CohortReport",
    "DEFAULT_PERCENTILES",
    "EmptyWindowError",
    "LabelSeries",
    "MatchReport",
    "ObjectRecord",
    "RULE_CLASSES",
    "RuleComparison",
    "RuleVerdict",
    "SetReport",
    "TrajectoryReport",
    "WINDOWS",
    "ZeroVarianceError",
    "accuracy",
    "chance_baseline",
    "cohort_report",
    "consistency",
    "cross_entropy",
    "cross_entropy_series",
    "hash_inputs",
    "last_quarter_count",
    "load_series",
    "match_rate",
    "pearson_r",
    "quantile",
    "r_squared",
    "rule_likelihood",
    "rule_likelihood_counts",
    "save_series",
    "set_trajectory",
    "subsample_baseline",
    "summarize_series",
    "write_delta_csv",
    "write_summary_csv",
    "write_trajectory_csv",
]
