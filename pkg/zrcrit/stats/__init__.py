"""Statistics of sample batches and tests against the predicted limit laws."""

from .batch import SampleBatch, SampleBatchBuilder, exact_batch, merge_batches, rejection_batch, top_two
from .bulk import BulkPaths, DriftSummary, PathMode, bridge_covariance, bulk_paths, drift_variance, path_covariance
from .max_laws import (
    KsResult,
    LimitLaw,
    NormalizedMaxima,
    control_law_test,
    control_maxima,
    discrete_ks_test,
    limit_law_for,
    max_law_tests,
    normalize_maximum,
    randomized_pit,
)
from .observables import (
    Equivalence,
    ExcessFraction,
    PhaseMixture,
    SecondMaxSummary,
    chi_square_test,
    classify_condensed,
    condensate_threshold,
    empirical_pmf,
    equivalence_test,
    excess_fraction,
    phase_mixture_test,
    second_max_summary,
    tv_distance,
)

__all__ = [
    "BulkPaths",
    "DriftSummary",
    "Equivalence",
    "ExcessFraction",
    "KsResult",
    "LimitLaw",
    "NormalizedMaxima",
    "PathMode",
    "PhaseMixture",
    "SampleBatch",
    "SampleBatchBuilder",
    "SecondMaxSummary",
    "bridge_covariance",
    "bulk_paths",
    "chi_square_test",
    "classify_condensed",
    "condensate_threshold",
    "control_law_test",
    "control_maxima",
    "discrete_ks_test",
    "drift_variance",
    "empirical_pmf",
    "equivalence_test",
    "exact_batch",
    "excess_fraction",
    "limit_law_for",
    "max_law_tests",
    "merge_batches",
    "normalize_maximum",
    "path_covariance",
    "phase_mixture_test",
    "randomized_pit",
    "rejection_batch",
    "second_max_summary",
    "top_two",
    "tv_distance",
]
