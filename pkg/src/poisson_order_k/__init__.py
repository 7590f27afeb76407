"""Scaled pmf, finite differences and decrease thresholds of the Poisson distribution of order k."""

from .differences import (
    DifferenceTable,
    MonotonicityReport,
    absolute_monotonicity_report,
    difference,
    difference_closed_form,
    difference_table,
    increasing_on_first_block,
)
from .pmf import (
    NormalizationError,
    OracleTooLarge,
    Params,
    ScaledPmfTable,
    normalization_check,
    pmf_bruteforce,
    pmf_k2_closed,
    pmf_km_sum,
    pmf_recurrence_table,
)
from .roots import (
    MaxIterations,
    NoSignChange,
    RootFindingError,
    ThresholdSet,
    solve_lambda_k1k2,
    solve_pk_level,
    solve_monotone_root,
    threshold_set,
    verify_uniqueness,
)
from .structure import StructureReport, block_difference_kp1_2k, block_second_difference, structure_report
from .sweep_fit import FitResult, threshold_bracket_scan, sufficient_bound_scan, fit_inverse_root, select_ks, sweep

__version__ = "0.1.0"
