"""
Verification harness: exhaustive sensitivity checks on small logs,
sampler tests and empirical epsilon estimates
"""

from .sensitivity import (
    NeighborPair,
    SensitivityResult,
    enumerate_neighbors,
    sensitivity_check,
    check_log,
    random_tiny_log,
    unbounded_user_day
)

from .estimators import (
    EpsilonEstimate,
    KSResult,
    CoverageResult,
    estimate_epsilon_single_cell,
    sampler_ks_test,
    filter_coverage,
    analytic_composition
)

from .suite import LogUnderTest, VerificationReport, run_suite, format_report

__all__ = [
    'NeighborPair',
    'SensitivityResult',
    'enumerate_neighbors',
    'sensitivity_check',
    'check_log',
    'random_tiny_log',
    'unbounded_user_day',
    'EpsilonEstimate',
    'KSResult',
    'CoverageResult',
    'estimate_epsilon_single_cell',
    'sampler_ks_test',
    'filter_coverage',
    'analytic_composition',
    'LogUnderTest',
    'VerificationReport',
    'run_suite',
    'format_report'
]
