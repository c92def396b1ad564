"""
Privacy boundary: Laplace noise and epsilon accounting
"""

from .noise import (
    EpsilonShares,
    NoiseParams,
    NoiseStream,
    noise_params,
    sample_laplace
)

from .anonymize import anonymize_table

from .ledger import (
    BudgetLedger,
    BudgetReport,
    expected_total,
    ledger_report,
    load_ledger
)

__all__ = [
    'EpsilonShares',
    'NoiseParams',
    'NoiseStream',
    'noise_params',
    'sample_laplace',
    'anonymize_table',
    'BudgetLedger',
    'BudgetReport',
    'expected_total',
    'ledger_report',
    'load_ledger'
]
