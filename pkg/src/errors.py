"""
Exception hierarchy for the symptom-trends pipeline

Input problems map to CLI exit code 1, broken invariants and failed
verifications map to exit code 2.
"""

from typing import Optional


class TrendsError(Exception):
    """Base class of every error raised by the pipeline"""

    exit_code = 1
    # Pipeline stage that raised, set by the run orchestration
    stage = None


class InputError(TrendsError):
    """Malformed or inconsistent input file"""

    exit_code = 1


class KeyspaceError(InputError):
    """A key or contribution falls outside the fixed keyspace"""


class InvariantError(TrendsError):
    """A pipeline invariant was violated"""

    exit_code = 2


class BudgetError(InvariantError):
    """The privacy budget ledger rejected a charge or does not balance"""


class VerificationError(InvariantError):
    """
    A sensitivity bound failed in the verification harness

    Args:
        message: Human readable description
        pair_key: Privacy unit whose removal broke the bound
        level: Geographic level at which the bound broke
    """

    def __init__(self, message: str, pair_key: Optional[str] = None, level: Optional[int] = None):
        super().__init__(message)
        self.pair_key = pair_key
        self.level = level
