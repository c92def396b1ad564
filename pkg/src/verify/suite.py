"""
Verification suite combining the sensitivity, sampler and epsilon checks
into one report
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from tqdm import tqdm

from ..errors import InputError, VerificationError
from ..pipeline.aggregate import NORMALIZATION, SYMPTOM
from ..pipeline.bounding import FIRST_IN_LOG_ORDER
from ..pipeline.ingest import LEVELS, RegionHierarchy, SearchEvent
from ..privacy.ledger import BudgetLedger, expected_total
from ..privacy.noise import SENSITIVITY, EpsilonShares, NoiseStream, all_noise_params
from .estimators import analytic_composition, estimate_epsilon_single_cell, sampler_ks_test
from .sensitivity import BOUNDS, check_log

# Logger configuration
logger = logging.getLogger("TrendsVerify")

EPSILON_SLACK = 0.10
ESTIMATE_TRIALS = {SYMPTOM: 100_000, NORMALIZATION: 4_000_000}
ESTIMATE_BINS = 4


@dataclass
class CheckResult:
    category: str
    name: str
    passed: bool
    details: str = ""


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    def record(self, category: str, name: str, passed: bool, details: str = "") -> None:
        self.checks.append(CheckResult(category, name, passed, details))
        logger.log(logging.INFO if passed else logging.ERROR, f"[{category}] {name}: {'PASS' if passed else 'FAIL'} {details}")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


@dataclass(frozen=True)
class LogUnderTest:
    """A small log checked exhaustively, with the hierarchy and symptoms it was classified with"""
    name: str
    hierarchy: RegionHierarchy
    symptoms: Sequence[str]
    events: Sequence[SearchEvent]


def _check_sensitivity(report: VerificationReport, log: LogUnderTest, bound_fn: Optional[Callable] = None) -> None:
    name = log.name
    try:
        results = check_log(log.events, log.hierarchy, log.symptoms, FIRST_IN_LOG_ORDER, bound_fn)
    except VerificationError as e:
        report.record("sensitivity", name, False, str(e))
        return
    except InputError as e:
        report.record("sensitivity", name, True, f"skipped: {e}")
        return

    for level in LEVELS:
        symptom = max((r.worst(SYMPTOM, level) for r in results), default=0.0)
        normalization = max((r.worst(NORMALIZATION, level) for r in results), default=0.0)
        report.record(
            "sensitivity",
            f"{name} level {level}",
            symptom <= BOUNDS[SYMPTOM] and normalization <= BOUNDS[NORMALIZATION],
            f"symptom L1 {symptom:g} (<= {BOUNDS[SYMPTOM]:g}), normalization L1 {normalization:g} "
            f"(<= {BOUNDS[NORMALIZATION]:g}) over {len(results)} pairs"
        )


def run_suite(
    logs: Sequence[LogUnderTest],
    shares: Optional[EpsilonShares] = None,
    master_seed: int = 0,
    levels: Sequence[int] = LEVELS,
    bound_fn: Optional[Callable] = None,
    show_progress: bool = False
) -> VerificationReport:
    """
    Run every verification and collect the outcomes.

    Args:
        logs: Logs checked exhaustively; a log with more than 50 user-days
            is reported as skipped
        shares: Epsilon shares (published constants if None)
        master_seed: Seed of the Monte Carlo noise blocks
        levels: Levels whose noise tables are checked
        bound_fn: Replacement bounding function (negative controls)
        show_progress: Show a progress bar over the Monte Carlo checks

    Returns:
        VerificationReport: One entry per check
    """
    shares = shares or EpsilonShares()
    stream = NoiseStream(master_seed)
    report = VerificationReport()

    for log in logs:
        _check_sensitivity(report, log, bound_fn)

    params = all_noise_params(shares, levels)
    iterator = tqdm(params, desc="Noise checks") if show_progress else params
    for p in iterator:
        ks = sampler_ks_test(p.scale_b, stream=stream)
        report.record(
            "sampler",
            f"{p.kind} level {p.level} b={p.scale_b:.3f}",
            ks.passed and ks.variance_ok,
            f"KS {ks.statistic:.5f} (< {ks.critical_value:.5f}), variance/2b^2 {ks.variance_ratio:.4f}"
        )

        estimate = estimate_epsilon_single_cell(
            0.0, SENSITIVITY[p.kind], p.scale_b,
            trials=ESTIMATE_TRIALS[p.kind], bins=ESTIMATE_BINS, stream=stream, mechanism=p.kind
        )
        relative = abs(estimate.estimate - estimate.bound_checked) / estimate.bound_checked
        report.record(
            "epsilon",
            f"{p.kind} level {p.level}",
            relative <= EPSILON_SLACK and estimate.within(EPSILON_SLACK),
            f"estimate {estimate.estimate:.5f} vs share {p.epsilon_share:g} over {estimate.trials} trials"
        )

    composition = analytic_composition(shares, levels)
    planned = BudgetLedger.planned(shares, levels)
    expected = expected_total(shares, levels)
    report.record(
        "budget",
        "analytic composition",
        abs(composition["total"] - expected) <= 1e-9,
        f"symptom {composition['symptom_total']:.6g}, normalization {composition['normalization_total']:.6g}, "
        f"total {composition['total']:.6g}"
    )
    report.record("budget", "planned ledger", abs(planned.total - expected) <= 1e-9, f"total {planned.total:.12g}")
    return report


def format_report(report: VerificationReport) -> str:
    """Fixed-width table of a report"""
    width = max((len(check.name) for check in report.checks), default=4)
    lines = [f"{'category':<12} {'check':<{width}} result  details", "-" * (width + 40)]
    for check in report.checks:
        lines.append(f"{check.category:<12} {check.name:<{width}} {'PASS' if check.passed else 'FAIL':<7} {check.details}")
    lines.append("")
    lines.append(f"{len(report.checks) - len(report.failures())}/{len(report.checks)} checks passed")
    return "\n".join(lines)
