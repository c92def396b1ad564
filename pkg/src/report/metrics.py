#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module computing published metrics and removing unreliable ones

Main features:
- The scaled ratio metric c * max(A / B, 0)
- Confidence intervals for the ratio of two Laplace-noised counts
- The 25% relative-radius reliability filter with drop diagnostics
- Drop fractions over a sample period

Everything here works on noisy counts only and draws no noise.
"""

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Tuple

import pendulum

from ..pipeline.aggregate import WEEKLY, CountKey

# Coverage of each per-count interval; two independent intervals give p^2 = 0.5
CI_COVERAGE = math.sqrt(0.5)
RELATIVE_RADIUS = 0.25

NONPOSITIVE_NORMALIZATION = "nonpositive_normalization"
NONPOSITIVE_RATIO = "nonpositive_ratio"
CI_UNBOUNDED = "ci_unbounded"
CI_TOO_WIDE = "ci_too_wide"
UNCALIBRATED_REGION = "uncalibrated_region"

DROP_REASONS = (NONPOSITIVE_NORMALIZATION, NONPOSITIVE_RATIO, CI_UNBOUNDED, CI_TOO_WIDE, UNCALIBRATED_REGION)


@dataclass(frozen=True)
class MetricRecord:
    """One candidate published value and its filter diagnostics"""
    key: CountKey
    level: int
    granularity: str
    A: float
    B: float
    value: float = 0.0
    kept: bool = False
    ci: Optional[Tuple[float, float]] = None
    reason: Optional[str] = None
    failed_bounds: Tuple[str, ...] = ()

    @property
    def ratio(self) -> float:
        """A / B, only meaningful when B > 0"""
        return self.A / self.B

    @property
    def period(self) -> pendulum.Date:
        return self.key.period

    @property
    def period_end(self) -> pendulum.Date:
        """Last day the metric covers"""
        return self.period.add(days=6) if self.granularity == WEEKLY else self.period

    def overlaps(self, start: pendulum.Date, end: pendulum.Date) -> bool:
        return self.period <= end and self.period_end >= start


def compute_metric(A: float, B: float, c: float) -> Optional[float]:
    """
    c * max(A / B, 0).

    Args:
        A: Noisy symptom count
        B: Noisy normalization count of the same period and region
        c: Region scaling factor

    Returns:
        Optional[float]: The metric, or None when B <= 0 (the record is
        dropped as non-positive normalization; no ratio is formed)

    Raises:
        ValueError: If c is not positive
    """
    if not c > 0:
        raise ValueError(f"Scaling factor must be positive, got {c}")
    if B <= 0:
        return None
    return c * max(A / B, 0.0)


def quantile_halfwidth(scale_b: float, coverage: float = CI_COVERAGE) -> float:
    """Half-width t with P(|Laplace(0, b)| <= t) = coverage"""
    if scale_b < 0:
        raise ValueError(f"Laplace scale must be non-negative, got {scale_b}")
    return -scale_b * math.log(1.0 - coverage)


def confidence_interval(A: float, B: float, b_A: float, b_B: float) -> Tuple[float, float]:
    """
    Interval [l, r] containing a*/b* with probability at least 0.5.

    Each noisy count gets a two-sided Laplace interval of coverage sqrt(0.5);
    the ratio interval follows by interval arithmetic:
    l = max(A - t_A, 0) / (B + t_B), r = (A + t_A) / (B - t_B).

    Args:
        A: Noisy symptom count
        B: Noisy normalization count
        b_A: Laplace scale of A
        b_B: Laplace scale of B

    Returns:
        Tuple[float, float]: (l, r); r is +inf when B - t_B <= 0
    """
    t_A = quantile_halfwidth(b_A)
    t_B = quantile_halfwidth(b_B)

    upper_denominator = B - t_B
    lower_denominator = B + t_B
    r = (A + t_A) / upper_denominator if upper_denominator > 0 else math.inf
    l = max(A - t_A, 0.0) / lower_denominator if lower_denominator > 0 else 0.0
    return (l, r)


def filter_unreliable(record: MetricRecord, b_A: float, b_B: float) -> MetricRecord:
    """
    Keep a metric only if both CI endpoints lie within 25% of A / B.

    Args:
        record: Record with A and B set
        b_A: Laplace scale of the symptom table
        b_B: Laplace scale of the normalization table

    Returns:
        MetricRecord: Copy with kept, ci, reason and failed_bounds filled
    """
    if record.B <= 0:
        return replace(record, kept=False, ci=None, reason=NONPOSITIVE_NORMALIZATION, failed_bounds=())

    ratio = record.A / record.B
    if ratio <= 0:
        return replace(record, kept=False, ci=None, reason=NONPOSITIVE_RATIO, failed_bounds=())

    l, r = confidence_interval(record.A, record.B, b_A, b_B)
    if math.isinf(r):
        return replace(record, kept=False, ci=(l, r), reason=CI_UNBOUNDED, failed_bounds=("upper",))

    failed = []
    if abs(ratio - l) > RELATIVE_RADIUS * ratio:
        failed.append("lower")
    if abs(ratio - r) > RELATIVE_RADIUS * ratio:
        failed.append("upper")
    if failed:
        return replace(record, kept=False, ci=(l, r), reason=CI_TOO_WIDE, failed_bounds=tuple(failed))
    return replace(record, kept=True, ci=(l, r), reason=None, failed_bounds=())


def drop_fraction(records: Iterable[MetricRecord], start: pendulum.Date, end: pendulum.Date) -> float:
    """
    Fraction of records with period in [start, end] that were dropped.

    Returns 1.0 when no record falls in the window, so an empty sample never
    counts as reliable.
    """
    in_window = [record for record in records if start <= record.period <= end]
    if not in_window:
        return 1.0
    return sum(1 for record in in_window if not record.kept) / len(in_window)
