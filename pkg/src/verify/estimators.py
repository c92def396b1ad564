#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Statistical checks of the noise mechanism

This module includes the following features:
- Histogram-ratio estimates of the epsilon of a single noised cell
- Kolmogorov-Smirnov and variance checks of the Laplace sampler
- Monte Carlo coverage of the ratio confidence intervals
- Closed-form per-cell worst cases composed across levels
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pendulum
import scipy.stats

from ..pipeline.aggregate import CountKey, NORMALIZATION, SYMPTOM
from ..pipeline.ingest import LEVELS
from ..privacy.noise import SENSITIVITY, EpsilonShares, NoiseStream, noise_params
from ..report.metrics import MetricRecord, filter_unreliable

# Logger configuration
logger = logging.getLogger("TrendsEstimators")

KS_ALPHA = 0.01
MIN_TRIALS = 100_000
MIN_KS_SAMPLES = 10_000
VARIANCE_TOLERANCE = 0.05
PROBE_DAY = pendulum.Date(2020, 1, 1)


@dataclass
class EpsilonEstimate:
    """Histogram-ratio estimate of the privacy loss between two raw cells"""
    mechanism: str
    raw1: float
    raw2: float
    scale_b: float
    trials: int
    edges: Tuple[float, ...]
    estimate: float
    bound_checked: float
    excluded_bins: List[int] = field(default_factory=list)

    def within(self, slack: float = 0.10) -> bool:
        """estimate <= |raw1 - raw2| / b, relaxed by a relative slack"""
        return self.estimate <= self.bound_checked * (1.0 + slack)


@dataclass
class KSResult:
    scale_b: float
    n: int
    statistic: float
    pvalue: float
    critical_value: float
    variance_ratio: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_value

    @property
    def variance_ok(self) -> bool:
        return abs(self.variance_ratio - 1.0) <= VARIANCE_TOLERANCE


@dataclass
class CoverageResult:
    """Monte Carlo behaviour of the reliability filter on one raw (a*, b*) cell"""
    a_star: float
    b_star: float
    level: int
    trials: int
    kept: int
    covered: int

    @property
    def kept_fraction(self) -> float:
        return self.kept / self.trials

    @property
    def drop_fraction(self) -> float:
        return 1.0 - self.kept_fraction

    @property
    def coverage(self) -> Optional[float]:
        """Fraction of kept samples whose interval contains a*/b*, None if nothing was kept"""
        return self.covered / self.kept if self.kept else None


def histogram_edges(raw1: float, raw2: float, scale_b: float, bins: int, span: float) -> np.ndarray:
    """
    Shared bin edges: a left tail up to min(raw) - span*b, bins-2 equal
    interior bins and a right tail from max(raw) + span*b.
    """
    if bins < 2:
        raise ValueError(f"At least two bins are needed, got {bins}")
    lo = min(raw1, raw2) - span * scale_b
    hi = max(raw1, raw2) + span * scale_b
    interior = np.linspace(lo, hi, bins - 1)
    return np.concatenate(([-np.inf], interior, [np.inf]))


def estimate_epsilon_single_cell(
    raw1: float,
    raw2: float,
    scale_b: float,
    trials: int = MIN_TRIALS,
    bins: int = 4,
    stream: Optional[NoiseStream] = None,
    span: float = 1.0,
    min_bin_fraction: float = 0.01,
    mechanism: str = "laplace"
) -> EpsilonEstimate:
    """
    Estimate max over bins of |ln(P1(bin) / P2(bin))| for noisy releases
    of two raw cells.

    Both cells are noised with the same block of draws (common random
    numbers), which keeps small privacy losses measurable. Each bin gets one
    pseudo-count; bins holding fewer than min_bin_fraction * trials samples
    in either histogram are excluded and listed in the result.

    Args:
        raw1: Raw value of the cell in the first dataset
        raw2: Raw value in the neighboring dataset
        scale_b: Laplace scale
        trials: Samples per dataset
        bins: Total bin count including both tails
        stream: Noise stream (master seed 0 if None)
        span: Distance of the tails from the raw values, in units of b
        min_bin_fraction: Minimum bin mass for a bin to count
        mechanism: Name recorded in the result

    Returns:
        EpsilonEstimate: The estimate and the closed-form bound |raw1 - raw2| / b

    Raises:
        ValueError: If trials is below 10^5 or scale_b is not positive
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"Use at least {MIN_TRIALS} trials, got {trials}")
    stream = stream or NoiseStream(0)

    noise = stream.laplace_block(f"estimate/{mechanism}/{scale_b!r}", trials, scale_b)
    edges = histogram_edges(raw1, raw2, scale_b, bins, span)
    counts1, _ = np.histogram(raw1 + noise, bins=edges)
    counts2, _ = np.histogram(raw2 + noise, bins=edges)

    minimum = min_bin_fraction * trials
    excluded = [i for i in range(len(counts1)) if counts1[i] < minimum or counts2[i] < minimum]
    ratios = [
        abs(math.log((counts1[i] + 1.0) / (counts2[i] + 1.0)))
        for i in range(len(counts1)) if i not in excluded
    ]
    if excluded:
        logger.debug(f"Excluded undersampled bins {excluded} (b={scale_b:.3f})")

    return EpsilonEstimate(
        mechanism=mechanism,
        raw1=raw1,
        raw2=raw2,
        scale_b=scale_b,
        trials=trials,
        edges=tuple(float(e) for e in edges),
        estimate=max(ratios, default=0.0),
        bound_checked=abs(raw1 - raw2) / scale_b,
        excluded_bins=excluded
    )


def ks_critical_value(n: int, alpha: float = KS_ALPHA) -> float:
    """Two-sided one-sample KS critical value"""
    return float(scipy.stats.kstwo.ppf(1.0 - alpha, n))


def sampler_ks_test(
    scale_b: float,
    n: int = MIN_TRIALS,
    stream: Optional[NoiseStream] = None,
    sampler: Optional[Callable[[int], np.ndarray]] = None
) -> KSResult:
    """
    KS test of sampler output against the Laplace(0, b) CDF.

    Args:
        scale_b: Laplace scale the sampler claims
        n: Number of draws
        stream: Noise stream for the default sampler
        sampler: Replacement sampler taking n and returning draws

    Returns:
        KSResult: Statistic, p-value, critical value at alpha = 0.01 and
        the ratio of the sample variance to 2b^2
    """
    if n < MIN_KS_SAMPLES:
        raise ValueError(f"Use at least {MIN_KS_SAMPLES} draws, got {n}")
    if sampler is None:
        stream = stream or NoiseStream(0)
        draws = stream.laplace_block(f"ks/{scale_b!r}", n, scale_b)
    else:
        draws = np.asarray(sampler(n), dtype=np.float64)

    statistic, pvalue = scipy.stats.kstest(draws, scipy.stats.laplace(loc=0.0, scale=scale_b).cdf)
    return KSResult(
        scale_b=scale_b,
        n=n,
        statistic=float(statistic),
        pvalue=float(pvalue),
        critical_value=ks_critical_value(n),
        variance_ratio=float(np.var(draws, ddof=1) / (2.0 * scale_b ** 2))
    )


def filter_coverage(
    a_star: float,
    b_star: float,
    level: int = 2,
    trials: int = 10_000,
    stream: Optional[NoiseStream] = None,
    shares: Optional[EpsilonShares] = None
) -> CoverageResult:
    """
    Re-noise a fixed raw (a*, b*) pair and run the reliability filter on
    every sample.

    Returns:
        CoverageResult: How often the metric is kept and how often a kept
        interval contains a*/b*
    """
    stream = stream or NoiseStream(0)
    b_A = noise_params(level, SYMPTOM, shares).scale_b
    b_B = noise_params(level, NORMALIZATION, shares).scale_b
    noise_A = stream.laplace_block(f"coverage/{level}/{a_star!r}/{b_star!r}/symptom", trials, b_A)
    noise_B = stream.laplace_block(f"coverage/{level}/{a_star!r}/{b_star!r}/normalization", trials, b_B)

    true_ratio = a_star / b_star
    key = CountKey(PROBE_DAY, "probe", "probe")
    kept = covered = 0
    for A, B in zip(a_star + noise_A, b_star + noise_B):
        record = filter_unreliable(MetricRecord(key, level, "daily", float(A), float(B)), b_A, b_B)
        if record.kept:
            kept += 1
            l, r = record.ci
            if l <= true_ratio <= r:
                covered += 1
    return CoverageResult(a_star, b_star, level, trials, kept, covered)


def analytic_composition(
    shares: Optional[EpsilonShares] = None,
    levels: Iterable[int] = LEVELS
) -> Dict[str, object]:
    """
    Closed-form worst case of each released table group.

    A user-day moves at most SENSITIVITY[kind] in L1 per level, so a table
    noised at scale b costs sensitivity / b. Normalization tables are
    released daily and weekly; symptom series at one granularity each.

    Returns:
        Dict: Per-level rows and the symptom, normalization and total sums
    """
    rows = []
    for level in levels:
        symptom = noise_params(level, SYMPTOM, shares)
        normalization = noise_params(level, NORMALIZATION, shares)
        rows.append({
            "level": level,
            "symptom_b": symptom.scale_b,
            "symptom_epsilon": SENSITIVITY[SYMPTOM] / symptom.scale_b,
            "normalization_b": normalization.scale_b,
            "normalization_epsilon": 2.0 * SENSITIVITY[NORMALIZATION] / normalization.scale_b
        })
    symptom_total = math.fsum(row["symptom_epsilon"] for row in rows)
    normalization_total = math.fsum(row["normalization_epsilon"] for row in rows)
    total = symptom_total + normalization_total
    return {
        "levels": rows,
        "symptom_total": symptom_total,
        "normalization_total": normalization_total,
        "total": total,
        "symptom_share": symptom_total / total if total > 0 else 0.0
    }
