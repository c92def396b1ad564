"""
Per-region scaling factors

c maps the largest kept ratio of a region inside the calibration window to
100. Factors are stored after the first release and reused afterwards, so
later data may exceed 100.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import pendulum

from ..utils import file_utils
from ..utils.date_utils import parse_day
from .metrics import UNCALIBRATED_REGION, MetricRecord, compute_metric

# Logger configuration
logger = logging.getLogger("TrendsScaling")

SCALE_CEILING = 100.0


@dataclass(frozen=True)
class ScalingFactor:
    """Scaling factor of one region"""
    region: str
    c: float
    calibration_start: pendulum.Date
    calibration_end: pendulum.Date


def calibrate_scaling(
    region: str,
    metrics: Iterable[MetricRecord],
    calibration_start: pendulum.Date,
    calibration_end: pendulum.Date
) -> Optional[ScalingFactor]:
    """
    c = 100 / M with M the largest A / B among the region's kept metrics
    whose period overlaps the calibration window. A partial week at either
    edge of the window counts.

    Args:
        region: Region to calibrate
        metrics: Metrics of the region (all symptoms, assigned granularities)
        calibration_start: First day of the window
        calibration_end: Last day of the window

    Returns:
        Optional[ScalingFactor]: None if no kept metric falls in the window
    """
    ratios = [
        m.ratio for m in metrics
        if m.key.region == region and m.kept and m.overlaps(calibration_start, calibration_end)
    ]
    if not ratios:
        logger.warning(f"Region {region} has no kept metric in the calibration window; its rows are dropped")
        return None
    return ScalingFactor(region, SCALE_CEILING / max(ratios), calibration_start, calibration_end)


def apply_scaling(metrics: Iterable[MetricRecord], factors: Dict[str, ScalingFactor]) -> List[MetricRecord]:
    """
    Fill in published values of kept metrics.

    Kept metrics of a region without factor are dropped as uncalibrated.
    """
    scaled = []
    for metric in metrics:
        if not metric.kept:
            scaled.append(metric)
            continue
        factor = factors.get(metric.key.region)
        if factor is None:
            scaled.append(replace(metric, kept=False, reason=UNCALIBRATED_REGION))
            continue
        scaled.append(replace(metric, value=compute_metric(metric.A, metric.B, factor.c)))
    return scaled


def calibrate_all(
    regions: Iterable[str],
    metrics: List[MetricRecord],
    calibration_start: pendulum.Date,
    calibration_end: pendulum.Date,
    stored: Optional[Dict[str, ScalingFactor]] = None
) -> Dict[str, ScalingFactor]:
    """
    Factors of every region; stored factors from an earlier release win.
    """
    stored = stored or {}
    by_region: Dict[str, List[MetricRecord]] = {}
    for metric in metrics:
        by_region.setdefault(metric.key.region, []).append(metric)

    factors = {}
    for region in regions:
        if region in stored:
            factors[region] = stored[region]
            continue
        factor = calibrate_scaling(region, by_region.get(region, []), calibration_start, calibration_end)
        if factor is not None:
            factors[region] = factor
    return factors


def save_scaling(path: Union[str, Path], factors: Dict[str, ScalingFactor]) -> str:
    """Write the factors as JSON (region -> c and window)"""
    data = {
        region: {
            "c": factor.c,
            "calibration_start": factor.calibration_start.isoformat(),
            "calibration_end": factor.calibration_end.isoformat()
        }
        for region, factor in factors.items()
    }
    return file_utils.save_json(path, data)


def load_scaling(path: Union[str, Path]) -> Dict[str, ScalingFactor]:
    """Read factors written by save_scaling; empty if the file is absent"""
    data = file_utils.load_json(path) or {}
    return {
        region: ScalingFactor(
            region,
            float(item["c"]),
            parse_day(item["calibration_start"]),
            parse_day(item["calibration_end"])
        )
        for region, item in data.items()
    }
