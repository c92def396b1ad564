"""
Writing the published dataset, the drop diagnostics and the plan
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Union

from ..pipeline.ingest import RegionHierarchy
from ..utils import file_utils
from .granularity import PLAN_HEADER, GranularityPlan, plan_rows
from .metrics import MetricRecord

# Logger configuration
logger = logging.getLogger("TrendsPublish")

DATA_HEADER = ("period_start", "granularity", "level", "region_id", "symptom", "value")
DIAGNOSTICS_HEADER = ("period_start", "level", "region_id", "symptom", "reason")

DATA_FILE = "data.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"
PLAN_FILE = "plan.csv"


def _sort_key(metric: MetricRecord):
    return (metric.key.region, metric.key.symptom or "", metric.period.isoformat())


def emit_dataset(
    plan: GranularityPlan,
    metrics: Iterable[MetricRecord],
    hierarchy: RegionHierarchy,
    output_dir: Union[str, Path]
) -> Dict[str, str]:
    """
    Write data.csv (kept metrics), diagnostics.csv (dropped metrics with
    reasons) and plan.csv.

    Rows are sorted by (region, symptom, period) and values printed with two
    decimals, so equal inputs always give equal bytes.

    Returns:
        Dict[str, str]: File name -> absolute path
    """
    output_dir = file_utils.ensure_directory(output_dir)
    ordered = sorted(metrics, key=_sort_key)

    kept: List[MetricRecord] = [m for m in ordered if m.kept]
    dropped: List[MetricRecord] = [m for m in ordered if not m.kept]

    paths = {
        DATA_FILE: file_utils.write_csv(
            output_dir / DATA_FILE,
            DATA_HEADER,
            (
                (m.period.isoformat(), m.granularity, m.level, m.key.region, m.key.symptom, f"{m.value:.2f}")
                for m in kept
            )
        ),
        DIAGNOSTICS_FILE: file_utils.write_csv(
            output_dir / DIAGNOSTICS_FILE,
            DIAGNOSTICS_HEADER,
            ((m.period.isoformat(), m.level, m.key.region, m.key.symptom, m.reason) for m in dropped)
        ),
        PLAN_FILE: file_utils.write_csv(output_dir / PLAN_FILE, PLAN_HEADER, plan_rows(plan, hierarchy))
    }
    logger.info(f"Published {len(kept)} metrics, dropped {len(dropped)}")
    return paths
