#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module deciding between daily and weekly publication per symptom and region

Main features:
- Ordering regions by anonymized search activity
- The sliding-window majority walk with a one-way daily -> weekly switch
- Plan assembly and plan CSV rows

The walk only reads noisy normalization counts and drop fractions of daily
metrics that are published anyway, so it spends no privacy budget.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pendulum
from pydantic import BaseModel, ConfigDict, model_validator

from ..pipeline.aggregate import DAILY, WEEKLY, CountTable
from ..pipeline.ingest import RegionHierarchy

# Logger configuration
logger = logging.getLogger("TrendsGranularity")

PLAN_HEADER = ("symptom", "region_id", "granularity")


class GranularityParams(BaseModel):
    """Sliding-window parameters of the granularity walk"""
    model_config = ConfigDict(frozen=True)

    window: int = 20
    switch_threshold: int = 11
    drop_fraction_threshold: float = 0.5

    @model_validator(mode='after')
    def check_ranges(self):
        if self.window < 1:
            raise ValueError(f'window must be positive, got {self.window}')
        if not 1 <= self.switch_threshold <= self.window:
            raise ValueError(f'switch_threshold must be in 1..{self.window}, got {self.switch_threshold}')
        if not 0.0 <= self.drop_fraction_threshold <= 1.0:
            raise ValueError(f'drop_fraction_threshold must be in [0, 1], got {self.drop_fraction_threshold}')
        return self


@dataclass
class GranularityWalk:
    """Outcome of one walk over an ordered region list"""
    symptom: str
    assignments: List[Tuple[str, str]] = field(default_factory=list)
    drop_fractions: Dict[str, float] = field(default_factory=dict)
    switched_at: Optional[int] = None

    def sequence(self) -> str:
        """Assignment sequence as a string of 'd' and 'w'"""
        return "".join("d" if g == DAILY else "w" for _, g in self.assignments)


@dataclass
class GranularityPlan:
    """(symptom, region) -> granularity for every released series"""
    assignment: Dict[Tuple[str, str], str] = field(default_factory=dict)
    walks: List[GranularityWalk] = field(default_factory=list)

    def granularity(self, symptom: str, region: str) -> str:
        return self.assignment[(symptom, region)]

    def add_walk(self, walk: GranularityWalk) -> None:
        self.walks.append(walk)
        for region, granularity in walk.assignments:
            self.assignment[(walk.symptom, region)] = granularity

    def add_daily(self, symptom: str, region: str) -> None:
        self.assignment[(symptom, region)] = DAILY


def order_regions_by_activity(
    level: int,
    level0_ancestor: str,
    hierarchy: RegionHierarchy,
    noisy_daily_normalization: CountTable,
    sample_start: pendulum.Date,
    sample_end: pendulum.Date
) -> List[str]:
    """
    Regions of one level under one country, by decreasing noisy activity.

    Activity is the sum of noisy daily normalization counts over the sample
    period; ties are broken by region id.

    Raises:
        ValueError: If level is 0 or the table is not a noisy daily
            normalization table of that level
    """
    if level not in (1, 2):
        raise ValueError(f"Only levels 1 and 2 are ordered, got {level}")
    table = noisy_daily_normalization
    if not table.noisy or table.granularity != DAILY or table.level != level:
        raise ValueError(f"Expected the noisy daily normalization table of level {level}, got {table.table_id}")

    regions = [r for r in hierarchy.regions_at(level) if hierarchy.level0_ancestor(r) == level0_ancestor]
    activity = {region: 0.0 for region in regions}
    for key, value in table.values.items():
        if key.region in activity and sample_start <= key.period <= sample_end:
            activity[key.region] += value
    return sorted(regions, key=lambda r: (-activity[r], r))


def should_switch(window_flags: Sequence[bool], params: GranularityParams) -> bool:
    """
    Majority vote over the last published regions.

    A full window switches at switch_threshold bad regions (11 of 20). A
    shorter window (fewer regions published so far) switches when more than
    half of it is bad.
    """
    size = len(window_flags)
    bad = sum(1 for flag in window_flags if flag)
    if size >= params.window:
        return bad >= params.switch_threshold
    return size > 0 and 2 * bad > size


def decide_granularity(
    symptom: str,
    ordered_regions: Sequence[str],
    daily_drop_fraction: Callable[[str], float],
    params: Optional[GranularityParams] = None
) -> GranularityWalk:
    """
    Walk the ordered regions, switching to weekly for good once the recent
    daily regions are mostly unreliable.

    Args:
        symptom: Symptom the walk is for
        ordered_regions: Regions by decreasing activity
        daily_drop_fraction: Returns the sample-period drop fraction of a
            region's daily metrics; called only for regions assigned daily,
            after they are assigned
        params: Window parameters

    Returns:
        GranularityWalk: Assignments in walk order (daily* weekly*)
    """
    params = params or GranularityParams()
    walk = GranularityWalk(symptom=symptom)
    bad_flags: List[bool] = []

    for index, region in enumerate(ordered_regions):
        if walk.switched_at is None and should_switch(bad_flags[-params.window:], params):
            walk.switched_at = index
            logger.debug(f"{symptom}: switching to weekly at region {region} (position {index})")

        if walk.switched_at is not None:
            walk.assignments.append((region, WEEKLY))
            continue

        walk.assignments.append((region, DAILY))
        fraction = daily_drop_fraction(region)
        walk.drop_fractions[region] = fraction
        bad_flags.append(fraction > params.drop_fraction_threshold)

    return walk


def plan_rows(plan: GranularityPlan, hierarchy: RegionHierarchy) -> List[Tuple[str, str, str]]:
    """Plan CSV rows sorted by (level, region, symptom)"""
    items = sorted(plan.assignment.items(), key=lambda item: (hierarchy.level[item[0][1]], item[0][1], item[0][0]))
    return [(symptom, region, granularity) for (symptom, region), granularity in items]
