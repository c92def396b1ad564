#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Exhaustive sensitivity checking on small query logs

This module includes the following features:
- Neighbor pairs: a log and the same log without one user-day
- Raw per-level L1 distances of symptom and normalization tables,
  daily and weekly, for a neighbor pair
- Keyspace totality of every table built along the way
- Random tiny logs for property checks
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import InputError, InvariantError, VerificationError
from ..pipeline.aggregate import (
    DAILY, NORMALIZATION, SYMPTOM, CountTable, Keyspace,
    aggregate_normalization_daily, aggregate_symptom_daily, l1_distance, sum_weekly
)
from ..pipeline.bounding import (
    CROSS_SYMPTOM_CAP, FIRST_IN_LOG_ORDER, NORMALIZATION_CAP, BoundedContribution,
    UserDayKey, bound_all, group_user_days
)
from ..pipeline.ingest import LEVELS, RegionHierarchy, SearchEvent
from ..utils.date_utils import day_range, parse_day

# Logger configuration
logger = logging.getLogger("TrendsSensitivity")

MAX_EXHAUSTIVE_USER_DAYS = 50

BOUNDS = {SYMPTOM: float(CROSS_SYMPTOM_CAP), NORMALIZATION: float(NORMALIZATION_CAP)}


@dataclass(frozen=True)
class NeighborPair:
    """d1 and d2 = d1 without every event of one user-day"""
    key: UserDayKey
    d1: Tuple[SearchEvent, ...]
    d2: Tuple[SearchEvent, ...]


@dataclass
class SensitivityResult:
    """Raw L1 distances of one neighbor pair, keyed by (kind, granularity, level)"""
    pair_key: UserDayKey
    distances: Dict[Tuple[str, str, int], float] = field(default_factory=dict)

    def worst(self, kind: str, level: int) -> float:
        return max(
            (d for (k, _, lvl), d in self.distances.items() if k == kind and lvl == level),
            default=0.0
        )

    def violations(self) -> List[Tuple[str, str, int, float]]:
        """(kind, granularity, level, distance) of every distance above its bound"""
        return [
            (kind, granularity, level, distance)
            for (kind, granularity, level), distance in sorted(self.distances.items())
            if distance > BOUNDS[kind]
        ]


def enumerate_neighbors(
    events: Sequence[SearchEvent],
    max_user_days: int = MAX_EXHAUSTIVE_USER_DAYS
) -> List[NeighborPair]:
    """
    One neighbor pair per distinct user-day of a log.

    Args:
        events: The log (d1)
        max_user_days: Upper limit for exhaustive enumeration

    Returns:
        List[NeighborPair]: Pairs sorted by user-day

    Raises:
        InputError: If the log holds more than max_user_days user-days
    """
    d1 = tuple(events)
    keys = list(group_user_days(d1))
    if len(keys) > max_user_days:
        raise InputError(
            f"Log has {len(keys)} user-days; exhaustive checking is limited to {max_user_days}. "
            f"Sample a smaller log first"
        )
    return [
        NeighborPair(key=key, d1=d1, d2=tuple(e for e in d1 if (e.user, e.date) != (key.user, key.date)))
        for key in keys
    ]


def keyspace_for(events: Sequence[SearchEvent], symptoms: Sequence[str], hierarchy: RegionHierarchy) -> Keyspace:
    """Smallest keyspace covering every event day of a log"""
    if not events:
        raise ValueError("Cannot derive a keyspace from an empty log")
    days = [event.date for event in events]
    return Keyspace.build(min(days), max(days), symptoms, hierarchy)


def raw_tables(
    contributions: Sequence[BoundedContribution],
    keyspace: Keyspace,
    levels: Iterable[int] = LEVELS
) -> Dict[Tuple[str, str, int], CountTable]:
    """
    Raw daily and weekly tables of both kinds at each level.

    Raises:
        InvariantError: If a table does not cover its full keyspace
    """
    tables = {}
    for level in levels:
        for kind, aggregate in ((SYMPTOM, aggregate_symptom_daily), (NORMALIZATION, aggregate_normalization_daily)):
            daily = aggregate(contributions, level, keyspace)
            tables[(kind, DAILY, level)] = daily
            weekly = sum_weekly(daily, keyspace)
            tables[(kind, weekly.granularity, level)] = weekly
    for table in tables.values():
        if not table.is_total_on(keyspace):
            raise InvariantError(f"Table {table.table_id} does not cover its keyspace")
    return tables


def sensitivity_check(
    pair: NeighborPair,
    hierarchy: RegionHierarchy,
    keyspace: Keyspace,
    policy=FIRST_IN_LOG_ORDER,
    bound_fn: Optional[Callable[..., BoundedContribution]] = None,
    raise_on_violation: bool = True
) -> SensitivityResult:
    """
    Bound and aggregate both logs of a pair without noise and measure the
    per-level L1 distance of every table.

    Args:
        pair: Neighbor pair
        hierarchy: Region hierarchy
        keyspace: Keyspace covering d1
        policy: Discard policy
        bound_fn: Replacement for bound_user_day (negative controls)
        raise_on_violation: Raise on the first distance above its bound

    Returns:
        SensitivityResult: Distances per (kind, granularity, level)

    Raises:
        VerificationError: If a symptom distance exceeds 3 or a
            normalization distance exceeds 1; names the pair and level
    """
    tables1 = raw_tables(bound_all(pair.d1, hierarchy, policy, bound_fn=bound_fn), keyspace)
    tables2 = raw_tables(bound_all(pair.d2, hierarchy, policy, bound_fn=bound_fn), keyspace)

    result = SensitivityResult(pair_key=pair.key)
    for table_key, table in tables1.items():
        result.distances[table_key] = l1_distance(table, tables2[table_key])

    violations = result.violations()
    if violations and raise_on_violation:
        kind, granularity, level, distance = violations[0]
        raise VerificationError(
            f"Removing user-day {pair.key} changes {kind} {granularity} counts at level {level} "
            f"by {distance:g} (bound {BOUNDS[kind]:g})",
            pair_key=str(pair.key),
            level=level
        )
    return result


def check_log(
    events: Sequence[SearchEvent],
    hierarchy: RegionHierarchy,
    symptoms: Sequence[str],
    policy=FIRST_IN_LOG_ORDER,
    bound_fn: Optional[Callable[..., BoundedContribution]] = None,
    max_user_days: int = MAX_EXHAUSTIVE_USER_DAYS
) -> List[SensitivityResult]:
    """Run sensitivity_check on every neighbor pair of a log"""
    pairs = enumerate_neighbors(events, max_user_days)
    if not pairs:
        return []
    keyspace = keyspace_for(events, symptoms, hierarchy)
    logger.debug(f"Checking {len(pairs)} neighbor pairs")
    return [sensitivity_check(pair, hierarchy, keyspace, policy, bound_fn) for pair in pairs]


def random_tiny_log(
    rng: random.Random,
    hierarchy: RegionHierarchy,
    symptoms: Sequence[str],
    max_user_days: int = 10,
    max_events: int = 8,
    start: str = "2020-06-01",
    days: int = 10
) -> List[SearchEvent]:
    """
    A random log of at most max_user_days user-days.

    Users search from random counties, sometimes several, and mix symptom
    queries with unmatched ones so every cap gets exercised.
    """
    counties = hierarchy.regions_at(2)
    first = parse_day(start)
    calendar = day_range(first, first.add(days=days - 1))
    users = [f"u{i}" for i in range(max(1, max_user_days // 2))]

    user_days = set()
    for _ in range(rng.randint(1, max_user_days)):
        user_days.add((rng.choice(users), rng.choice(calendar)))

    events = []
    for user, day in sorted(user_days):
        for _ in range(rng.randint(1, max_events)):
            symptom = rng.choice(symptoms) if rng.random() < 0.8 else None
            events.append(SearchEvent(user=user, date=day, region2=rng.choice(counties), symptom=symptom))
    rng.shuffle(events)
    return events


def unbounded_user_day(events: Sequence[SearchEvent], hierarchy: RegionHierarchy, policy=None) -> BoundedContribution:
    """
    Negative control for the harness: every distinct (symptom, region) pair
    and every searched region counts, nothing is capped.
    """
    key = UserDayKey(events[0].user, events[0].date)
    symptom_marks, normalization_marks = {}, {}
    for level in LEVELS:
        pairs: Dict[Tuple[str, str], None] = {}
        regions: Dict[str, None] = {}
        for event in events:
            region = hierarchy.ancestor_at(event.region2, level)
            regions.setdefault(region, None)
            if event.symptom is not None:
                pairs.setdefault((event.symptom, region), None)
        symptom_marks[level] = tuple(pairs)
        normalization_marks[level] = tuple(regions)
    return BoundedContribution(
        key=key,
        symptom_marks=symptom_marks,
        normalization_marks=normalization_marks,
        discarded_marks={level: () for level in LEVELS},
        normalization_candidates=dict(normalization_marks)
    )
