#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module enforcing per-user-per-day contribution bounds

This module includes the following features:
- Per-symptom bound: one contribution per <day, symptom, region> count
- Cross-symptom bound: at most three symptom counts per geographic level
- Normalization bound: at most one <day, region> count per level
- Pluggable discard policies (first in log order, seeded random)
- Grouping of a whole event stream into user-days, optionally on a worker pool
"""

import logging
import random
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import pendulum

from ..errors import InvariantError
from ..utils.hash_utils import keyed_seed
from .ingest import LEVELS, RegionHierarchy, SearchEvent

# Logger configuration
logger = logging.getLogger("TrendsBounding")

CROSS_SYMPTOM_CAP = 3
NORMALIZATION_CAP = 1

SymptomMark = Tuple[str, str]  # (symptom, region)

DEBUG_DUMP_HEADER = ("user_id", "date", "level", "kind", "symptom", "region_id", "value")


@dataclass(frozen=True, order=True)
class UserDayKey:
    """The privacy unit: one user's search activity on one day"""
    user: str
    date: pendulum.Date

    def __str__(self) -> str:
        return f"{self.user}@{self.date.isoformat()}"


@dataclass(frozen=True)
class BoundedContribution:
    """
    Capped 0/1 contributions of one user-day.

    The mappings are keyed by level; every kept mark contributes exactly 1.
    Discarded marks and normalization candidates are kept for inspection only
    and never reach a count.
    """
    key: UserDayKey
    symptom_marks: Dict[int, Tuple[SymptomMark, ...]]
    normalization_marks: Dict[int, Tuple[str, ...]]
    discarded_marks: Dict[int, Tuple[SymptomMark, ...]]
    normalization_candidates: Dict[int, Tuple[str, ...]]


class FirstInLogOrderPolicy:
    """Keep the earliest distinct (symptom, region) pairs of the log"""

    name = "first-in-log-order"

    def order(self, pairs: List[SymptomMark], key: UserDayKey, level: int) -> List[SymptomMark]:
        return list(pairs)


class RandomDiscardPolicy:
    """
    Keep a uniformly random subset. Seeded per (user-day, level), so runs
    remain reproducible and independent of processing order.
    """

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def order(self, pairs: List[SymptomMark], key: UserDayKey, level: int) -> List[SymptomMark]:
        shuffled = list(pairs)
        random.Random(keyed_seed(self.seed, key.user, key.date.isoformat(), level)).shuffle(shuffled)
        return shuffled


FIRST_IN_LOG_ORDER = FirstInLogOrderPolicy()


def bound_user_day(
    events: Sequence[SearchEvent],
    hierarchy: RegionHierarchy,
    policy=FIRST_IN_LOG_ORDER,
    cross_symptom_cap: int = CROSS_SYMPTOM_CAP
) -> BoundedContribution:
    """
    Apply the contribution bounds to the events of one user-day.

    Per-symptom deduplication runs before the cross-symptom cap. The cap
    keeps the first `cross_symptom_cap` distinct pairs per level in policy
    order. The normalization cap keeps only the region of the first event.

    Args:
        events: All events of one user-day, in log order
        hierarchy: Region hierarchy used to lift level-2 regions
        policy: Discard policy with an order(pairs, key, level) method
        cross_symptom_cap: Maximum symptom marks per level

    Returns:
        BoundedContribution: The capped contribution

    Raises:
        InvariantError: If events is empty or mixes users or dates
    """
    if not events:
        raise InvariantError("bound_user_day called without events")

    key = UserDayKey(events[0].user, events[0].date)
    for event in events:
        if event.user != key.user or event.date != key.date:
            raise InvariantError(
                f"bound_user_day called with mixed user-days: {key} and {event.user}@{event.date.isoformat()}"
            )

    symptom_marks: Dict[int, Tuple[SymptomMark, ...]] = {}
    discarded_marks: Dict[int, Tuple[SymptomMark, ...]] = {}
    normalization_marks: Dict[int, Tuple[str, ...]] = {}
    normalization_candidates: Dict[int, Tuple[str, ...]] = {}

    for level in LEVELS:
        # dict keeps first-seen order: this is the per-symptom bound
        pairs: Dict[SymptomMark, None] = {}
        regions: Dict[str, None] = {}
        for event in events:
            region = hierarchy.ancestor_at(event.region2, level)
            regions.setdefault(region, None)
            if event.symptom is not None:
                pairs.setdefault((event.symptom, region), None)

        ordered = policy.order(list(pairs), key, level)
        symptom_marks[level] = tuple(ordered[:cross_symptom_cap])
        discarded_marks[level] = tuple(ordered[cross_symptom_cap:])

        candidates = tuple(regions)
        normalization_candidates[level] = candidates
        normalization_marks[level] = candidates[:NORMALIZATION_CAP]

    return BoundedContribution(
        key=key,
        symptom_marks=symptom_marks,
        normalization_marks=normalization_marks,
        discarded_marks=discarded_marks,
        normalization_candidates=normalization_candidates
    )


def group_user_days(events: Iterable[SearchEvent]) -> "OrderedDict[UserDayKey, List[SearchEvent]]":
    """
    Group events by user-day, preserving log order inside each group.

    Returns:
        OrderedDict: Groups sorted by (user, date)
    """
    groups: Dict[UserDayKey, List[SearchEvent]] = {}
    for event in events:
        groups.setdefault(UserDayKey(event.user, event.date), []).append(event)
    return OrderedDict(sorted(groups.items()))


def bound_all(
    events: Iterable[SearchEvent],
    hierarchy: RegionHierarchy,
    policy=FIRST_IN_LOG_ORDER,
    workers: int = 1,
    bound_fn: Optional[Callable[..., BoundedContribution]] = None
) -> List[BoundedContribution]:
    """
    Bound every user-day present in an event stream.

    Args:
        events: Search events in log order
        hierarchy: Region hierarchy
        policy: Discard policy passed to bound_user_day
        workers: Number of worker threads (1 runs inline)
        bound_fn: Replacement for bound_user_day, used by the verification
            harness to run negative controls

    Returns:
        List[BoundedContribution]: One contribution per user-day, sorted by (user, date)
    """
    bound_fn = bound_fn or bound_user_day
    groups = list(group_user_days(events).values())

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            contributions = list(pool.map(lambda group: bound_fn(group, hierarchy, policy), groups))
    else:
        contributions = [bound_fn(group, hierarchy, policy) for group in groups]

    capped = sum(1 for c in contributions if any(c.discarded_marks.values()))
    logger.debug(f"Bounded {len(contributions)} user-days; {capped} hit the cross-symptom cap")
    return contributions


def contribution_rows(contributions: Iterable[BoundedContribution]) -> List[Tuple[str, ...]]:
    """
    Flatten contributions into rows of the debug dump (DEBUG_DUMP_HEADER).

    Discarded marks appear with value 0. The rows contain user ids, so
    they are only written behind the unsafe debug switch.
    """
    rows = []
    for contribution in contributions:
        user, day = contribution.key.user, contribution.key.date.isoformat()
        for level in LEVELS:
            for symptom, region in contribution.symptom_marks.get(level, ()):
                rows.append((user, day, str(level), "symptom", symptom, region, "1"))
            for symptom, region in contribution.discarded_marks.get(level, ()):
                rows.append((user, day, str(level), "symptom", symptom, region, "0"))
            kept = contribution.normalization_marks.get(level, ())
            for region in contribution.normalization_candidates.get(level, ()):
                rows.append((user, day, str(level), "normalization", "", region, "1" if region in kept else "0"))
    return rows
