#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module summing bounded contributions into count tables

This module includes the following features:
- Fixed, data-independent keyspaces (every period x symptom x region cell)
- Raw daily symptom and normalization tables at each geographic level
- Weekly tables as sums of raw daily tables (Monday-aligned weeks)
- Cell-wise merge and L1 distance of tables over the same keyspace
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import pendulum

from ..errors import InvariantError, KeyspaceError
from ..utils.date_utils import day_range, parse_day, week_range, week_start
from .bounding import BoundedContribution
from .ingest import RegionHierarchy

# Logger configuration
logger = logging.getLogger("TrendsAggregate")

SYMPTOM = "symptom"
NORMALIZATION = "normalization"
KINDS = (SYMPTOM, NORMALIZATION)

DAILY = "daily"
WEEKLY = "weekly"
GRANULARITIES = (DAILY, WEEKLY)

TABLE_DUMP_HEADER = ("period", "symptom", "region_id", "value")


@dataclass(frozen=True)
class CountKey:
    """<period, symptom, region> for symptom counts, <period, region> for normalization counts"""
    period: pendulum.Date
    symptom: Optional[str]
    region: str

    def token(self) -> str:
        """Stable text form used to key noise draws"""
        return f"{self.period.isoformat()}|{self.symptom or ''}|{self.region}"

    def sort_key(self) -> Tuple[str, str, str]:
        return (self.region, self.symptom or "", self.period.isoformat())


@dataclass(frozen=True, eq=False)
class Keyspace:
    """
    The fixed set of counts that is always released, whether or not a
    cell contains user data.
    """
    start: pendulum.Date
    end: pendulum.Date
    symptoms: Tuple[str, ...]
    hierarchy: RegionHierarchy

    @classmethod
    def build(cls, start, end, symptoms: Sequence[str], hierarchy: RegionHierarchy) -> "Keyspace":
        first, last = parse_day(start), parse_day(end)
        if last < first:
            raise ValueError(f"Keyspace end {last} is before start {first}")
        return cls(start=first, end=last, symptoms=tuple(symptoms), hierarchy=hierarchy)

    def periods(self, granularity: str) -> List[pendulum.Date]:
        if granularity == DAILY:
            return day_range(self.start, self.end)
        if granularity == WEEKLY:
            return week_range(self.start, self.end)
        raise ValueError(f"Unknown granularity: {granularity}")

    def keys(self, kind: str, granularity: str, level: int) -> List[CountKey]:
        """All keys of one table, in canonical order"""
        regions = self.hierarchy.regions_at(level)
        periods = self.periods(granularity)
        if kind == SYMPTOM:
            return [CountKey(p, s, r) for r in regions for s in self.symptoms for p in periods]
        if kind == NORMALIZATION:
            return [CountKey(p, None, r) for r in regions for p in periods]
        raise ValueError(f"Unknown count kind: {kind}")


class CountTable:
    """
    Dense mapping from count keys to values over a fixed keyspace.

    Raw tables hold non-negative integers (as floats), noisy tables hold
    arbitrary reals. Tables are not modified after a pipeline stage
    returns them.
    """

    def __init__(
        self,
        kind: str,
        granularity: str,
        level: int,
        values: Dict[CountKey, float],
        noisy: bool = False,
        table_id: Optional[str] = None
    ):
        self.kind = kind
        self.granularity = granularity
        self.level = level
        self.values = values
        self.noisy = noisy
        self.table_id = table_id or f"{kind}/{granularity}/level{level}"

    @classmethod
    def zeros(cls, kind: str, granularity: str, level: int, keyspace: Keyspace) -> "CountTable":
        values = {key: 0.0 for key in keyspace.keys(kind, granularity, level)}
        return cls(kind, granularity, level, values)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, key: CountKey) -> bool:
        return key in self.values

    def __getitem__(self, key: CountKey) -> float:
        return self.values[key]

    def items(self) -> Iterator[Tuple[CountKey, float]]:
        """Cells in canonical (region, symptom, period) order"""
        for key in sorted(self.values, key=CountKey.sort_key):
            yield key, self.values[key]

    def total(self) -> float:
        return sum(self.values.values())

    def series(self, symptom: Optional[str], region: str) -> "CountTable":
        """
        Sub-table of one (symptom, region) time series. Its table id names
        the series so noise draws and ledger claims stay per series.
        """
        values = {k: v for k, v in self.values.items() if k.symptom == symptom and k.region == region}
        if not values:
            raise KeyspaceError(f"{self.table_id}: no series for symptom={symptom} region={region}")
        suffix = f"/{symptom}/{region}" if symptom is not None else f"/{region}"
        return CountTable(self.kind, self.granularity, self.level, values, self.noisy, self.table_id + suffix)

    def series_ids(self) -> List[Tuple[Optional[str], str]]:
        """Distinct (symptom, region) pairs present in the table, sorted"""
        return sorted({(k.symptom, k.region) for k in self.values}, key=lambda p: (p[1], p[0] or ""))

    def is_total_on(self, keyspace: Keyspace) -> bool:
        """True if the table holds exactly the keys of its full keyspace"""
        return set(self.values) == set(keyspace.keys(self.kind, self.granularity, self.level))


def _aggregate(contribs: Iterable[BoundedContribution], kind: str, level: int, keyspace: Keyspace) -> CountTable:
    table = CountTable.zeros(kind, DAILY, level, keyspace)
    values = table.values
    for contribution in contribs:
        day = contribution.key.date
        if kind == SYMPTOM:
            keys = [CountKey(day, s, r) for s, r in contribution.symptom_marks.get(level, ())]
        else:
            keys = [CountKey(day, None, r) for r in contribution.normalization_marks.get(level, ())]
        for key in keys:
            if key not in values:
                raise KeyspaceError(f"{table.table_id}: contribution of {contribution.key} outside keyspace: {key.token()}")
            values[key] += 1.0
    logger.debug(f"Aggregated {table.table_id}: {len(values)} cells")
    return table


def aggregate_symptom_daily(contribs: Iterable[BoundedContribution], level: int, keyspace: Keyspace) -> CountTable:
    """
    Raw daily <day, symptom, region> counts at one level.

    Each cell is the number of user-days whose symptom marks contain it;
    every other cell of the keyspace is 0.

    Raises:
        KeyspaceError: If a contribution falls outside the keyspace
    """
    return _aggregate(contribs, SYMPTOM, level, keyspace)


def aggregate_normalization_daily(contribs: Iterable[BoundedContribution], level: int, keyspace: Keyspace) -> CountTable:
    """
    Raw daily <day, region> counts of unique searching users at one level.

    Raises:
        KeyspaceError: If a contribution falls outside the keyspace
    """
    return _aggregate(contribs, NORMALIZATION, level, keyspace)


def sum_weekly(daily: CountTable, keyspace: Keyspace) -> CountTable:
    """
    Sum a raw daily table into Monday-aligned weeks.

    Partial weeks at the edges of the date range sum the days that exist.

    Args:
        daily: Raw daily table
        keyspace: Keyspace the daily table was built on

    Returns:
        CountTable: Raw weekly table

    Raises:
        InvariantError: If the table is noisy or not daily; noise is only
            ever added after weekly summation
    """
    if daily.noisy:
        raise InvariantError(f"sum_weekly called on noisy table {daily.table_id}; noise must be added after weekly summation")
    if daily.granularity != DAILY:
        raise InvariantError(f"sum_weekly called on {daily.granularity} table {daily.table_id}")

    weekly = CountTable.zeros(daily.kind, WEEKLY, daily.level, keyspace)
    for key, value in daily.values.items():
        week_key = CountKey(week_start(key.period), key.symptom, key.region)
        if week_key not in weekly.values:
            raise KeyspaceError(f"{daily.table_id}: day {key.period} outside weekly keyspace")
        weekly.values[week_key] += value
    return weekly


def merge_tables(first: CountTable, second: CountTable) -> CountTable:
    """
    Cell-wise sum of two raw partial tables over the same keyspace, used to
    combine partial aggregates computed in parallel.
    """
    if (first.kind, first.granularity, first.level) != (second.kind, second.granularity, second.level):
        raise InvariantError(f"Cannot merge {first.table_id} with {second.table_id}")
    if first.noisy or second.noisy:
        raise InvariantError("Only raw tables can be merged")
    if set(first.values) != set(second.values):
        raise KeyspaceError(f"Cannot merge tables with different keyspaces: {first.table_id}")
    values = {key: value + second.values[key] for key, value in first.values.items()}
    return CountTable(first.kind, first.granularity, first.level, values, table_id=first.table_id)


def l1_distance(first: CountTable, second: CountTable) -> float:
    """Sum of absolute cell differences of two tables over the same keyspace"""
    if set(first.values) != set(second.values):
        raise KeyspaceError(f"L1 distance needs equal keyspaces: {first.table_id} vs {second.table_id}")
    return sum(abs(value - second.values[key]) for key, value in first.values.items())


def table_rows(table: CountTable) -> List[Tuple[str, str, str, str]]:
    """Rows of the table debug dump (TABLE_DUMP_HEADER)"""
    return [
        (key.period.isoformat(), key.symptom or "", key.region, f"{value:.6f}" if table.noisy else f"{value:.0f}")
        for key, value in table.items()
    ]
