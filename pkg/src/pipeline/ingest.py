#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module loading the region hierarchy, the symptom lexicon and query logs

This module includes the following features:
- Region hierarchy loading and validation (levels 0-2, no orphans, no cycles)
- Symptom lexicon loading with query normalization
- Streaming classification of raw query log rows into search events
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple, Union

import pendulum

from ..errors import InputError, KeyspaceError
from ..utils.date_utils import parse_day
from ..utils.file_utils import read_csv_rows

# Logger configuration
logger = logging.getLogger("TrendsIngest")

HIERARCHY_HEADER = ("region_id", "level", "parent_id")
LEXICON_HEADER = ("query", "symptom")
LOG_HEADER = ("user_id", "date", "region_id", "query")

LEVELS = (0, 1, 2)

_WHITESPACE = re.compile(r"\s+")


def normalize_query(query: str) -> str:
    """Lowercase a query and collapse runs of whitespace"""
    return _WHITESPACE.sub(" ", query.strip().lower())


@dataclass(frozen=True, eq=False)
class RegionHierarchy:
    """
    Three-level region tree. Immutable after construction and safe to share
    read-only between workers.
    """
    level: Mapping[str, int]
    parent: Mapping[str, str]

    @property
    def regions(self) -> FrozenSet[str]:
        return frozenset(self.level)

    def regions_at(self, level: int) -> List[str]:
        """Region ids of one level, sorted"""
        return sorted(r for r, lvl in self.level.items() if lvl == level)

    def ancestor_at(self, region: str, level: int) -> str:
        """
        Walk up the parent chain until the requested level.

        Args:
            region: Starting region
            level: Target level, not deeper than the region's own level

        Returns:
            str: The ancestor (the region itself if levels match)
        """
        current = region
        while self.level[current] > level:
            current = self.parent[current]
        if self.level[current] != level:
            raise ValueError(f"Region {region} has no ancestor at level {level}")
        return current

    def chain(self, region2: str) -> Tuple[str, str, str]:
        """Return (level-0, level-1, level-2) regions for a level-2 region"""
        return (self.ancestor_at(region2, 0), self.ancestor_at(region2, 1), region2)

    def level0_ancestor(self, region: str) -> str:
        return self.ancestor_at(region, 0)


@dataclass(frozen=True, eq=False)
class SymptomLexicon:
    """Exact-match lexicon from normalized query strings to symptoms"""
    entries: Mapping[str, str]
    symptoms: Tuple[str, ...]

    def classify(self, query: str) -> Optional[str]:
        """Return the symptom of a raw query, None if it matches nothing"""
        return self.entries.get(normalize_query(query))


@dataclass(frozen=True)
class SearchEvent:
    """One classified query occurrence"""
    user: str
    date: pendulum.Date
    region2: str
    symptom: Optional[str] = None


def load_region_hierarchy(path: Union[str, Path]) -> RegionHierarchy:
    """
    Load and validate a region hierarchy CSV (region_id,level,parent_id).

    Args:
        path: Path to the hierarchy file

    Returns:
        RegionHierarchy: Validated hierarchy

    Raises:
        InputError: On parse failure, orphan region, wrong parent level,
            duplicate region or cycle
    """
    level: Dict[str, int] = {}
    parent: Dict[str, str] = {}

    for row_number, (region_id, level_text, parent_id) in read_csv_rows(path, HIERARCHY_HEADER):
        if not region_id:
            raise InputError(f"hierarchy row {row_number}: empty region_id")
        if region_id in level:
            raise InputError(f"hierarchy row {row_number}: duplicate region {region_id}")
        try:
            region_level = int(level_text)
        except ValueError:
            raise InputError(f"hierarchy row {row_number}: invalid level {level_text!r} for region {region_id}")
        if region_level not in LEVELS:
            raise InputError(f"hierarchy row {row_number}: level {region_level} of region {region_id} not in 0-2")
        level[region_id] = region_level
        if parent_id:
            parent[region_id] = parent_id

    validate_hierarchy(level, parent)

    logger.info(
        f"Loaded region hierarchy: {len(level)} regions "
        f"({', '.join(f'level {lvl}: {sum(1 for v in level.values() if v == lvl)}' for lvl in LEVELS)})"
    )
    return RegionHierarchy(level=MappingProxyType(level), parent=MappingProxyType(parent))


def validate_hierarchy(level: Mapping[str, int], parent: Mapping[str, str]) -> None:
    """
    Check the hierarchy invariants.

    Raises:
        InputError: Naming the first offending region
    """
    for region in sorted(level):
        region_level = level[region]
        parent_id = parent.get(region)
        if region_level == 0:
            if parent_id is not None:
                raise InputError(f"level-0 region {region} must not have a parent")
            continue
        if parent_id is None:
            raise InputError(f"orphan region {region}: level {region_level} without parent")
        if parent_id not in level:
            raise InputError(f"orphan region {region}: parent {parent_id} is not defined")

    # Walk every chain before checking parent levels so a cycle is reported as one
    for region in sorted(level):
        seen = {region}
        current = region
        while current in parent:
            current = parent[current]
            if current in seen:
                raise InputError(f"cycle detected at region {region}")
            seen.add(current)

    for region in sorted(level):
        if level[region] > 0 and level[parent[region]] != level[region] - 1:
            raise InputError(
                f"region {region} at level {level[region]} has parent {parent[region]} "
                f"at level {level[parent[region]]}"
            )


def load_symptom_lexicon(path: Union[str, Path]) -> SymptomLexicon:
    """
    Load a lexicon CSV (query,symptom).

    The canonical symptom order is the order of first appearance in the file.

    Raises:
        InputError: If a normalized query maps to two different symptoms
    """
    entries: Dict[str, str] = {}
    symptoms: List[str] = []

    for row_number, (query, symptom) in read_csv_rows(path, LEXICON_HEADER):
        normalized = normalize_query(query)
        if not normalized or not symptom:
            raise InputError(f"lexicon row {row_number}: empty query or symptom")
        known = entries.get(normalized)
        if known is not None and known != symptom:
            raise InputError(
                f"lexicon row {row_number}: query {normalized!r} maps to both {known} and {symptom}"
            )
        entries[normalized] = symptom
        if symptom not in symptoms:
            symptoms.append(symptom)

    logger.info(f"Loaded lexicon: {len(entries)} queries, {len(symptoms)} symptoms")
    return SymptomLexicon(entries=MappingProxyType(entries), symptoms=tuple(symptoms))


def classify_and_stream(
    log_path: Union[str, Path],
    lexicon: SymptomLexicon,
    hierarchy: RegionHierarchy
) -> Iterator[SearchEvent]:
    """
    Classify query log rows (user_id,date,region_id,query) into events.

    Every row yields exactly one event, in input order. Rows whose query is
    not in the lexicon yield events without symptom.

    Args:
        log_path: Path to the query log CSV
        lexicon: Symptom lexicon
        hierarchy: Region hierarchy

    Yields:
        SearchEvent: One event per row

    Raises:
        KeyspaceError: On a region that is unknown or not at level 2
        InputError: On a malformed row (the message carries the row number)
    """
    for row_number, (user_id, date_text, region_id, query) in read_csv_rows(log_path, LOG_HEADER):
        if not user_id:
            raise InputError(f"log row {row_number}: empty user_id")
        try:
            day = parse_day(date_text)
        except ValueError:
            raise InputError(f"log row {row_number}: invalid date {date_text!r}")
        if hierarchy.level.get(region_id) != 2:
            raise KeyspaceError(f"log row {row_number}: unknown level-2 region {region_id!r}")
        yield SearchEvent(user=user_id, date=day, region2=region_id, symptom=lexicon.classify(query))


def load_events(
    log_path: Union[str, Path],
    lexicon: SymptomLexicon,
    hierarchy: RegionHierarchy
) -> List[SearchEvent]:
    """Materialize classify_and_stream and log a summary"""
    events = list(classify_and_stream(log_path, lexicon, hierarchy))
    matched = sum(1 for e in events if e.symptom is not None)
    logger.info(f"Classified {len(events)} log rows ({matched} symptom searches)")
    return events
