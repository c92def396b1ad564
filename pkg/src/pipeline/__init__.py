"""
Raw data stages of the symptom-trends pipeline

This module includes the following features:
- Loading the region hierarchy, symptom lexicon and query log
- Per-user-per-day contribution bounding
- Aggregation into fixed-keyspace daily and weekly count tables
"""

from .ingest import (
    RegionHierarchy,
    SymptomLexicon,
    SearchEvent,
    load_region_hierarchy,
    load_symptom_lexicon,
    classify_and_stream,
    load_events
)

from .bounding import (
    UserDayKey,
    BoundedContribution,
    FirstInLogOrderPolicy,
    RandomDiscardPolicy,
    bound_user_day,
    bound_all
)

from .aggregate import (
    CountKey,
    CountTable,
    Keyspace,
    aggregate_symptom_daily,
    aggregate_normalization_daily,
    sum_weekly
)

__all__ = [
    'RegionHierarchy',
    'SymptomLexicon',
    'SearchEvent',
    'load_region_hierarchy',
    'load_symptom_lexicon',
    'classify_and_stream',
    'load_events',
    'UserDayKey',
    'BoundedContribution',
    'FirstInLogOrderPolicy',
    'RandomDiscardPolicy',
    'bound_user_day',
    'bound_all',
    'CountKey',
    'CountTable',
    'Keyspace',
    'aggregate_symptom_daily',
    'aggregate_normalization_daily',
    'sum_weekly'
]
