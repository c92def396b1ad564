"""
Calendar helpers built on pendulum

Main features:
- Parsing ISO-8601 calendar days (UTC, no time of day)
- Monday-aligned week starts
- Inclusive day and week ranges used to build fixed keyspaces
"""

import datetime
from typing import List, Union

import pendulum

DayLike = Union[str, datetime.date]


def parse_day(value: DayLike) -> pendulum.Date:
    """
    Convert an ISO-8601 "YYYY-MM-DD" string or a date into a pendulum Date.

    Args:
        value: String or date

    Returns:
        pendulum.Date: The calendar day

    Raises:
        ValueError: If the string is not a valid calendar day
    """
    if isinstance(value, pendulum.Date) and not isinstance(value, pendulum.DateTime):
        return value
    if isinstance(value, datetime.date):
        return pendulum.Date(value.year, value.month, value.day)
    text = str(value).strip()
    if len(text) != 10:
        raise ValueError(f"Not a YYYY-MM-DD day: {value!r}")
    return pendulum.from_format(text, "YYYY-MM-DD", tz="UTC").date()


def week_start(day: DayLike) -> pendulum.Date:
    """Return the Monday that starts the week containing day"""
    return parse_day(day).start_of("week")


def day_range(start: DayLike, end: DayLike) -> List[pendulum.Date]:
    """
    All calendar days from start to end, both inclusive.

    Args:
        start: First day
        end: Last day

    Returns:
        List[pendulum.Date]: Days in increasing order (empty if end < start)
    """
    first, last = parse_day(start), parse_day(end)
    days = []
    current = first
    while current <= last:
        days.append(current)
        current = current.add(days=1)
    return days


def week_range(start: DayLike, end: DayLike) -> List[pendulum.Date]:
    """
    Monday week starts of every week that overlaps [start, end].

    Partial weeks at either edge are included.
    """
    first, last = week_start(start), week_start(end)
    weeks = []
    current = first
    while current <= last:
        weeks.append(current)
        current = current.add(weeks=1)
    return weeks


def in_range(day: DayLike, start: DayLike, end: DayLike) -> bool:
    """True if start <= day <= end"""
    return parse_day(start) <= parse_day(day) <= parse_day(end)
