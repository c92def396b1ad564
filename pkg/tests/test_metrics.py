import math

import pendulum
import pytest

from src.pipeline.aggregate import CountKey
from src.report.metrics import (
    CI_TOO_WIDE, CI_UNBOUNDED, NONPOSITIVE_NORMALIZATION, NONPOSITIVE_RATIO,
    MetricRecord, compute_metric, confidence_interval, drop_fraction, filter_unreliable, quantile_halfwidth
)

DAY = pendulum.Date(2020, 6, 3)


def record(A, B, day=DAY):
    return MetricRecord(CountKey(day, "fever", "Clark"), 2, "daily", A, B)


def test_compute_metric():
    assert compute_metric(50, 1000, 2) == pytest.approx(0.1)
    assert compute_metric(-3, 1000, 5) == 0.0
    assert compute_metric(10, -1, 3) is None
    assert compute_metric(10, 0, 3) is None
    with pytest.raises(ValueError):
        compute_metric(1, 1, 0)


def test_halfwidth_coverage():
    assert quantile_halfwidth(1.0) == pytest.approx(1.2279, abs=1e-4)
    # P(|X| <= t) = 1 - exp(-t / b)
    assert 1 - math.exp(-quantile_halfwidth(3.0) / 3.0) == pytest.approx(math.sqrt(0.5))


def test_confidence_interval_example():
    l, r = confidence_interval(100, 10000, 2.727, 71.429)
    assert l == pytest.approx((100 - 3.349) / (10000 + 87.71), rel=1e-3)
    assert r == pytest.approx((100 + 3.349) / (10000 - 87.71), rel=1e-3)


def test_unbounded_interval():
    t_B = quantile_halfwidth(2.0)
    _, r = confidence_interval(10, t_B, 1.0, 2.0)
    assert r == math.inf


def test_noiseless_limit_is_always_kept():
    l, r = confidence_interval(100, 1000, 1e-12, 1e-12)
    assert l == pytest.approx(0.1) and r == pytest.approx(0.1)
    assert filter_unreliable(record(100, 1000), 1e-12, 1e-12).kept


def test_filter_drop_reasons():
    assert filter_unreliable(record(10, 0), 1, 1).reason == NONPOSITIVE_NORMALIZATION
    assert filter_unreliable(record(-1, 100), 1, 1).reason == NONPOSITIVE_RATIO
    assert filter_unreliable(record(10, 1), 1, 1).reason == CI_UNBOUNDED

    wide = filter_unreliable(record(5, 10000), 2.727, 71.429)
    assert not wide.kept
    assert wide.reason == CI_TOO_WIDE
    assert "lower" in wide.failed_bounds


def test_filter_keeps_tight_interval():
    kept = filter_unreliable(record(1000, 10000), 2.727, 71.429)
    assert kept.kept
    assert kept.reason is None
    l, r = kept.ci
    assert l < 0.1 < r
    assert 0.1 - l <= 0.25 * 0.1 and r - 0.1 <= 0.25 * 0.1


def test_relative_radius_boundary():
    # b_B tiny: interval is [A - t_A, A + t_A] / B
    ratio = 0.5
    inside_b = 0.2 * 100 / quantile_halfwidth(1.0)
    outside_b = 0.3 * 100 / quantile_halfwidth(1.0)
    assert filter_unreliable(record(100, 200), inside_b, 1e-12).kept
    dropped = filter_unreliable(record(100, 200), outside_b, 1e-12)
    assert not dropped.kept and set(dropped.failed_bounds) == {"lower", "upper"}
    assert dropped.ratio == ratio


def test_drop_fraction_window():
    days = [pendulum.Date(2020, 6, d) for d in (1, 2, 3, 4)]
    records = [
        filter_unreliable(record(1000, 10000, day), 2.727, 71.429) if d % 2 else
        filter_unreliable(record(-1, 10000, day), 2.727, 71.429)
        for d, day in enumerate(days)
    ]
    assert drop_fraction(records, days[0], days[-1]) == 0.5
    assert drop_fraction(records, days[1], days[1]) == 0.0
    assert drop_fraction(records, pendulum.Date(2021, 1, 1), pendulum.Date(2021, 1, 2)) == 1.0
