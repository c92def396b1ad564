import math
import random

import numpy as np
import pytest

from src.errors import InputError, VerificationError
from src.pipeline.aggregate import DAILY, NORMALIZATION, SYMPTOM, WEEKLY
from src.pipeline.bounding import bound_user_day
from src.pipeline.ingest import SearchEvent
from src.privacy.noise import NoiseStream, noise_params
from src.verify.estimators import (
    analytic_composition, estimate_epsilon_single_cell, filter_coverage, sampler_ks_test
)
from src.verify.sensitivity import (
    check_log, enumerate_neighbors, keyspace_for, random_tiny_log, sensitivity_check, unbounded_user_day
)
from src.verify.suite import LogUnderTest, format_report, run_suite

SYMPTOMS = ["fever", "cough", "chills", "nausea", "headache"]


def test_enumerate_neighbors(event):
    events = [event(user="a"), event(user="a"), event(user="b"), event(user="c")]
    pairs = enumerate_neighbors(events)
    assert len(pairs) == 3
    assert all(len(p.d1) == 4 for p in pairs)
    assert [len(p.d2) for p in pairs] == [2, 3, 3]
    assert enumerate_neighbors([]) == []


def test_enumerate_neighbors_limit(event):
    events = [event(user=f"u{i}") for i in range(51)]
    with pytest.raises(InputError, match="Sample a smaller log"):
        enumerate_neighbors(events)


def test_reference_against_empty_log(day_events, hierarchy, lexicon):
    (pair,) = enumerate_neighbors(day_events)
    assert pair.d2 == ()

    keyspace = keyspace_for(day_events, lexicon.symptoms, hierarchy)
    result = sensitivity_check(pair, hierarchy, keyspace)
    for granularity in (DAILY, WEEKLY):
        assert [result.distances[(SYMPTOM, granularity, level)] for level in (0, 1, 2)] == [2, 3, 3]
        assert [result.distances[(NORMALIZATION, granularity, level)] for level in (0, 1, 2)] == [1, 1, 1]


def test_non_symptom_user_day(day_events, hierarchy, lexicon):
    other = SearchEvent(user="u2", date=day_events[0].date, region2="Clark", symptom=None)
    pairs = enumerate_neighbors(day_events + [other])
    keyspace = keyspace_for(day_events, lexicon.symptoms, hierarchy)
    result = sensitivity_check(pairs[1], hierarchy, keyspace)

    assert str(result.pair_key) == "u2@2020-06-03"
    assert all(result.worst(SYMPTOM, level) == 0 for level in (0, 1, 2))
    assert all(result.worst(NORMALIZATION, level) == 1 for level in (0, 1, 2))


def test_disabled_bounding_is_caught(day_events, hierarchy, lexicon):
    with pytest.raises(VerificationError) as info:
        check_log(day_events, hierarchy, lexicon.symptoms, bound_fn=unbounded_user_day)
    assert info.value.pair_key == "u1@2020-06-03"
    assert info.value.level is not None


def test_raised_cross_symptom_cap_is_caught(day_events, hierarchy, lexicon):
    def four_symptoms(events, hierarchy, policy):
        return bound_user_day(events, hierarchy, policy, cross_symptom_cap=4)

    with pytest.raises(VerificationError) as info:
        check_log(day_events, hierarchy, lexicon.symptoms, bound_fn=four_symptoms)
    assert info.value.level == 2


def test_random_logs_respect_bounds(hierarchy):
    rng = random.Random(2020)
    for _ in range(1000):
        events = random_tiny_log(rng, hierarchy, SYMPTOMS)
        for result in check_log(events, hierarchy, SYMPTOMS):
            assert result.violations() == []


def test_identical_cells_have_zero_loss():
    estimate = estimate_epsilon_single_cell(4.0, 4.0, 2.0)
    assert estimate.estimate == 0.0
    assert estimate.bound_checked == 0.0


def test_estimator_needs_enough_trials():
    with pytest.raises(ValueError):
        estimate_epsilon_single_cell(0.0, 1.0, 1.0, trials=1000)


@pytest.mark.slow
@pytest.mark.parametrize("level", [0, 1, 2])
def test_symptom_cell_epsilon(level):
    params = noise_params(level, SYMPTOM)
    estimate = estimate_epsilon_single_cell(0.0, 3.0, params.scale_b, trials=100_000, stream=NoiseStream(1))
    assert abs(estimate.estimate - params.epsilon_share) <= 0.1 * params.epsilon_share
    assert estimate.within(0.1)


@pytest.mark.slow
@pytest.mark.parametrize("level", [0, 1, 2])
def test_normalization_cell_epsilon(level):
    # Privacy losses of 0.0023 need millions of coupled samples to resolve to 10%
    params = noise_params(level, NORMALIZATION)
    estimate = estimate_epsilon_single_cell(0.0, 1.0, params.scale_b, trials=4_000_000, stream=NoiseStream(1))
    assert abs(estimate.estimate - params.epsilon_share) <= 0.1 * params.epsilon_share
    assert estimate.within(0.1)


def test_estimate_grows_with_difference():
    estimates = [estimate_epsilon_single_cell(0.0, d, 2.0).estimate for d in (0.0, 1.0, 2.0, 3.0)]
    assert estimates == sorted(estimates)
    assert estimates[-1] == pytest.approx(1.5, rel=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("level, kind", [(lvl, k) for k in (SYMPTOM, NORMALIZATION) for lvl in (0, 1, 2)])
def test_sampler_ks(level, kind):
    params = noise_params(level, kind)
    result = sampler_ks_test(params.scale_b, n=100_000, stream=NoiseStream(3))
    assert result.passed
    assert result.critical_value < 0.0052
    assert result.variance_ok


def test_ks_rejects_uniform_sampler():
    scale_b = 17.857
    half_width = scale_b * math.sqrt(6.0)
    rng = np.random.default_rng(0)
    result = sampler_ks_test(scale_b, n=10_000, sampler=lambda n: rng.uniform(-half_width, half_width, n))
    assert not result.passed


@pytest.mark.slow
def test_filter_coverage_and_drops():
    stream = NoiseStream(5)
    results = {a: filter_coverage(a, 10_000, level=2, trials=10_000, stream=stream) for a in (0, 5, 50, 100, 500)}

    assert results[0].drop_fraction > 0.95
    for a in (50, 100, 500):
        result = results[a]
        sigma = math.sqrt(0.25 / result.kept)
        assert result.coverage >= 0.5 - 3 * sigma

    kept = sum(r.kept for r in results.values())
    covered = sum(r.covered for r in results.values())
    assert covered / kept >= 0.5 - 3 * math.sqrt(0.25 / kept)


def test_analytic_composition():
    composition = analytic_composition()
    assert abs(composition["symptom_total"] - 1.638) <= 1e-9
    assert abs(composition["normalization_total"] - 0.042) <= 1e-9
    assert abs(composition["total"] - 1.68) <= 1e-9
    assert composition["symptom_share"] == pytest.approx(0.975, abs=1e-3)


@pytest.mark.slow
def test_suite_on_reference_fixture(day_events, hierarchy, lexicon):
    report = run_suite([LogUnderTest("fixture", hierarchy, lexicon.symptoms, day_events)])
    assert report.passed, format_report(report)
    assert "checks passed" in format_report(report)


def test_suite_reports_skipped_large_log(hierarchy, lexicon, event):
    events = [event(user=f"u{i}") for i in range(60)]
    report = run_suite([LogUnderTest("log", hierarchy, lexicon.symptoms, events)], levels=[])
    (check,) = report.checks[:1]
    assert check.passed and "skipped" in check.details
