import pytest

from src.errors import InvariantError
from src.pipeline.aggregate import DAILY, NORMALIZATION, SYMPTOM, CountTable, aggregate_symptom_daily
from src.pipeline.bounding import bound_all
from src.privacy.anonymize import anonymize_table
from src.privacy.ledger import BudgetLedger
from src.privacy.noise import NoiseStream, noise_params


def test_every_cell_is_noised_including_empty_ones(keyspace):
    raw = CountTable.zeros(SYMPTOM, DAILY, 2, keyspace)
    noisy = anonymize_table(raw, noise_params(2, SYMPTOM), NoiseStream(1))

    assert noisy.noisy
    assert set(noisy.values) == set(raw.values)
    assert all(value != 0.0 for value in noisy.values.values())


def test_same_seed_same_output(day_events, hierarchy, keyspace):
    raw = aggregate_symptom_daily(bound_all(day_events, hierarchy), 2, keyspace)
    first = anonymize_table(raw, noise_params(2, SYMPTOM), NoiseStream(9))
    second = anonymize_table(raw, noise_params(2, SYMPTOM), NoiseStream(9))
    third = anonymize_table(raw, noise_params(2, SYMPTOM), NoiseStream(10))

    assert first.values == second.values
    assert first.values != third.values


def test_series_slice_draws_match_full_table(keyspace):
    raw = CountTable.zeros(SYMPTOM, DAILY, 1, keyspace)
    full = anonymize_table(raw, noise_params(1, SYMPTOM), NoiseStream(3))
    series = anonymize_table(raw.series("cough", "Nevada"), noise_params(1, SYMPTOM), NoiseStream(3))

    for key, value in series.values.items():
        assert full[key] == value


def test_charges_ledger_before_noising(keyspace):
    ledger = BudgetLedger()
    raw = CountTable.zeros(NORMALIZATION, DAILY, 2, keyspace)
    anonymize_table(raw, noise_params(2, NORMALIZATION), NoiseStream(0), ledger)
    assert ledger.total == 0.014


def test_refuses_noisy_input_and_mismatched_params(keyspace):
    raw = CountTable.zeros(SYMPTOM, DAILY, 2, keyspace)
    noisy = anonymize_table(raw, noise_params(2, SYMPTOM), NoiseStream(0))

    with pytest.raises(InvariantError, match="already noisy"):
        anonymize_table(noisy, noise_params(2, SYMPTOM), NoiseStream(0))
    with pytest.raises(InvariantError, match="do not match"):
        anonymize_table(raw, noise_params(1, SYMPTOM), NoiseStream(0))
