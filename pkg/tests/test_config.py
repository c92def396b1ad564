import json

import pytest

from src.cli.config import DateRange, config_hash, load_config, save_config
from src.errors import InputError


def write_config(directory, **fields):
    data = {
        "hierarchy_path": "hierarchy.csv",
        "lexicon_path": "lexicon.csv",
        "log_path": "log.csv",
        "date_range": {"start": "2020-06-01", "end": "2020-06-14"},
        **fields
    }
    path = directory / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_defaults_and_relative_paths(tmp_path):
    config = load_config(write_config(tmp_path))
    assert config.hierarchy_path == tmp_path.absolute() / "hierarchy.csv"
    assert config.levels == [0, 1, 2]
    assert config.master_seed == 0
    assert config.epsilon.is_published()
    assert config.effective_sample_period == config.date_range
    assert config.effective_calibration_window == config.date_range


def test_calibration_window_defaults_to_sample_period(tmp_path):
    config = load_config(write_config(tmp_path, sample_period={"start": "2020-06-01", "end": "2020-06-07"}))
    assert config.effective_calibration_window.end == "2020-06-07"


def test_overrides(tmp_path):
    config = load_config(write_config(tmp_path), {"master_seed": 5, "levels": [2, 0, 2], "workers": None})
    assert config.master_seed == 5
    assert config.levels == [0, 2]
    assert config.workers == 1


@pytest.mark.parametrize("fields", [
    {"levels": [3]},
    {"levels": []},
    {"discard_policy": "last"},
    {"workers": 0},
    {"date_range": {"start": "2020-06-14", "end": "2020-06-01"}},
    {"date_range": {"start": "2020-06-31", "end": "2020-07-01"}},
    {"epsilon": {"symptom": {"0": 0.1}}},
    {"granularity": {"window": 20, "switch_threshold": 21}},
])
def test_invalid_configs(tmp_path, fields):
    with pytest.raises(InputError, match="invalid config"):
        load_config(write_config(tmp_path, **fields))


def test_missing_and_malformed(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_config(tmp_path / "config.json")
    (tmp_path / "config.json").write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(InputError, match="JSON object"):
        load_config(tmp_path / "config.json")


def test_hash_tracks_content(tmp_path):
    first = load_config(write_config(tmp_path))
    assert config_hash(first) == config_hash(load_config(write_config(tmp_path)))
    assert config_hash(first) != config_hash(load_config(write_config(tmp_path), {"master_seed": 1}))


def test_saved_config_loads_back(tmp_path):
    config = load_config(write_config(tmp_path, master_seed=9, output_dir="out"))
    (tmp_path / "echo").mkdir()
    path = save_config(config, tmp_path / "echo" / "config.json")
    assert load_config(path) == config


def test_date_range():
    window = DateRange(start="2020-06-01", end="2020-06-01")
    assert window.first == window.last
