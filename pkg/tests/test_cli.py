import csv
import io
import math
import re

import pytest

from src.cli.config import load_config
from src.cli.main import main
from src.cli.runner import DEBUG_DIR, cmd_budget_report, cmd_run, cmd_verify
from src.cli.synth import PopulationParams, cmd_synth
from src.pipeline.ingest import load_events, load_region_hierarchy, load_symptom_lexicon
from src.verify.sensitivity import unbounded_user_day

PUBLISHED = ("data.csv", "diagnostics.csv", "plan.csv", "ledger.csv", "ledger.json", "scaling.json")
USER_ID = re.compile(r"\buser\d+\b")


def run_into(desk_dir, output_dir, **overrides):
    return cmd_run(load_config(desk_dir / "config.json", {"output_dir": output_dir, **overrides}))


@pytest.fixture(scope="module")
def crowd_dir(tmp_path_factory):
    """One Monday-aligned week dense enough for weekly metrics to survive the filter"""
    directory = tmp_path_factory.mktemp("crowd")
    cmd_synth(directory, PopulationParams(users=2000, days=7, seed=3))
    return directory


def test_synth_is_deterministic(tmp_path):
    params = PopulationParams(users=10, days=7, seed=7)
    first = cmd_synth(tmp_path / "a", params)
    second = cmd_synth(tmp_path / "b", params)
    for name in ("log.csv", "hierarchy.csv", "lexicon.csv"):
        with open(first[name], "rb") as f1, open(second[name], "rb") as f2:
            assert f1.read() == f2.read()


def test_synth_without_symptom_queries(tmp_path):
    paths = cmd_synth(tmp_path, PopulationParams(users=10, days=7, symptom_propensity=0.0))
    hierarchy = load_region_hierarchy(paths["hierarchy.csv"])
    lexicon = load_symptom_lexicon(paths["lexicon.csv"])
    events = load_events(paths["log.csv"], lexicon, hierarchy)
    assert events
    assert all(event.symptom is None for event in events)


def test_synth_rejects_bad_population():
    with pytest.raises(ValueError):
        PopulationParams(users=0)
    with pytest.raises(ValueError):
        PopulationParams(symptom_propensity=1.5)


def test_run_spends_full_budget(desk_dir, tmp_path):
    result = run_into(desk_dir, tmp_path / "out")
    assert abs(result.ledger.total - 1.68) <= 1e-9
    for name in PUBLISHED + ("run_metadata.json",):
        assert (tmp_path / "out" / name).exists()
    assert result.plan.assignment


def test_run_is_reproducible(desk_dir, tmp_path):
    run_into(desk_dir, tmp_path / "a")
    run_into(desk_dir, tmp_path / "b")
    for name in PUBLISHED:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_seed_changes_values(crowd_dir, tmp_path):
    run_into(crowd_dir, tmp_path / "a")
    run_into(crowd_dir, tmp_path / "b", master_seed=8)
    assert (tmp_path / "a" / "data.csv").read_bytes() != (tmp_path / "b" / "data.csv").read_bytes()


def test_country_level_only(desk_dir, tmp_path):
    result = run_into(desk_dir, tmp_path / "out", levels=[0])
    assert abs(result.ledger.total - (0.168 + 2 * 0.0023)) <= 1e-9
    assert all(record.level == 0 for record in result.metrics)


def test_outputs_hold_no_user_ids(desk_dir, tmp_path):
    result = run_into(desk_dir, tmp_path / "out")
    assert not (tmp_path / "out" / DEBUG_DIR).exists()
    for path in result.files.values():
        with open(path, encoding="utf-8") as f:
            assert not USER_ID.search(f.read()), path


def test_debug_dumps_only_on_request(desk_dir, tmp_path):
    result = run_into(desk_dir, tmp_path / "out", debug_unsafe=True)
    dump = tmp_path / "out" / DEBUG_DIR / "contributions.csv"
    assert dump.exists()
    assert USER_ID.search(dump.read_text(encoding="utf-8"))
    assert f"{DEBUG_DIR}/contributions.csv" in result.files


def test_calibration_window_is_scaled_to_100(crowd_dir, tmp_path):
    config = load_config(crowd_dir / "config.json", {"output_dir": tmp_path / "out"})
    result = cmd_run(config)
    window = config.effective_calibration_window
    in_window = [
        record for record in result.metrics
        if record.kept and record.overlaps(window.first, window.last)
    ]
    assert in_window
    assert all(0.0 <= record.value <= 100.0 + 1e-9 for record in in_window)
    for region in {record.key.region for record in in_window}:
        assert max(r.value for r in in_window if r.key.region == region) == pytest.approx(100.0)


def test_budget_report_is_ledger_csv(desk_dir):
    rows = list(csv.reader(io.StringIO(cmd_budget_report(load_config(desk_dir / "config.json")))))
    assert rows[0] == ["entry", "epsilon"]
    assert rows[-1][0] == "TOTAL"
    assert float(rows[-1][1]) == pytest.approx(1.68)
    assert len(rows) == 1 + 3 + 6 + 1
    assert math.fsum(float(epsilon) for _, epsilon in rows[1:-1]) == pytest.approx(1.68)


def test_budget_report_summary(desk_dir):
    text = cmd_budget_report(load_config(desk_dir / "config.json"), summary=True)
    assert text.startswith("entry,epsilon\n")
    assert "symptom subtotal" in text and "1.638" in text


def test_main_prints_budget_csv(desk_dir, capsys):
    assert main(["budget-report", "--config", str(desk_dir / "config.json")]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[-1][0] == "TOTAL" and float(rows[-1][1]) == pytest.approx(1.68)


def test_main_exit_codes(desk_dir, tmp_path, capsys):
    assert main(["budget-report", "--config", str(desk_dir / "config.json")]) == 0
    assert "1.68" in capsys.readouterr().out
    assert main(["budget-report", "--config", str(tmp_path / "missing.json")]) == 1


def test_main_run(desk_dir, tmp_path, capsys):
    code = main(["run", "--config", str(desk_dir / "config.json"), "--output", str(tmp_path / "out"), "--levels", "0,1"])
    assert code == 0
    assert "epsilon: 0.552" in capsys.readouterr().out


@pytest.mark.parametrize("log_bytes", [
    b"user_id,date,region_id,query\nu1,2020-13-01,Clark,fever\n",
    b"user_id,date,region_id,query\nu1,2020-06-01,Clark,fi\xe8vre\n",
])
def test_main_reports_bad_log(desk_dir, tmp_path, log_bytes):
    (tmp_path / "log.csv").write_bytes(log_bytes)
    config = (desk_dir / "config.json").read_text(encoding="utf-8")
    (tmp_path / "config.json").write_text(
        config.replace('"hierarchy.csv"', f'"{(desk_dir / "hierarchy.csv").as_posix()}"')
              .replace('"lexicon.csv"', f'"{(desk_dir / "lexicon.csv").as_posix()}"'),
        encoding="utf-8"
    )
    assert main(["run", "--config", str(tmp_path / "config.json"), "--output", str(tmp_path / "out")]) == 1


@pytest.mark.slow
def test_verify_catches_disabled_bounding(desk_dir):
    report = cmd_verify(load_config(desk_dir / "config.json"), bound_fn=unbounded_user_day)
    assert not report.passed
    assert any(check.category == "sensitivity" for check in report.failures())
