import pendulum

from src.pipeline.aggregate import DAILY, WEEKLY, CountKey
from src.report.granularity import GranularityPlan
from src.report.metrics import MetricRecord
from src.report.publish import emit_dataset


def metric(region, symptom, day, value=0.0, kept=True, reason=None, granularity=DAILY):
    return MetricRecord(
        CountKey(pendulum.Date(2020, 6, day), symptom, region), 2, granularity, 10, 100,
        value=value, kept=kept, reason=reason
    )


def test_empty_release_has_headers_only(tmp_path, hierarchy):
    dropped = [metric("Clark", "fever", 3, kept=False, reason="ci_too_wide")]
    paths = emit_dataset(GranularityPlan(), dropped, hierarchy, tmp_path)

    assert (tmp_path / "data.csv").read_text(encoding="utf-8") == "period_start,granularity,level,region_id,symptom,value\n"
    assert (tmp_path / "diagnostics.csv").read_text(encoding="utf-8").splitlines() == [
        "period_start,level,region_id,symptom,reason",
        "2020-06-03,2,Clark,fever,ci_too_wide",
    ]
    assert set(paths) == {"data.csv", "diagnostics.csv", "plan.csv"}


def test_rows_sorted_and_rounded(tmp_path, hierarchy):
    plan = GranularityPlan()
    plan.add_daily("fever", "Clark")
    plan.add_daily("cough", "Clark")
    plan.assignment[("fever", "SantaClara")] = WEEKLY
    metrics = [
        metric("SantaClara", "fever", 1, value=12.346, granularity=WEEKLY),
        metric("Clark", "fever", 4, value=100.0),
        metric("Clark", "fever", 3, value=33.3333),
        metric("Clark", "cough", 3, value=0.004),
    ]
    emit_dataset(plan, metrics, hierarchy, tmp_path)

    assert (tmp_path / "data.csv").read_text(encoding="utf-8").splitlines()[1:] == [
        "2020-06-03,daily,2,Clark,cough,0.00",
        "2020-06-03,daily,2,Clark,fever,33.33",
        "2020-06-04,daily,2,Clark,fever,100.00",
        "2020-06-01,weekly,2,SantaClara,fever,12.35",
    ]
    assert (tmp_path / "plan.csv").read_text(encoding="utf-8").splitlines() == [
        "symptom,region_id,granularity",
        "cough,Clark,daily",
        "fever,Clark,daily",
        "fever,SantaClara,weekly",
    ]
