import pendulum
import pytest

from conftest import write
from src.errors import InputError, KeyspaceError
from src.pipeline.ingest import (
    classify_and_stream, load_region_hierarchy, load_symptom_lexicon, normalize_query
)

HIERARCHY = "region_id,level,parent_id\n"


def test_reference_hierarchy_chain(hierarchy):
    assert hierarchy.chain("Clark") == ("US", "Nevada", "Clark")
    assert hierarchy.regions_at(1) == ["California", "Nevada"]
    assert hierarchy.level0_ancestor("SantaClara") == "US"


def test_ancestor_below_own_level_is_rejected(hierarchy):
    with pytest.raises(ValueError):
        hierarchy.ancestor_at("California", 2)


@pytest.mark.parametrize("rows, message", [
    ("US,0,\nCA,1,\nX,2,CA\n", "orphan region CA"),
    ("US,0,\nCA,1,US\nX,2,Nowhere\n", "parent Nowhere is not defined"),
    ("US,0,\nA,1,B\nB,1,A\n", "cycle detected"),
    ("US,0,\nX,2,US\n", "has parent US at level 0"),
    ("US,0,\nUS,0,\n", "duplicate region US"),
    ("US,3,\n", "not in 0-2"),
    ("US,zero,\n", "invalid level"),
    ("US,0,World\nWorld,0,\n", "must not have a parent"),
])
def test_invalid_hierarchies(tmp_path, rows, message):
    path = write(tmp_path / "hierarchy.csv", HIERARCHY + rows)
    with pytest.raises(InputError, match=message):
        load_region_hierarchy(path)


def test_hierarchy_header_is_checked(tmp_path):
    path = write(tmp_path / "hierarchy.csv", "id,level,parent\nUS,0,\n")
    with pytest.raises(InputError, match="expected header"):
        load_region_hierarchy(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_region_hierarchy(tmp_path / "absent.csv")


def test_normalize_query():
    assert normalize_query("  High   TEMPERATURE ") == "high temperature"


def test_lexicon_symptom_order_and_classification(lexicon):
    assert lexicon.symptoms == ("fever", "cough")
    assert lexicon.classify("High Temperature") == "fever"
    assert lexicon.classify("weather") is None


def test_conflicting_lexicon_entry(tmp_path):
    path = write(tmp_path / "lexicon.csv", "query,symptom\nfever,fever\nFever,cough\n")
    with pytest.raises(InputError, match="maps to both"):
        load_symptom_lexicon(path)


def test_reference_stream(day_events):
    assert len(day_events) == 5
    assert {e.user for e in day_events} == {"u1"}
    assert all(e.date == pendulum.Date(2020, 6, 3) for e in day_events)
    assert [e.symptom for e in day_events] == ["fever", "fever", "fever", "fever", "cough"]


def test_unmatched_query_yields_event_without_symptom(tmp_path, hierarchy, lexicon):
    path = write(tmp_path / "log.csv", "user_id,date,region_id,query\nu1,2020-06-03,Clark,weather\n")
    (event,) = list(classify_and_stream(path, lexicon, hierarchy))
    assert event.symptom is None
    assert event.region2 == "Clark"


def test_unknown_region_is_a_keyspace_error(tmp_path, hierarchy, lexicon):
    path = write(tmp_path / "log.csv", "user_id,date,region_id,query\nu1,2020-06-03,Atlantis,fever\n")
    with pytest.raises(KeyspaceError, match="Atlantis"):
        list(classify_and_stream(path, lexicon, hierarchy))


def test_non_county_region_is_a_keyspace_error(tmp_path, hierarchy, lexicon):
    path = write(tmp_path / "log.csv", "user_id,date,region_id,query\nu1,2020-06-03,Nevada,fever\n")
    with pytest.raises(KeyspaceError):
        list(classify_and_stream(path, lexicon, hierarchy))


@pytest.mark.parametrize("row, message", [
    ("u1,2020-13-03,Clark,fever", "log row 2: invalid date"),
    (",2020-06-03,Clark,fever", "log row 2: empty user_id"),
    ("u1,2020-06-03,Clark", "malformed row 2"),
])
def test_malformed_rows_report_row_number(tmp_path, hierarchy, lexicon, row, message):
    text = "user_id,date,region_id,query\nu1,2020-06-03,Clark,fever\n" + row + "\n"
    path = write(tmp_path / "log.csv", text)
    with pytest.raises(InputError, match=message):
        list(classify_and_stream(path, lexicon, hierarchy))
