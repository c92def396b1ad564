"""Shared fixtures: the bundled one-user-day fixture and small hand-made inputs"""

from pathlib import Path

import pendulum
import pytest

from src.cli.synth import PopulationParams, cmd_synth
from src.pipeline.aggregate import Keyspace
from src.pipeline.ingest import (
    SearchEvent, load_events, load_region_hierarchy, load_symptom_lexicon
)

FIXTURE_DIR = Path(__file__).parent.parent / "src" / "fixtures" / "one_user_day"
JUNE_3 = pendulum.Date(2020, 6, 3)


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR


@pytest.fixture
def hierarchy():
    return load_region_hierarchy(FIXTURE_DIR / "hierarchy.csv")


@pytest.fixture
def lexicon():
    return load_symptom_lexicon(FIXTURE_DIR / "lexicon.csv")


@pytest.fixture
def day_events(hierarchy, lexicon):
    return load_events(FIXTURE_DIR / "log.csv", lexicon, hierarchy)


@pytest.fixture
def keyspace(hierarchy, lexicon):
    return Keyspace.build("2020-06-01", "2020-06-14", lexicon.symptoms, hierarchy)


@pytest.fixture
def event():
    """Factory for search events on 2020-06-03"""
    def make(user="u1", region="Clark", symptom="fever", day=JUNE_3):
        return SearchEvent(user=user, date=day, region2=region, symptom=symptom)
    return make


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory):
    """A small synthetic dataset with its config.json"""
    directory = tmp_path_factory.mktemp("desk")
    cmd_synth(directory, PopulationParams(users=40, days=21, seed=7))
    return directory
