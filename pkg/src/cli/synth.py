"""
Synthetic query logs for desk-scale runs

Main features:
- A default hierarchy (one country, two states, four counties) and a
  ten-symptom lexicon with several surface forms per symptom
- Seeded generation of users, daily activity and queries
- A ready-to-run config.json next to the generated files
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from ..pipeline.ingest import HIERARCHY_HEADER, LEXICON_HEADER, LOG_HEADER
from ..utils import file_utils
from ..utils.date_utils import parse_day

# Logger configuration
logger = logging.getLogger("TrendsSynth")

DEFAULT_HIERARCHY: Tuple[Tuple[str, int, str], ...] = (
    ("US", 0, ""),
    ("California", 1, "US"),
    ("Nevada", 1, "US"),
    ("SantaClara", 2, "California"),
    ("SanBernardino", 2, "California"),
    ("Clark", 2, "Nevada"),
    ("Washoe", 2, "Nevada"),
)

DEFAULT_LEXICON: Dict[str, Tuple[str, ...]] = {
    "fever": ("fever", "high temperature", "feverish"),
    "cough": ("cough", "dry cough", "coughing"),
    "fatigue": ("fatigue", "always tired"),
    "headache": ("headache", "head pain"),
    "sore_throat": ("sore throat", "throat pain"),
    "anosmia": ("loss of smell", "cannot smell"),
    "shortness_of_breath": ("shortness of breath", "hard to breathe"),
    "nausea": ("nausea", "feel sick"),
    "chills": ("chills", "shivering"),
    "muscle_pain": ("muscle pain", "body aches"),
}

FILLER_QUERIES = (
    "weather tomorrow", "news", "pizza near me", "football scores", "movie times",
    "bus schedule", "recipes", "translate", "stock prices", "maps"
)

# Relative frequency of each symptom among symptom queries
SYMPTOM_WEIGHTS = (0.18, 0.16, 0.12, 0.12, 0.1, 0.06, 0.06, 0.08, 0.06, 0.06)


class PopulationParams(BaseModel):
    """Shape of the generated population"""
    model_config = ConfigDict(frozen=True)

    users: int = 100
    days: int = 90
    start: str = "2020-02-03"
    seed: int = 0
    queries_per_day: float = 4.0
    symptom_propensity: float = 0.3
    daily_activity: float = 0.7
    travel_rate: float = 0.05

    @field_validator('users', 'days')
    @classmethod
    def must_be_positive(cls, v):
        if v < 1:
            raise ValueError(f'must be at least 1, got {v}')
        return v

    @field_validator('symptom_propensity', 'daily_activity', 'travel_rate')
    @classmethod
    def must_be_probability(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f'must be in [0, 1], got {v}')
        return v

    @field_validator('queries_per_day')
    @classmethod
    def rate_must_be_non_negative(cls, v):
        if v < 0:
            raise ValueError(f'must be non-negative, got {v}')
        return v


def generate_log_rows(
    params: PopulationParams,
    counties: Sequence[str],
    lexicon: Dict[str, Tuple[str, ...]] = DEFAULT_LEXICON
) -> List[Tuple[str, str, str, str]]:
    """
    Log rows (user_id, date, region_id, query), grouped by day then user.

    Every active user-day has at least one query. Users live in one county
    and occasionally search from another one.
    """
    rng = np.random.default_rng(params.seed)
    symptoms = list(lexicon)
    weights = np.asarray(SYMPTOM_WEIGHTS[:len(symptoms)], dtype=np.float64)
    weights = weights / weights.sum()

    width = len(str(params.users - 1))
    users = [f"user{i:0{width}d}" for i in range(params.users)]
    home = rng.integers(0, len(counties), size=params.users)

    first = parse_day(params.start)
    rows = []
    for offset in range(params.days):
        day = first.add(days=offset).isoformat()
        active = rng.random(params.users) < params.daily_activity
        for index in np.flatnonzero(active):
            for _ in range(1 + int(rng.poisson(params.queries_per_day))):
                county = counties[home[index]]
                if rng.random() < params.travel_rate:
                    county = counties[int(rng.integers(0, len(counties)))]
                if rng.random() < params.symptom_propensity:
                    forms = lexicon[symptoms[int(rng.choice(len(symptoms), p=weights))]]
                    query = forms[int(rng.integers(0, len(forms)))]
                else:
                    query = FILLER_QUERIES[int(rng.integers(0, len(FILLER_QUERIES)))]
                rows.append((users[index], day, county, query))
    return rows


def cmd_synth(output_dir: Union[str, Path], params: Optional[PopulationParams] = None) -> Dict[str, str]:
    """
    Write hierarchy.csv, lexicon.csv, log.csv and config.json.

    Args:
        output_dir: Destination directory
        params: Population parameters (defaults: 100 users x 90 days)

    Returns:
        Dict[str, str]: File name -> absolute path
    """
    params = params or PopulationParams()
    output_dir = file_utils.ensure_directory(output_dir)
    counties = [region for region, level, _ in DEFAULT_HIERARCHY if level == 2]

    rows = generate_log_rows(params, counties)
    last = parse_day(params.start).add(days=params.days - 1).isoformat()

    paths = {
        "hierarchy.csv": file_utils.write_csv(output_dir / "hierarchy.csv", HIERARCHY_HEADER, DEFAULT_HIERARCHY),
        "lexicon.csv": file_utils.write_csv(
            output_dir / "lexicon.csv",
            LEXICON_HEADER,
            [(form, symptom) for symptom, forms in DEFAULT_LEXICON.items() for form in forms]
        ),
        "log.csv": file_utils.write_csv(output_dir / "log.csv", LOG_HEADER, rows),
    }
    paths["config.json"] = file_utils.save_json(output_dir / "config.json", {
        "hierarchy_path": "hierarchy.csv",
        "lexicon_path": "lexicon.csv",
        "log_path": "log.csv",
        "date_range": {"start": params.start, "end": last},
        "master_seed": params.seed,
        "output_dir": "out"
    })
    logger.info(f"Generated {len(rows)} log rows for {params.users} users over {params.days} days")
    return paths
