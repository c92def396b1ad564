"""
Pipeline configuration

Main features:
- One JSON file describing inputs, dates, seed, epsilon shares and
  granularity parameters, validated with pydantic
- Relative paths resolved against the config file's directory
- Command-line overrides
- A canonical config hash recorded with every output
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pendulum
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import InputError
from ..pipeline.ingest import LEVELS
from ..privacy.noise import EpsilonShares
from ..report.granularity import GranularityParams
from ..utils import file_utils
from ..utils.date_utils import parse_day
from ..utils.hash_utils import calculate_config_hash

# Logger configuration
logger = logging.getLogger("TrendsConfig")

CONFIG_FILE = "config.json"
DISCARD_POLICIES = ("first-in-log-order", "random")


class DateRange(BaseModel):
    """Inclusive range of ISO calendar days"""
    model_config = ConfigDict(frozen=True)

    start: str
    end: str

    @field_validator('start', 'end')
    @classmethod
    def must_be_day(cls, v):
        parse_day(v)
        return v

    @model_validator(mode='after')
    def start_before_end(self):
        if parse_day(self.end) < parse_day(self.start):
            raise ValueError(f'end {self.end} is before start {self.start}')
        return self

    @property
    def first(self) -> pendulum.Date:
        return parse_day(self.start)

    @property
    def last(self) -> pendulum.Date:
        return parse_day(self.end)


class PipelineConfig(BaseModel):
    """Everything a run depends on; equal configs give equal outputs"""
    model_config = ConfigDict(frozen=True)

    hierarchy_path: Path
    lexicon_path: Path
    log_path: Path
    date_range: DateRange
    sample_period: Optional[DateRange] = None
    calibration_window: Optional[DateRange] = None
    master_seed: int = 0
    output_dir: Path = Path("out")
    epsilon: EpsilonShares = Field(default_factory=EpsilonShares)
    granularity: GranularityParams = Field(default_factory=GranularityParams)
    levels: List[int] = Field(default_factory=lambda: list(LEVELS))
    discard_policy: str = "first-in-log-order"
    scaling_path: Optional[Path] = None
    workers: int = 1
    debug_unsafe: bool = False

    @field_validator('levels')
    @classmethod
    def levels_must_be_known(cls, v):
        if not v:
            raise ValueError('levels must not be empty')
        unknown = [level for level in v if level not in LEVELS]
        if unknown:
            raise ValueError(f'Unknown levels {unknown}; valid levels are {list(LEVELS)}')
        return sorted(set(v))

    @field_validator('discard_policy')
    @classmethod
    def policy_must_be_known(cls, v):
        if v not in DISCARD_POLICIES:
            raise ValueError(f'discard_policy must be one of {DISCARD_POLICIES}, got {v!r}')
        return v

    @field_validator('workers')
    @classmethod
    def workers_must_be_positive(cls, v):
        if v < 1:
            raise ValueError(f'workers must be at least 1, got {v}')
        return v

    @property
    def effective_sample_period(self) -> DateRange:
        return self.sample_period or self.date_range

    @property
    def effective_calibration_window(self) -> DateRange:
        return self.calibration_window or self.effective_sample_period


def _resolve(base: Path, value: Any) -> Any:
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    """
    Load and validate a config file.

    Args:
        path: JSON config file
        overrides: Field values replacing those of the file (None values are ignored)

    Returns:
        PipelineConfig: Validated config with absolute paths

    Raises:
        InputError: If the file is missing, not JSON or fails validation
    """
    path = Path(path)
    data = file_utils.load_json(path)
    if data is None:
        raise InputError(f"Config file not found: {path}")
    if not isinstance(data, dict):
        raise InputError(f"{path.name}: expected a JSON object")

    base = path.parent.absolute()
    for field_name in ("hierarchy_path", "lexicon_path", "log_path", "output_dir", "scaling_path"):
        if field_name in data:
            data[field_name] = _resolve(base, data[field_name])

    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    try:
        config = PipelineConfig(**data)
    except ValidationError as e:
        raise InputError(f"{path.name}: invalid config: {e}") from e

    logger.debug(f"Loaded config {path} (hash {config_hash(config)})")
    return config


def config_to_dict(config: PipelineConfig) -> Dict[str, Any]:
    """JSON-compatible echo of a config"""
    return config.model_dump(mode="json")


def config_hash(config: PipelineConfig) -> str:
    """xxh3_64 of the canonical config echo"""
    return calculate_config_hash(config_to_dict(config))


def save_config(config: PipelineConfig, path: Union[str, Path]) -> str:
    return file_utils.save_json(path, config_to_dict(config))
