#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Laplace noise parameters and reproducible noise streams

Main features:
- Published per-level epsilon shares and the derived Laplace scales
- Inverse-CDF Laplace sampling from uniforms in (-1/2, 1/2)
- Keyed noise slots: one draw per (master seed, table, key), independent
  of evaluation order
- Vectorized noise blocks for Monte Carlo checks

Floating-point inverse-CDF sampling is used on purpose at this scale; it is
not hardened against floating-point side channels (no snapping, no
geometric sampling).
"""

import logging
import math
from typing import Dict, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..pipeline.aggregate import KINDS, NORMALIZATION, SYMPTOM
from ..pipeline.ingest import LEVELS
from ..utils.hash_utils import keyed_seed, keyed_uint52

# Logger configuration
logger = logging.getLogger("TrendsNoise")

SYMPTOM_EPSILON = {0: 0.168, 1: 0.37, 2: 1.1}
NORMALIZATION_EPSILON = {0: 0.0023, 1: 0.0047, 2: 0.014}
SENSITIVITY = {SYMPTOM: 3.0, NORMALIZATION: 1.0}

_TWO_52 = float(2 ** 52)


class EpsilonShares(BaseModel):
    """Epsilon share per level for each count kind (defaults: published constants)"""
    model_config = ConfigDict(frozen=True)

    symptom: Dict[int, float] = Field(default_factory=lambda: dict(SYMPTOM_EPSILON))
    normalization: Dict[int, float] = Field(default_factory=lambda: dict(NORMALIZATION_EPSILON))

    @field_validator('symptom', 'normalization')
    @classmethod
    def shares_must_be_valid(cls, v):
        if set(v) != set(LEVELS):
            raise ValueError(f'Epsilon shares must cover levels {LEVELS}, got {sorted(v)}')
        for level, epsilon in v.items():
            if not epsilon > 0:
                raise ValueError(f'Epsilon share of level {level} must be positive, got {epsilon}')
        return v

    def share(self, level: int, kind: str) -> float:
        return (self.symptom if kind == SYMPTOM else self.normalization)[level]

    def is_published(self) -> bool:
        """True if the shares equal the published constants"""
        return self.symptom == SYMPTOM_EPSILON and self.normalization == NORMALIZATION_EPSILON


class NoiseParams(BaseModel):
    """Laplace parameters of one (level, kind) count table"""
    model_config = ConfigDict(frozen=True)

    level: int
    kind: str
    epsilon_share: float
    sensitivity: float

    @property
    def scale_b(self) -> float:
        return self.sensitivity / self.epsilon_share

    @property
    def sigma(self) -> float:
        return math.sqrt(2.0) * self.scale_b


def noise_params(level: int, kind: str, shares: Optional[EpsilonShares] = None) -> NoiseParams:
    """
    Noise parameters of a (level, kind) table.

    b is derived as sensitivity / epsilon from the stored epsilon shares,
    never stored rounded.

    Args:
        level: Geographic level 0-2
        kind: SYMPTOM or NORMALIZATION
        shares: Epsilon overrides (published constants if None)

    Returns:
        NoiseParams: The parameters

    Raises:
        ValueError: On an unknown level or kind
    """
    if level not in LEVELS:
        raise ValueError(f"Unknown level: {level}")
    if kind not in KINDS:
        raise ValueError(f"Unknown count kind: {kind}")
    shares = shares or EpsilonShares()
    return NoiseParams(level=level, kind=kind, epsilon_share=shares.share(level, kind), sensitivity=SENSITIVITY[kind])


def laplace_from_uniform(u: float, scale_b: float) -> float:
    """
    Inverse CDF of Laplace(0, b) at u in (-1/2, 1/2): -b * sgn(u) * ln(1 - 2|u|).

    Raises:
        ValueError: If scale_b is not positive
    """
    if not scale_b > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale_b}")
    if u == 0:
        return 0.0
    return -scale_b * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


class NoiseStream:
    """
    Deterministic source of uniforms derived from a master seed.

    Keyed slots hash (seed, table label, key) so every cell gets the same
    draw whatever the iteration order or worker count. Blocks seed a numpy
    generator from (seed, label, size) for vectorized Monte Carlo work.
    """

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def uniform(self, table_label: str, key_token: str) -> float:
        """Uniform in the open interval (-1/2, 1/2) for one slot"""
        return (keyed_uint52(self.master_seed, table_label, key_token) + 0.5) / _TWO_52 - 0.5

    def uniform_block(self, label: str, size: int) -> np.ndarray:
        """size uniforms in (-1/2, 1/2) for a labelled block"""
        rng = np.random.default_rng(keyed_seed(self.master_seed, label, size))
        draws = rng.integers(0, 2 ** 52, size=size, dtype=np.int64)
        return (draws.astype(np.float64) + 0.5) / _TWO_52 - 0.5

    def laplace_block(self, label: str, size: int, scale_b: float) -> np.ndarray:
        """
        size Laplace(0, b) draws for a labelled block.

        Raises:
            ValueError: If scale_b is not positive
        """
        if not scale_b > 0:
            raise ValueError(f"Laplace scale must be positive, got {scale_b}")
        u = self.uniform_block(label, size)
        return -scale_b * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def sample_laplace(scale_b: float, stream: NoiseStream, table_label: str, key_token: str) -> float:
    """
    One Laplace(0, b) draw from a keyed stream slot.

    Args:
        scale_b: Laplace scale b > 0
        stream: Noise stream
        table_label: Identity of the table the cell belongs to
        key_token: CountKey.token() of the cell

    Returns:
        float: The draw; equal across runs for equal arguments
    """
    if not scale_b > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale_b}")
    return laplace_from_uniform(stream.uniform(table_label, key_token), scale_b)


def all_noise_params(shares: Optional[EpsilonShares] = None, levels: Iterable[int] = LEVELS):
    """NoiseParams of every (kind, level) pair, symptom tables first"""
    return [noise_params(level, kind, shares) for kind in KINDS for level in levels]
