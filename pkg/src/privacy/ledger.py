#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module providing the privacy budget ledger

This module includes the following features:
- Charging epsilon once per released table group (basic composition, delta = 0)
- Rejecting double noising and daily+weekly releases of one symptom series
- Budget reports with per-kind subtotals and shares
- Ledger persistence (JSON and CSV) and reloading
"""

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from pydantic import BaseModel

from ..errors import BudgetError, InvariantError
from ..pipeline.aggregate import DAILY, GRANULARITIES, NORMALIZATION, SYMPTOM, CountTable
from ..pipeline.ingest import LEVELS
from ..utils import file_utils
from .noise import EpsilonShares, NoiseParams, noise_params

# Logger configuration
logger = logging.getLogger("TrendsLedger")

LEDGER_CSV_HEADER = ("entry", "epsilon")
LEDGER_VERSION = "1.0.0"
TOTAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LedgerEntry:
    """One epsilon charge"""
    group: str
    description: str
    kind: str
    level: int
    epsilon: float


class BudgetReport(BaseModel):
    """Summary of a ledger"""
    entries: List[Tuple[str, float]]
    symptom_total: float
    normalization_total: float
    total: float
    symptom_share: float
    normalization_share: float
    delta: float = 0.0


def _charge_group(params: NoiseParams, granularity: str) -> Tuple[str, str]:
    """
    Group under which a table is charged, and its description.

    Symptom tables of one level share a single charge for daily and weekly
    releases: each series is released at exactly one granularity, so one
    user-day still touches at most three released cells per level.
    Normalization tables are charged per granularity, both are released.
    """
    if params.kind == SYMPTOM:
        return (f"symptom/level{params.level}", f"symptom counts level {params.level} (daily or weekly per series)")
    return (
        f"normalization/{granularity}/level{params.level}",
        f"normalization counts level {params.level} {granularity}"
    )


class BudgetLedger:
    """
    Single-writer accumulator of epsilon charges, appended to once per
    table (or series slice), never per cell.
    """

    def __init__(self):
        self.entries: List[LedgerEntry] = []
        self.delta = 0.0
        self._groups: Dict[str, float] = {}
        self._noised_tables: Set[str] = set()
        self._series_claims: Dict[Tuple[int, str, str], str] = {}

    @property
    def total(self) -> float:
        return math.fsum(entry.epsilon for entry in self.entries)

    def subtotal(self, kind: str) -> float:
        return math.fsum(entry.epsilon for entry in self.entries if entry.kind == kind)

    def series_granularity(self, level: int, symptom: str, region: str) -> Optional[str]:
        """Granularity under which a symptom series was released, None if not yet"""
        return self._series_claims.get((level, symptom, region))

    def charge_table(self, table: CountTable, params: NoiseParams) -> None:
        """
        Charge the noising of a raw table.

        Args:
            table: Raw table (full table or one series slice) about to be noised
            params: Its noise parameters

        Raises:
            InvariantError: If the table was already noised
            BudgetError: If a symptom series is released at both granularities,
                or a group is charged twice with different epsilons
        """
        if table.table_id in self._noised_tables:
            raise InvariantError(f"Table {table.table_id} is already noised")

        if params.kind == SYMPTOM:
            for symptom, region in table.series_ids():
                claimed = self._series_claims.get((table.level, symptom, region))
                if claimed is not None and claimed != table.granularity:
                    raise BudgetError(
                        f"Symptom series {symptom}/{region} at level {table.level} already released {claimed}; "
                        f"refusing {table.granularity} noise"
                    )

        group, description = _charge_group(params, table.granularity)
        charged = self._groups.get(group)
        if charged is None:
            self._groups[group] = params.epsilon_share
            self.entries.append(LedgerEntry(group, description, params.kind, params.level, params.epsilon_share))
            logger.info(f"Charged epsilon {params.epsilon_share} for {description} (total {self.total:.6f})")
        elif charged != params.epsilon_share:
            raise BudgetError(f"Group {group} already charged {charged}, got {params.epsilon_share}")

        if params.kind == SYMPTOM:
            for symptom, region in table.series_ids():
                self._series_claims[(table.level, symptom, region)] = table.granularity
        self._noised_tables.add(table.table_id)

    @classmethod
    def planned(cls, shares: Optional[EpsilonShares] = None, levels: Iterable[int] = LEVELS) -> "BudgetLedger":
        """
        The ledger a run over the given levels produces. Charges do not
        depend on data, only on which tables are released.
        """
        ledger = cls()
        for level in levels:
            params = noise_params(level, SYMPTOM, shares)
            group, description = _charge_group(params, DAILY)
            ledger._groups[group] = params.epsilon_share
            ledger.entries.append(LedgerEntry(group, description, SYMPTOM, level, params.epsilon_share))
        for granularity in GRANULARITIES:
            for level in levels:
                params = noise_params(level, NORMALIZATION, shares)
                group, description = _charge_group(params, granularity)
                ledger._groups[group] = params.epsilon_share
                ledger.entries.append(LedgerEntry(group, description, NORMALIZATION, level, params.epsilon_share))
        return ledger

    def rows(self) -> List[Tuple[str, str]]:
        """CSV rows (entry, epsilon) including the TOTAL row"""
        rows = [(entry.description, repr(entry.epsilon)) for entry in self.entries]
        rows.append(("TOTAL", f"{self.total:.12g}"))
        return rows

    def to_dict(self) -> Dict:
        return {
            "version": LEDGER_VERSION,
            "entries": [asdict(entry) for entry in self.entries],
            "total": self.total,
            "delta": self.delta
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BudgetLedger":
        ledger = cls()
        for item in data.get("entries", []):
            entry = LedgerEntry(**item)
            ledger.entries.append(entry)
            ledger._groups[entry.group] = entry.epsilon
        return ledger

    def save(self, output_dir: Union[str, Path]) -> List[str]:
        """Write ledger.json and ledger.csv; return their paths"""
        output_dir = Path(output_dir)
        return [
            file_utils.save_json(output_dir / "ledger.json", self.to_dict()),
            file_utils.write_csv(output_dir / "ledger.csv", LEDGER_CSV_HEADER, self.rows())
        ]


def load_ledger(path: Union[str, Path]) -> Optional[BudgetLedger]:
    """Load a ledger.json written by BudgetLedger.save, None if absent"""
    data = file_utils.load_json(path)
    return BudgetLedger.from_dict(data) if data is not None else None


def expected_total(shares: Optional[EpsilonShares] = None, levels: Iterable[int] = LEVELS) -> float:
    """Epsilon of a run: symptom shares once, normalization shares for daily and weekly"""
    shares = shares or EpsilonShares()
    levels = list(levels)
    return math.fsum(
        [shares.symptom[level] for level in levels] + [2.0 * shares.normalization[level] for level in levels]
    )


def ledger_report(ledger: BudgetLedger, expected: Optional[float] = None) -> BudgetReport:
    """
    Summarize a ledger.

    Args:
        ledger: Completed ledger
        expected: Total the run must reach (1.68 for a full run with the
            published constants); None skips the check

    Returns:
        BudgetReport: Subtotals, total, shares and delta

    Raises:
        BudgetError: If the total differs from expected by more than 1e-9
    """
    total = ledger.total
    if expected is not None and abs(total - expected) > TOTAL_TOLERANCE:
        raise BudgetError(f"Ledger total {total!r} differs from expected {expected!r}")

    symptom_total = ledger.subtotal(SYMPTOM)
    normalization_total = ledger.subtotal(NORMALIZATION)
    return BudgetReport(
        entries=[(entry.description, entry.epsilon) for entry in ledger.entries],
        symptom_total=symptom_total,
        normalization_total=normalization_total,
        total=total,
        symptom_share=symptom_total / total if total > 0 else 0.0,
        normalization_share=normalization_total / total if total > 0 else 0.0,
        delta=ledger.delta
    )
