"""
Adding Laplace noise to raw count tables

Every cell of the table's keyspace gets an independent draw, including
cells without user data, which is what keeps delta at 0.
"""

import logging
from typing import Optional

from ..errors import InvariantError
from ..pipeline.aggregate import CountTable
from .ledger import BudgetLedger
from .noise import NoiseParams, NoiseStream, sample_laplace

# Logger configuration
logger = logging.getLogger("TrendsAnonymize")


def noise_label(table: CountTable) -> str:
    """Label keying the noise of a table's cells; shared by a table and its series slices"""
    return f"{table.kind}/{table.granularity}/level{table.level}"


def anonymize_table(
    raw: CountTable,
    params: NoiseParams,
    stream: NoiseStream,
    ledger: Optional[BudgetLedger] = None
) -> CountTable:
    """
    Noise every cell of a raw table with Laplace(0, params.scale_b).

    Args:
        raw: Raw (pre-noise) table or series slice
        params: Noise parameters matching the table's level and kind
        stream: Keyed noise stream
        ledger: Ledger charged before any noise is drawn

    Returns:
        CountTable: Noisy table with the same keyspace and table id

    Raises:
        InvariantError: If the table is already noisy or params do not match it
        BudgetError: If the ledger refuses the charge
    """
    if raw.noisy:
        raise InvariantError(f"Table {raw.table_id} is already noisy")
    if (params.level, params.kind) != (raw.level, raw.kind):
        raise InvariantError(
            f"Noise parameters for level {params.level} {params.kind} do not match table {raw.table_id}"
        )

    if ledger is not None:
        ledger.charge_table(raw, params)

    label = noise_label(raw)
    scale_b = params.scale_b
    values = {
        key: value + sample_laplace(scale_b, stream, label, key.token())
        for key, value in raw.values.items()
    }
    logger.debug(f"Noised {raw.table_id}: {len(values)} cells, b={scale_b:.3f}")
    return CountTable(raw.kind, raw.granularity, raw.level, values, noisy=True, table_id=raw.table_id)
