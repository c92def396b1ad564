#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Module running the pipeline end to end

This module includes the following features:
- ingest -> bounding -> aggregate -> anonymize -> report, stage by stage
- Series-level noising driven by the granularity walk
- Per-region scaling, dataset emission, ledger and scaling files
- Run metadata: config echo and hash, epsilon constants, output digests
- Budget reports and the verification command

Raw per-user data never leaves this module except through the debug dumps,
which are only written when debug_unsafe is set.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from ..errors import TrendsError
from ..pipeline.aggregate import (
    DAILY, GRANULARITIES, NORMALIZATION, SYMPTOM, WEEKLY, TABLE_DUMP_HEADER, CountKey, CountTable,
    Keyspace, aggregate_normalization_daily, aggregate_symptom_daily, sum_weekly, table_rows
)
from ..pipeline.bounding import (
    DEBUG_DUMP_HEADER, FIRST_IN_LOG_ORDER, RandomDiscardPolicy, bound_all, contribution_rows
)
from ..pipeline.ingest import (
    RegionHierarchy, load_events, load_region_hierarchy, load_symptom_lexicon
)
from ..privacy.anonymize import anonymize_table
from ..privacy.ledger import LEDGER_CSV_HEADER, BudgetLedger, expected_total, ledger_report
from ..privacy.noise import NoiseStream, noise_params
from ..report.granularity import GranularityPlan, decide_granularity, order_regions_by_activity
from ..report.metrics import MetricRecord, drop_fraction, filter_unreliable
from ..report.publish import emit_dataset
from ..report.scaling import apply_scaling, calibrate_all, load_scaling, save_scaling
from ..utils import file_utils
from ..utils.hash_utils import calculate_src_directory_hash, generate_file_hash
from ..verify.suite import LogUnderTest, run_suite
from .config import PipelineConfig, config_hash, config_to_dict

# Logger configuration
logger = logging.getLogger("TrendsRunner")

RUN_METADATA_FILE = "run_metadata.json"
SCALING_FILE = "scaling.json"
DEBUG_DIR = "debug"
FIXTURE_DIR = Path(__file__).parent.parent / "fixtures" / "one_user_day"

TableKey = Tuple[str, str, int]


@dataclass
class RunResult:
    output_dir: Path
    files: Dict[str, str]
    ledger: BudgetLedger
    plan: GranularityPlan
    metrics: List[MetricRecord]
    scaling: Dict[str, object] = field(default_factory=dict)
    config_hash: str = ""


@contextmanager
def stage(name: str):
    """Log stage boundaries and tag errors with the stage that raised them"""
    logger.info(f"Stage {name}")
    try:
        yield
    except TrendsError as e:
        if e.stage is None:
            e.stage = name
        logger.error(f"Stage {name} failed: {e}")
        raise


def _discard_policy(config: PipelineConfig):
    if config.discard_policy == "random":
        return RandomDiscardPolicy(config.master_seed)
    return FIRST_IN_LOG_ORDER


class SymptomRelease:
    """
    Noises symptom series one at a time and turns them into filtered
    metrics. Each series is noised at most once, at the granularity the
    walk assigns it.
    """

    def __init__(
        self,
        level: int,
        raw: Dict[TableKey, CountTable],
        noisy_normalization: Dict[TableKey, CountTable],
        config: PipelineConfig,
        stream: NoiseStream,
        ledger: BudgetLedger
    ):
        self.level = level
        self.raw = raw
        self.noisy_normalization = noisy_normalization
        self.stream = stream
        self.ledger = ledger
        self.symptom_params = noise_params(level, SYMPTOM, config.epsilon)
        self.b_B = noise_params(level, NORMALIZATION, config.epsilon).scale_b
        self.metrics: List[MetricRecord] = []

    def release(self, symptom: str, region: str, granularity: str) -> List[MetricRecord]:
        raw = self.raw[(SYMPTOM, granularity, self.level)].series(symptom, region)
        noisy = anonymize_table(raw, self.symptom_params, self.stream, self.ledger)
        normalization = self.noisy_normalization[(NORMALIZATION, granularity, self.level)]

        records = []
        for key, A in noisy.items():
            B = normalization[CountKey(key.period, None, key.region)]
            record = MetricRecord(key, self.level, granularity, A, B)
            records.append(filter_unreliable(record, self.symptom_params.scale_b, self.b_B))
        self.metrics.extend(records)
        return records


def _release_level(
    release: SymptomRelease,
    hierarchy: RegionHierarchy,
    symptoms,
    config: PipelineConfig,
    plan: GranularityPlan
) -> None:
    level = release.level
    if level == 0:
        for region in hierarchy.regions_at(0):
            for symptom in symptoms:
                release.release(symptom, region, DAILY)
                plan.add_daily(symptom, region)
        return

    sample = config.effective_sample_period
    noisy_daily = release.noisy_normalization[(NORMALIZATION, DAILY, level)]
    for country in hierarchy.regions_at(0):
        ordered = order_regions_by_activity(level, country, hierarchy, noisy_daily, sample.first, sample.last)
        for symptom in symptoms:
            def daily_drop_fraction(region: str, symptom=symptom) -> float:
                records = release.release(symptom, region, DAILY)
                return drop_fraction(records, sample.first, sample.last)

            walk = decide_granularity(symptom, ordered, daily_drop_fraction, config.granularity)
            for region, granularity in walk.assignments:
                if granularity == WEEKLY:
                    release.release(symptom, region, WEEKLY)
            plan.add_walk(walk)
            logger.debug(f"Level {level} {country} {symptom}: {walk.sequence()}")


def _write_debug_dumps(output_dir: Path, contributions, raw: Dict[TableKey, CountTable]) -> List[str]:
    debug_dir = file_utils.ensure_directory(output_dir / DEBUG_DIR)
    logger.warning(f"Writing unsafe debug dumps with user ids and raw counts to {debug_dir}")
    paths = [file_utils.write_csv(debug_dir / "contributions.csv", DEBUG_DUMP_HEADER, contribution_rows(contributions))]
    for (kind, granularity, level), table in sorted(raw.items()):
        paths.append(file_utils.write_csv(
            debug_dir / f"raw_{kind}_{granularity}_level{level}.csv", TABLE_DUMP_HEADER, table_rows(table)
        ))
    return paths


def cmd_run(config: PipelineConfig, bound_fn: Optional[Callable] = None) -> RunResult:
    """
    Run the pipeline and write every output file.

    Args:
        config: Validated pipeline config
        bound_fn: Replacement bounding function (tests only)

    Returns:
        RunResult: Output paths, ledger, plan and metrics

    Raises:
        TrendsError: From the failing stage; its stage attribute names it
    """
    output_dir = file_utils.ensure_directory(config.output_dir)
    digest = config_hash(config)
    logger.info(f"Run with config hash {digest}, levels {config.levels}")

    with stage("ingest"):
        hierarchy = load_region_hierarchy(config.hierarchy_path)
        lexicon = load_symptom_lexicon(config.lexicon_path)
        events = load_events(config.log_path, lexicon, hierarchy)

    with stage("bounding"):
        contributions = bound_all(events, hierarchy, _discard_policy(config), config.workers, bound_fn)

    with stage("aggregate"):
        keyspace = Keyspace.build(config.date_range.first, config.date_range.last, lexicon.symptoms, hierarchy)
        raw: Dict[TableKey, CountTable] = {}
        for level in config.levels:
            for kind, aggregate in ((SYMPTOM, aggregate_symptom_daily), (NORMALIZATION, aggregate_normalization_daily)):
                daily = aggregate(contributions, level, keyspace)
                raw[(kind, DAILY, level)] = daily
                raw[(kind, WEEKLY, level)] = sum_weekly(daily, keyspace)

    debug_files = _write_debug_dumps(output_dir, contributions, raw) if config.debug_unsafe else []
    del events, contributions

    stream = NoiseStream(config.master_seed)
    ledger = BudgetLedger()
    with stage("anonymize"):
        noisy_normalization = {}
        for granularity in GRANULARITIES:
            for level in config.levels:
                table_key = (NORMALIZATION, granularity, level)
                params = noise_params(level, NORMALIZATION, config.epsilon)
                noisy_normalization[table_key] = anonymize_table(raw[table_key], params, stream, ledger)

    plan = GranularityPlan()
    metrics: List[MetricRecord] = []
    with stage("report"):
        for level in config.levels:
            release = SymptomRelease(level, raw, noisy_normalization, config, stream, ledger)
            _release_level(release, hierarchy, lexicon.symptoms, config, plan)
            metrics.extend(release.metrics)

        window = config.effective_calibration_window
        stored = load_scaling(config.scaling_path) if config.scaling_path else {}
        regions = [region for level in config.levels for region in hierarchy.regions_at(level)]
        factors = calibrate_all(regions, metrics, window.first, window.last, stored)
        metrics = apply_scaling(metrics, factors)

    with stage("publish"):
        files = emit_dataset(plan, metrics, hierarchy, output_dir)
        for path in ledger.save(output_dir):
            files[Path(path).name] = path
        files[SCALING_FILE] = save_scaling(output_dir / SCALING_FILE, factors)

        expected = expected_total(config.epsilon, config.levels) if lexicon.symptoms else None
        budget = ledger_report(ledger, expected)
        files[RUN_METADATA_FILE] = _write_run_metadata(output_dir, config, digest, budget, files)

    logger.info(f"Run finished: epsilon {budget.total:.6g}, {len(files)} files in {output_dir}")
    for path in debug_files:
        files[f"{DEBUG_DIR}/{Path(path).name}"] = path
    return RunResult(output_dir, files, ledger, plan, metrics, factors, digest)


def _write_run_metadata(output_dir: Path, config: PipelineConfig, digest: str, budget, files: Dict[str, str]) -> str:
    source_hash, _ = calculate_src_directory_hash()
    metadata = {
        "config": config_to_dict(config),
        "config_hash": digest,
        "source_hash": source_hash,
        "master_seed": config.master_seed,
        "epsilon": {
            "symptom": config.epsilon.symptom,
            "normalization": config.epsilon.normalization,
            "published_constants": config.epsilon.is_published(),
            "scales": {
                f"{p.kind}/level{p.level}": p.scale_b
                for p in (noise_params(level, kind, config.epsilon) for kind in (SYMPTOM, NORMALIZATION) for level in config.levels)
            }
        },
        "budget": budget.model_dump(mode="json"),
        "files": {name: generate_file_hash(path) for name, path in sorted(files.items())}
    }
    return file_utils.save_json(output_dir / RUN_METADATA_FILE, metadata)


def format_budget_summary(budget) -> str:
    return "\n".join([
        f"{'symptom subtotal':<58} {budget.symptom_total:.6g} ({budget.symptom_share:.1%})",
        f"{'normalization subtotal':<58} {budget.normalization_total:.6g} ({budget.normalization_share:.1%})",
        f"{'total':<58} {budget.total:.6g} (delta = {budget.delta:g})"
    ])


def cmd_budget_report(config: PipelineConfig, summary: bool = False) -> str:
    """
    Ledger of the configured run as CSV `entry,epsilon` with a TOTAL row,
    built without reading any data: charges only depend on which tables are
    released.

    Args:
        config: Validated pipeline config
        summary: Append per-kind subtotals and shares after the CSV

    Returns:
        str: Text to print, ending with a newline
    """
    ledger = BudgetLedger.planned(config.epsilon, config.levels)
    budget = ledger_report(ledger, expected_total(config.epsilon, config.levels))
    text = file_utils.format_csv(LEDGER_CSV_HEADER, ledger.rows())
    if summary:
        text += "\n" + format_budget_summary(budget) + "\n"
    return text


def cmd_verify(config: PipelineConfig, bound_fn: Optional[Callable] = None, show_progress: bool = False):
    """
    Run the verification suite on the bundled fixture and on the configured
    log.

    Returns:
        VerificationReport: Outcomes; the caller maps failures to exit code 2
    """
    logs = []
    with stage("verify"):
        hierarchy = load_region_hierarchy(FIXTURE_DIR / "hierarchy.csv")
        lexicon = load_symptom_lexicon(FIXTURE_DIR / "lexicon.csv")
        events = load_events(FIXTURE_DIR / "log.csv", lexicon, hierarchy)
        logs.append(LogUnderTest("fixture", hierarchy, lexicon.symptoms, events))

        hierarchy = load_region_hierarchy(config.hierarchy_path)
        lexicon = load_symptom_lexicon(config.lexicon_path)
        events = load_events(config.log_path, lexicon, hierarchy)
        logs.append(LogUnderTest("log", hierarchy, lexicon.symptoms, events))

        return run_suite(
            logs,
            shares=config.epsilon,
            master_seed=config.master_seed,
            levels=config.levels,
            bound_fn=bound_fn,
            show_progress=show_progress
        )
