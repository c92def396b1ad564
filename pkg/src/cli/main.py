"""
Command-line entry point

    python -m src.cli synth --users N --days N --seed S [--output DIR]
    python -m src.cli run --config PATH [--seed S] [--levels L,...] [--debug-unsafe]
    python -m src.cli verify --config PATH
    python -m src.cli budget-report --config PATH [--summary]

Exit codes: 0 success, 1 input error, 2 invariant or verification failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from ..errors import InputError, TrendsError
from ..verify.suite import format_report
from .config import load_config
from .runner import cmd_budget_report, cmd_run, cmd_verify
from .synth import PopulationParams, cmd_synth

# Logger configuration
logger = logging.getLogger("TrendsCLI")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2


def _parse_levels(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symptom-trends", description="Anonymized symptom search trends")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="Generate a synthetic desk-scale dataset")
    synth.add_argument("--users", type=int, default=100)
    synth.add_argument("--days", type=int, default=90)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--start", default="2020-02-03", help="First day (YYYY-MM-DD)")
    synth.add_argument("--symptom-propensity", type=float, default=0.3)
    synth.add_argument("--queries-per-day", type=float, default=4.0)
    synth.add_argument("--output", default="synth", help="Output directory")

    run = commands.add_parser("run", help="Run the pipeline")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--levels", type=_parse_levels)
    run.add_argument("--workers", type=int)
    run.add_argument("--output", help="Output directory (overrides the config)")
    run.add_argument("--debug-unsafe", action="store_true", help="Also dump per-user contributions and raw counts")

    verify = commands.add_parser("verify", help="Run the verification suite")
    verify.add_argument("--config", required=True)
    verify.add_argument("--progress", action="store_true")

    budget = commands.add_parser("budget-report", help="Print the privacy budget of a config")
    budget.add_argument("--config", required=True)
    budget.add_argument("--summary", action="store_true", help="Append subtotals and shares after the CSV")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        if args.command == "synth":
            try:
                params = PopulationParams(
                    users=args.users,
                    days=args.days,
                    seed=args.seed,
                    start=args.start,
                    symptom_propensity=args.symptom_propensity,
                    queries_per_day=args.queries_per_day
                )
            except ValueError as e:
                raise InputError(f"invalid population parameters: {e}") from e
            for name, path in cmd_synth(args.output, params).items():
                print(f"{name}: {path}")
            return EXIT_OK

        if args.command == "run":
            overrides = {
                "master_seed": args.seed,
                "levels": args.levels,
                "workers": args.workers,
                "output_dir": args.output,
                "debug_unsafe": True if args.debug_unsafe else None
            }
            result = cmd_run(load_config(args.config, overrides))
            for name, path in sorted(result.files.items()):
                print(f"{name}: {path}")
            print(f"epsilon: {result.ledger.total:.12g}")
            return EXIT_OK

        if args.command == "verify":
            report = cmd_verify(load_config(args.config), show_progress=args.progress)
            print(format_report(report))
            return EXIT_OK if report.passed else EXIT_INVARIANT

        if args.command == "budget-report":
            print(cmd_budget_report(load_config(args.config), summary=args.summary), end="")
            return EXIT_OK

    except TrendsError as e:
        where = f" in stage {e.stage}" if e.stage else ""
        logger.error(f"{type(e).__name__}{where}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT

    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
