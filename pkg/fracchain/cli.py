#!/usr/bin/env python3
"""
Command-line entry point: run experiments, suites and reports.

Exit codes: 0 when every check passes, 1 on an acceptance failure, 2 on a
usage or config error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .config import Config
from .exceptions import ConfigError
from .experiments import available_kinds, format_table, load_config, report, run, run_suite
from .utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Experiment kinds each single-purpose subcommand accepts
SUBCOMMAND_KINDS = {
    "couplings": {"couplings", "spitzer_vs_dp", "mass_normalization", "return_site_exponent"},
    "walk": {"walk", "first_return_exponent", "renewal_bound"},
    "green": {"green", "trace_identity", "gff_log_asymptotics", "gradient_energy", "green_boundary_profile"},
    "chain-gaussian": {"chain_gaussian", "chain_variance_scaling"},
    "chain-integer": {"chain_integer", "chain_invisibility", "correlation_inequalities"},
    "gff2d-line": {"line_conditioned_gff"},
    "regimes": {"regimes"},
    "fbm-compare": {"fbm_shape"},
}

EPILOG = """
Examples:
  # Walk-derived couplings against the Spitzer law
  fracchain couplings --config experiments/c01_spitzer_vs_dp.json

  # Any single experiment, whatever its kind
  fracchain run --config experiments/c08_chain_invisibility.json --seed 7 --out results/c08

  # Every config in experiments/, resumable, on threads
  fracchain suite --out results/suite --resume

  # PASS/FAIL table of a suite directory
  fracchain report results/suite
"""


def _add_single(subparsers, name: str, help_text: str):
    sub = subparsers.add_parser(name, help=help_text)
    sub.add_argument('--config', required=True, type=Path, help='Experiment config (JSON)')
    sub.add_argument('--seed', type=int, default=None, help='Override the config seed')
    sub.add_argument('--out', type=Path, default=None,
                     help='Run directory (default: results/<experiment id>)')
    return sub


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracchain",
        description="Long-range discrete Gaussian chains: experiments and acceptance suite",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    _add_single(subparsers, "couplings", "Coupling sequences, masses and tail exponents")
    _add_single(subparsers, "walk", "Bessel walk simulations and first-return laws")
    _add_single(subparsers, "green", "Green functions of killed walks")
    _add_single(subparsers, "chain-gaussian", "Gaussian chain covariances and variance scaling")
    _add_single(subparsers, "chain-integer", "Lattice-valued chains and correlation inequalities")
    _add_single(subparsers, "gff2d-line", "Planar free field conditioned on the line")
    _add_single(subparsers, "regimes", "Localized, fractional and Brownian regimes")
    _add_single(subparsers, "fbm-compare", "Rescaled chain covariance against fBm")
    _add_single(subparsers, "run", f"Any experiment kind ({', '.join(available_kinds())})")

    suite = subparsers.add_parser("suite", help="Run a directory of experiment configs")
    suite.add_argument('--configs', type=Path, default=Config.EXPERIMENTS_DIR,
                       help='Directory of configs (default: experiments/)')
    suite.add_argument('--out', type=Path, default=None, help='Suite directory (default: results/suite)')
    suite.add_argument('--seed', type=int, default=None, help='Override every config seed')
    suite.add_argument('--resume', action='store_true', help='Skip experiments already completed')
    suite.add_argument('--method', choices=['threading', 'multiprocessing'], default='threading',
                       help='Parallel method (default: threading)')
    suite.add_argument('--workers', type=int, default=None, help='Number of workers (default: auto)')

    rep = subparsers.add_parser("report", help="PASS/FAIL table of a run or suite directory")
    rep.add_argument('run_dir', type=Path, nargs='?', default=None,
                     help='Run or suite directory (default: results/)')
    return parser


def _run_single(args) -> int:
    config = load_config(args.config)
    allowed = SUBCOMMAND_KINDS.get(args.command)
    if allowed is not None and config.kind not in allowed:
        raise ConfigError(
            f"Subcommand {args.command} does not run kind {config.kind}. "
            f"Use one of {sorted(allowed)} or 'fracchain run'"
        )
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    out_dir = args.out or Config.RESULTS_DIR / config.id
    _, code = run(config, out_dir)
    return code


def _run_report(run_dir: Path) -> int:
    rows, code = report(run_dir)
    print("\n" + "=" * 70)
    print(f"📊 ACCEPTANCE REPORT: {run_dir}")
    print("=" * 70)
    print(format_table(rows))
    print("=" * 70 + "\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(f"fracchain_{args.command.replace('-', '_')}")

    try:
        if args.command == "suite":
            out_dir = args.out or Config.RESULTS_DIR / "suite"
            _, code = run_suite(args.configs, out_dir, num_workers=args.workers, method=args.method,
                                resume=args.resume, seed=args.seed)
            return code
        if args.command == "report":
            return _run_report(args.run_dir or Config.RESULTS_DIR)
        return _run_single(args)
    except (ConfigError, ValidationError) as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
