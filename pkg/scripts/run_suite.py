#!/usr/bin/env python3
"""
Run the acceptance suite: every config in experiments/ into one suite directory.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from fracchain.config import Config
from fracchain.experiments import format_table, report, run_suite
from fracchain.utils.logging_config import setup_logging

logger = setup_logging('run_suite')


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(
        description="Run every experiment config and print the acceptance report",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Full suite on threads
  python3 scripts/run_suite.py

  # Continue an interrupted suite with 4 worker processes
  python3 scripts/run_suite.py --resume --method multiprocessing --workers 4

  # Only some criteria
  python3 scripts/run_suite.py --configs experiments/c01_spitzer_vs_dp.json experiments/c02_mass_normalization.json
        """
    )

    parser.add_argument(
        '--configs',
        nargs='+',
        type=Path,
        default=[Config.EXPERIMENTS_DIR],
        help='Config files or a directory of configs (default: experiments/)'
    )

    parser.add_argument(
        '--out',
        type=Path,
        default=Config.RESULTS_DIR / "suite",
        help='Suite directory (default: results/suite)'
    )

    parser.add_argument(
        '--method',
        choices=['threading', 'multiprocessing'],
        default='threading',
        help='Parallel method (default: threading)'
    )

    parser.add_argument(
        '--workers',
        type=int,
        default=None,
        help='Number of workers (default: CPU count - 1)'
    )

    parser.add_argument(
        '--resume',
        action='store_true',
        help='Skip experiments already completed in --out'
    )

    args = parser.parse_args()
    Config.ensure_directories()

    source = args.configs[0] if len(args.configs) == 1 else args.configs
    entries, code = run_suite(source, args.out, num_workers=args.workers, method=args.method, resume=args.resume)

    logger.info("=" * 70)
    for entry in entries:
        marker = "✅" if entry.passed else "❌"
        note = " (resumed)" if entry.skipped else ""
        note += f" error: {entry.error}" if entry.error else ""
        logger.info(f"{marker} {entry.experiment}: {entry.runtime:.1f}s{note}")
    logger.info("=" * 70)

    rows, _ = report(args.out)
    print(format_table(rows))
    return code


if __name__ == '__main__':
    sys.exit(main())
