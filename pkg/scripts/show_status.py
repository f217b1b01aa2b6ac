#!/usr/bin/env python3
"""Show suite progress and the acceptance table."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from fracchain.config import Config
from fracchain.experiments import format_table, report
from fracchain.experiments.runner import PROGRESS_FILE
from fracchain.progress_tracker import ProgressTracker


def main():
    parser = argparse.ArgumentParser(description='Show suite progress and acceptance status')
    parser.add_argument('suite_dir', type=Path, nargs='?', default=Config.RESULTS_DIR / "suite",
                        help='Suite directory (default: results/suite)')
    args = parser.parse_args()

    if not args.suite_dir.exists():
        print(f"❌ No suite directory at {args.suite_dir}")
        return

    tracker = ProgressTracker(args.suite_dir / PROGRESS_FILE)
    status = tracker.get_status()
    rows, _ = report(args.suite_dir, write=False)

    # Display status
    print("\n" + "="*70)
    print("📊 ACCEPTANCE SUITE STATUS")
    print("="*70)

    print("\n📥 Progress:")
    print(f"   Experiments completed: {status['total_completed']}")
    print(f"   Passed / failed: {status['passed']} / {status['failed']}")
    print(f"   Errors: {status['errors']}")
    print(f"   Total runtime: {status['total_runtime']:.1f}s")
    print(f"   Started: {status['started_at']}")

    print("\n🧪 Criteria:")
    print(format_table(rows))

    print("\n💡 Next steps:")
    print(f"   Continue the suite: python3 scripts/run_suite.py --resume --out {args.suite_dir}")
    print(f"   Start over:         python3 scripts/run_suite.py --out {args.suite_dir}")
    print("="*70 + "\n")


if __name__ == '__main__':
    main()
