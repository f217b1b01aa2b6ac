"""Run single experiments and whole suites into run directories."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from ..config import Config
from ..models import ExperimentConfig, ResultRecord
from ..progress_tracker import ProgressTracker
from .io import RESOLVED_CONFIG, SUMMARY_JSON, load_config, write_csv, write_json, write_results
from .registry import get_kind
from .svg import plot_csv

logger = logging.getLogger(__name__)

PROGRESS_FILE = "progress.json"
SUITE_JSON = "suite.json"


def run(config: ExperimentConfig, out_dir: Union[str, Path]) -> Tuple[List[ResultRecord], int]:
    """
    Run one experiment and write its run directory.

    Writes results.csv, results.json, config.resolved.json, summary.json and
    one CSV per artifact; artifacts with a plot also get an SVG drawn from
    the CSV.

    Args:
        config: Validated experiment config
        out_dir: Run directory (created if missing)

    Returns:
        (records, exit code) with exit code 0 when every record passes, else 1
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    experiment = get_kind(config.kind)
    write_json(out_dir / RESOLVED_CONFIG, config.model_dump())

    logger.info(f"🚀 Running {config.id} ({config.kind}) -> {out_dir}")
    start = time.perf_counter()
    output = experiment(config)
    runtime = time.perf_counter() - start

    for artifact in output.artifacts:
        csv_path = write_csv(out_dir / f"{artifact.name}.csv", artifact.rows)
        if artifact.plot is not None:
            plot_csv(csv_path, artifact.plot)
    write_json(out_dir / SUMMARY_JSON, output.summary)
    records = [r.model_copy(update={"runtime": runtime}) for r in output.records]
    write_results(out_dir, config, records, runtime)

    passed = all(r.passed for r in records)
    marker = "✅" if passed else "❌"
    logger.info(f"{marker} {config.id}: {sum(r.passed for r in records)}/{len(records)} checks passed "
                f"in {runtime:.1f}s")
    return records, 0 if passed else 1


@dataclass
class SuiteEntry:
    """Outcome of one experiment inside a suite."""

    experiment: str
    criterion: Optional[int]
    passed: bool
    runtime: float
    error: Optional[str] = None
    skipped: bool = False


def _run_entry(task: Tuple[ExperimentConfig, Path]) -> SuiteEntry:
    config, out_dir = task
    start = time.perf_counter()
    try:
        _, code = run(config, out_dir / config.id)
        runtime = time.perf_counter() - start
        return SuiteEntry(config.id, config.criterion, code == 0, runtime)
    except Exception as e:
        logger.error(f"❌ {config.id} failed: {e}")
        return SuiteEntry(config.id, config.criterion, False, time.perf_counter() - start, error=str(e))


def config_paths(source: Union[str, Path, Sequence[Union[str, Path]]]) -> List[Path]:
    """JSON configs in a directory (sorted by name), or the given files."""
    if isinstance(source, (str, Path)):
        source = Path(source)
        if source.is_dir():
            return sorted(source.glob("*.json"))
        return [source]
    return [Path(p) for p in source]


class SuiteRunner:
    """
    Runs many experiment configs in parallel.

    Experiments run on threads by default; ``method="multiprocessing"``
    uses a process pool. Outcomes are merged in config order.
    """

    def __init__(self, num_workers: Optional[int] = None):
        """
        Initialize suite runner.

        Args:
            num_workers: Number of workers (default: Config.THREADS)
        """
        self.num_workers = num_workers or Config.THREADS
        logger.info(f"Suite runner initialized with {self.num_workers} workers")

    def _run_threading(self, tasks, on_done, show_progress: bool) -> Dict[str, SuiteEntry]:
        outcomes = {}
        with ThreadPoolExecutor(max_workers=self.num_workers) as executor:
            future_to_id = {executor.submit(_run_entry, task): task[0].id for task in tasks}
            iterator = as_completed(future_to_id)
            if show_progress:
                iterator = tqdm(iterator, total=len(tasks), desc="Experiments", unit="experiments")
            for future in iterator:
                entry = future.result()
                outcomes[entry.experiment] = entry
                on_done(entry)
        return outcomes

    def _run_multiprocessing(self, tasks, on_done, show_progress: bool) -> Dict[str, SuiteEntry]:
        outcomes = {}
        with Pool(self.num_workers) as pool:
            iterator = pool.imap(_run_entry, tasks)
            if show_progress:
                iterator = tqdm(iterator, total=len(tasks), desc="Experiments", unit="experiments")
            for entry in iterator:
                outcomes[entry.experiment] = entry
                on_done(entry)
        return outcomes

    def run_suite(
        self,
        configs: Sequence[ExperimentConfig],
        out_dir: Union[str, Path],
        method: str = "threading",
        resume: bool = False,
        show_progress: bool = True,
    ) -> List[SuiteEntry]:
        """
        Run every config into ``out_dir/<id>`` and checkpoint progress.

        Args:
            configs: Validated configs (ids must be unique)
            out_dir: Suite directory
            method: "threading" or "multiprocessing"
            resume: Skip experiments the checkpoint already records
            show_progress: Show progress bar

        Returns:
            One SuiteEntry per config, in config order
        """
        if method not in ("threading", "multiprocessing"):
            raise ValueError(f"Unknown method: {method}. Use 'threading' or 'multiprocessing'")
        ids = [c.id for c in configs]
        if len(set(ids)) != len(ids):
            raise ValueError("Experiment ids in a suite must be unique")

        out_dir = Path(out_dir)
        tracker = ProgressTracker(out_dir / PROGRESS_FILE)
        if not resume:
            tracker.reset()

        pending = [c for c in configs if not tracker.is_completed(c.id)]
        skipped = len(configs) - len(pending)
        logger.info(f"📊 Suite of {len(configs)} experiments: {len(pending)} to run, {skipped} already done")

        def on_done(entry: SuiteEntry):
            tracker.mark_completed(entry.experiment, entry.passed, entry.runtime, entry.error)
            tracker.save()

        tasks = [(c, out_dir) for c in pending]
        if method == "multiprocessing":
            outcomes = self._run_multiprocessing(tasks, on_done, show_progress)
        else:
            outcomes = self._run_threading(tasks, on_done, show_progress)

        entries = []
        for config in configs:
            if config.id in outcomes:
                entries.append(outcomes[config.id])
            else:
                done = tracker.completed[config.id]
                entries.append(SuiteEntry(config.id, config.criterion, done["passed"], done["runtime"],
                                          skipped=True))
        write_json(out_dir / SUITE_JSON, {"entries": [e.__dict__ for e in entries],
                                          "status": tracker.get_status()})

        passed = sum(e.passed for e in entries)
        logger.info(f"✅ Suite finished: {passed}/{len(entries)} experiments passed")
        return entries


def run_suite(
    source: Union[str, Path, Sequence[Union[str, Path]]],
    out_dir: Union[str, Path],
    num_workers: Optional[int] = None,
    method: str = "threading",
    resume: bool = False,
    seed: Optional[int] = None,
) -> Tuple[List[SuiteEntry], int]:
    """
    Convenience function: load configs and run them as a suite.

    Args:
        source: Directory of JSON configs, or a list of config files
        out_dir: Suite directory
        num_workers: Number of workers (default: auto)
        method: "threading" or "multiprocessing"
        resume: Skip experiments already recorded in the checkpoint
        seed: Override the seed of every config

    Returns:
        (entries, exit code) with exit code 0 when every experiment passes, else 1
    """
    configs = [load_config(path) for path in config_paths(source)]
    if seed is not None:
        configs = [c.model_copy(update={"seed": seed}) for c in configs]
    entries = SuiteRunner(num_workers).run_suite(configs, out_dir, method=method, resume=resume)
    return entries, 0 if all(e.passed for e in entries) else 1
