"""Aggregate run directories into a per-criterion PASS/FAIL table."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

from .io import RESOLVED_CONFIG, RESULTS_JSON, read_results, write_csv

logger = logging.getLogger(__name__)

REPORT_CSV = "report.csv"
REPORT_COLUMNS = ["criterion", "anchor", "experiments", "metrics", "passed", "status"]


def _run_dirs(root: Path) -> List[Path]:
    """The root itself when it is a run directory, else its run subdirectories."""
    if (root / RESULTS_JSON).exists() or (root / RESOLVED_CONFIG).exists():
        return [root]
    return sorted(
        p for p in root.iterdir()
        if p.is_dir() and ((p / RESULTS_JSON).exists() or (p / RESOLVED_CONFIG).exists())
    )


def _resolved(run_dir: Path) -> Dict:
    return json.loads((run_dir / RESOLVED_CONFIG).read_text())


def _criterion_of(run_dir: Path) -> str:
    data = _resolved(run_dir)
    criterion = data.get("criterion")
    return str(criterion) if criterion is not None else data.get("id", run_dir.name)


def _new_group() -> Dict:
    return {"experiments": set(), "anchors": set(), "metrics": 0, "passed": 0, "missing": False}


def _key(record) -> str:
    return str(record.criterion) if record.criterion is not None else record.experiment


def _sort_key(key: str) -> Tuple[int, int, str]:
    return (0, int(key), "") if key.isdigit() else (1, 0, key)


def report(run_dir: Union[str, Path], write: bool = True) -> Tuple[List[Dict], int]:
    """
    One row per criterion found under ``run_dir``.

    A row is MISSING when one of its experiments has a config but no
    results, FAIL when any metric fails and PASS otherwise. Experiments
    without a criterion get a row under their id.

    Args:
        run_dir: A run directory or a suite directory of run directories
        write: Also write report.csv into ``run_dir``

    Returns:
        (rows, exit code) with exit code 0 when every row passes or nothing was found
    """
    root = Path(run_dir)
    if not root.exists():
        logger.warning(f"⚠️  {root} does not exist; nothing to report")
        return [], 0

    groups: Dict[str, Dict] = {}
    for path in _run_dirs(root):
        if (path / RESULTS_JSON).exists():
            records = read_results(path)
            keys = {_key(r) for r in records}
            if not keys:
                keys = {_criterion_of(path)} if (path / RESOLVED_CONFIG).exists() else {path.name}
            for key in keys:
                group = groups.setdefault(key, _new_group())
                group["experiments"].add(path.name)
                for r in records:
                    if _key(r) == key:
                        if r.anchor:
                            group["anchors"].add(r.anchor)
                        group["metrics"] += 1
                        group["passed"] += int(r.passed)
        else:
            key = _criterion_of(path)
            group = groups.setdefault(key, _new_group())
            group["experiments"].add(path.name)
            anchor = _resolved(path).get("anchor")
            if anchor:
                group["anchors"].add(anchor)
            group["missing"] = True

    rows = []
    for key in sorted(groups, key=_sort_key):
        group = groups[key]
        if group["missing"]:
            status = "MISSING"
        elif group["passed"] < group["metrics"]:
            status = "FAIL"
        else:
            status = "PASS"
        rows.append({
            "criterion": key,
            "anchor": "; ".join(sorted(group["anchors"])),
            "experiments": " ".join(sorted(group["experiments"])),
            "metrics": group["metrics"],
            "passed": group["passed"],
            "status": status,
        })

    if write and rows:
        write_csv(root / REPORT_CSV, rows, REPORT_COLUMNS)
    failing = [row["criterion"] for row in rows if row["status"] != "PASS"]
    if failing:
        logger.info(f"❌ {len(failing)}/{len(rows)} criteria not passing: {', '.join(failing)}")
    else:
        logger.info(f"✅ {len(rows)} criteria passing")
    return rows, 1 if failing else 0


def format_table(rows: List[Dict]) -> str:
    """Fixed-width text table of report rows."""
    if not rows:
        return "No results found."
    widths = {c: max(len(c), *(len(str(row[c])) for row in rows)) for c in REPORT_COLUMNS}
    lines = ["  ".join(c.ljust(widths[c]) for c in REPORT_COLUMNS)]
    lines.append("  ".join("-" * widths[c] for c in REPORT_COLUMNS))
    for row in rows:
        lines.append("  ".join(str(row[c]).ljust(widths[c]) for c in REPORT_COLUMNS))
    return "\n".join(lines)
