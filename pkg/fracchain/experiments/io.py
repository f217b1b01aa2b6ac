"""Config loading and run-directory artifacts."""

import csv
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from pydantic import ValidationError

from ..exceptions import ConfigError, MissingArtifactError
from ..models import ExperimentConfig, ResultRecord

logger = logging.getLogger(__name__)

RESULTS_CSV = "results.csv"
RESULTS_JSON = "results.json"
RESOLVED_CONFIG = "config.resolved.json"
SUMMARY_JSON = "summary.json"

# runtime is reported in results.json only
RESULT_COLUMNS = [
    "experiment", "criterion", "anchor", "metric", "value", "error",
    "target", "lower", "upper", "passed", "claim",
]


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment config.

    Raises:
        ConfigError: missing file, invalid JSON or schema violation
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path} does not match the experiment schema:\n{e}") from e


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(path: Path, rows: Sequence[Dict[str, Any]], fieldnames: Sequence[str] = None) -> Path:
    """Write rows atomically; floats use repr so reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fieldnames is None:
        fieldnames = []
        for row in rows:
            fieldnames += [k for k in row if k not in fieldnames]
    fd, tmp_path = tempfile.mkstemp(prefix=f"{path.stem}_", suffix=".tmp", dir=path.parent, text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _cell(row.get(k)) for k in fieldnames})
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def write_json(path: Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True) + "\n")
    return path


def write_results(out_dir: Path, config: ExperimentConfig, records: List[ResultRecord], runtime: float) -> None:
    """results.csv (deterministic), results.json (with runtime) and the resolved config."""
    out_dir = Path(out_dir)
    write_json(out_dir / RESOLVED_CONFIG, config.model_dump())
    write_csv(out_dir / RESULTS_CSV, [r.model_dump() for r in records], RESULT_COLUMNS)
    write_json(out_dir / RESULTS_JSON, {
        "experiment": config.id,
        "criterion": config.criterion,
        "runtime": runtime,
        "passed": all(r.passed for r in records),
        "records": [r.model_dump() for r in records],
    })


def read_results(run_dir: Path) -> List[ResultRecord]:
    """Records of one run directory, from results.json."""
    path = Path(run_dir) / RESULTS_JSON
    if not path.exists():
        raise MissingArtifactError(f"No {RESULTS_JSON} in {run_dir}")
    data = json.loads(path.read_text())
    return [ResultRecord.model_validate(r) for r in data.get("records", [])]
