"""Registry of experiment kinds and the helpers they share."""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from ..exceptions import ConfigError
from ..models import ExperimentConfig, ResultRecord
from .svg import PlotSpec

logger = logging.getLogger(__name__)


@dataclass
class Artifact:
    """Rows written to ``<name>.csv``, optionally plotted to ``<name>.svg``."""

    name: str
    rows: List[Dict[str, Any]]
    plot: Optional[PlotSpec] = None


@dataclass
class ExperimentOutput:
    records: List[ResultRecord] = field(default_factory=list)
    artifacts: List[Artifact] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


ExperimentFn = Callable[[ExperimentConfig], ExperimentOutput]

_KINDS: Dict[str, ExperimentFn] = {}


def register(kind: str):
    """Decorator adding an experiment function under ``kind``."""

    def wrap(fn: ExperimentFn) -> ExperimentFn:
        if kind in _KINDS:
            raise ValueError(f"Experiment kind {kind} registered twice")
        _KINDS[kind] = fn
        return fn

    return wrap


def get_kind(kind: str) -> ExperimentFn:
    if kind not in _KINDS:
        raise ConfigError(f"Unknown experiment kind: {kind}. Known kinds: {', '.join(sorted(_KINDS))}")
    return _KINDS[kind]


def available_kinds() -> List[str]:
    return sorted(_KINDS)


def param(config: ExperimentConfig, name: str, default: Any = None, required: bool = False) -> Any:
    """Look up ``params[name]``; a missing required parameter is a config error."""
    if name in config.params:
        return config.params[name]
    if required:
        raise ConfigError(f"Experiment {config.id} needs params.{name}")
    return default


def check(
    config: ExperimentConfig,
    metric: str,
    value: float,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
    error: Optional[float] = None,
    target: Optional[float] = None,
    error_multiplier: float = 0.0,
    claim: str = "",
) -> ResultRecord:
    """ResultRecord for one metric of ``config``; pass/fail follows [lower, upper]."""
    record = ResultRecord(
        experiment=config.id,
        criterion=config.criterion,
        anchor=config.anchor,
        metric=metric,
        value=float(value),
        error=None if error is None else float(error),
        target=target,
        lower=lower,
        upper=upper,
        error_multiplier=error_multiplier,
        claim=claim,
    )
    marker = "✅" if record.passed else "❌"
    logger.info(f"{marker} {config.id} {metric} = {record.value:.6g} (bounds [{lower}, {upper}])")
    return record
