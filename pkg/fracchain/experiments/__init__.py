"""Experiment registry, runner and report for the acceptance suite."""

from . import chain_checks, field_checks, walk_checks  # noqa: F401  (registers experiment kinds)
from .io import load_config, read_results, write_csv
from .registry import Artifact, ExperimentOutput, available_kinds, check, get_kind, register
from .report import format_table, report
from .runner import SuiteEntry, SuiteRunner, run, run_suite

__all__ = [
    'load_config',
    'read_results',
    'write_csv',
    'Artifact',
    'ExperimentOutput',
    'register',
    'get_kind',
    'available_kinds',
    'check',
    'run',
    'run_suite',
    'SuiteRunner',
    'SuiteEntry',
    'report',
    'format_table',
]
