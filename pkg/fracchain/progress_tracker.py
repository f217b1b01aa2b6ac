"""Track experiment progress for resumable suite runs."""

import json
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional


class ProgressTracker:
    """
    Tracks which experiments of a suite have finished.

    Entries are keyed by experiment id and keep the verdict and runtime, so
    a resumed suite can skip them and still report them.
    """

    def __init__(self, checkpoint_file: Path = Path("results/progress.json")):
        self.checkpoint_file = Path(checkpoint_file)
        self.checkpoint_file.parent.mkdir(parents=True, exist_ok=True)

        # Load or initialize
        if self.checkpoint_file.exists():
            data = json.loads(self.checkpoint_file.read_text())
            self.completed: Dict[str, dict] = data.get('completed', {})
            self.started_at: Optional[str] = data.get('started_at')
        else:
            self.completed = {}
            self.started_at = None

    def mark_completed(self, experiment_id: str, passed: bool, runtime: float, error: Optional[str] = None):
        """Record the verdict of one experiment."""
        if self.started_at is None:
            self.started_at = datetime.now().isoformat()
        self.completed[experiment_id] = {
            'passed': bool(passed),
            'runtime': float(runtime),
            'error': error,
            'finished_at': datetime.now().isoformat(),
        }

    def is_completed(self, experiment_id: str) -> bool:
        """Check if an experiment already finished without an error."""
        entry = self.completed.get(experiment_id)
        return entry is not None and entry.get('error') is None

    def save(self):
        """Save progress to checkpoint file."""
        data = {
            'completed': self.completed,
            'started_at': self.started_at,
            'updated_at': datetime.now().isoformat()
        }
        self.checkpoint_file.write_text(json.dumps(data, indent=2, sort_keys=True))

    def get_status(self) -> dict:
        """Get current progress status."""
        passed = sum(1 for entry in self.completed.values() if entry['passed'])
        errors = sum(1 for entry in self.completed.values() if entry.get('error'))
        return {
            'total_completed': len(self.completed),
            'passed': passed,
            'failed': len(self.completed) - passed,
            'errors': errors,
            'total_runtime': sum(entry['runtime'] for entry in self.completed.values()),
            'started_at': self.started_at,
        }

    def reset(self):
        """Clear all progress."""
        self.completed = {}
        self.started_at = None
        if self.checkpoint_file.exists():
            self.checkpoint_file.unlink()
