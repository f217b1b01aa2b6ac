"""Shared fixtures for the fracchain test suite."""

import json

import pytest

from fracchain.config import Config
from fracchain.couplings import power_law_couplings, spitzer_couplings
from fracchain.lattice import build_domain


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    """Keep results and logs of every test inside its tmp_path."""
    results = tmp_path / "results"
    logs = tmp_path / "logs"
    monkeypatch.setattr(Config, "RESULTS_DIR", results)
    monkeypatch.setattr(Config, "LOGS_DIR", logs)
    return results, logs


@pytest.fixture(scope="module")
def spitzer_64():
    """Spitzer couplings up to r = 64."""
    return spitzer_couplings(64)


@pytest.fixture(scope="module")
def power_law_25():
    """Power-law couplings with alpha = 2.5 up to r = 512."""
    return power_law_couplings(2.5, 512)


@pytest.fixture(scope="module")
def small_box():
    """Square box {-6..6}^2 with killed exterior."""
    return build_domain("box2d", n=6)


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config to tmp_path and return its path."""

    def _write(data, name=None):
        path = tmp_path / "configs" / f"{name or data.get('id', 'config')}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data))
        return path

    return _write


@pytest.fixture
def passing_config():
    """Cheap experiment whose tail fit is exact."""
    return {
        "id": "power_tail",
        "kind": "couplings",
        "criterion": 3,
        "params": {"source": "power_law", "alpha": 2.5, "R": 512, "fit_window": [8, 512]},
    }


@pytest.fixture
def failing_config():
    """Cheap experiment whose tolerance is tighter than the small-r curvature of J."""
    return {
        "id": "spitzer_tight",
        "kind": "couplings",
        "criterion": 4,
        "params": {"source": "spitzer", "R": 64, "fit_window": [1, 64]},
        "tolerances": {"exponent": 0.001},
    }
