"""Configuration management for fracchain."""

import os
from multiprocessing import cpu_count
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Application configuration."""

    # Project paths
    PROJECT_ROOT = Path(__file__).parent.parent
    EXPERIMENTS_DIR = PROJECT_ROOT / "experiments"
    RESULTS_DIR = Path(os.getenv("FRACCHAIN_RESULTS_DIR", str(PROJECT_ROOT / "results")))
    LOGS_DIR = Path(os.getenv("FRACCHAIN_LOGS_DIR", str(PROJECT_ROOT / "logs")))

    # Parallelism
    THREADS = int(os.getenv("FRACCHAIN_THREADS", str(max(1, cpu_count() - 1))))
    LOG_LEVEL = os.getenv("FRACCHAIN_LOG_LEVEL", "INFO")

    # Coupling constructions
    DEFAULT_HORIZON = 2 ** 16
    HORIZON_TOLERANCE = 1e-4
    FOURIER_QUADRATURE_POINTS = 2 ** 20
    MIN_QUADRATURE_POINTS = 2 ** 12
    NORMALIZATION_EPS = 1e-9

    # Linear solvers
    DIRECT_SOLVER_MAX_UNKNOWNS = int(os.getenv("FRACCHAIN_DIRECT_MAX_UNKNOWNS", "200000"))
    SOLVER_RTOL = 1e-10
    CG_MAX_ITER = 20000

    # Sampling
    DG_WINDOW_SIGMAS = 6.0
    MIN_BATCHES = 20
    ENUMERATION_TAIL_TOL = 1e-9
    ENUMERATION_CHUNK = 2 ** 18

    @classmethod
    def ensure_directories(cls):
        """Create necessary directories if they don't exist."""
        for directory in [
            cls.RESULTS_DIR,
            cls.LOGS_DIR,
        ]:
            directory.mkdir(parents=True, exist_ok=True)
