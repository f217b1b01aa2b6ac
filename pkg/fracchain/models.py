"""Data models for fracchain."""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import Config


class CouplingSource(str, Enum):
    """Provenance of a coupling sequence."""

    SPITZER = "spitzer"
    BESSEL_DIAMOND = "bessel_diamond"
    BESSEL_GRID = "bessel_grid"
    FOURIER = "fourier"
    POWER_LAW = "power_law"


class CouplingSequence(BaseModel):
    """
    Long-range coupling constants J(r), r = 1..R.

    ``values[r - 1]`` holds J(r). J is symmetric, so negative distances are
    not stored. Walk-derived sequences also carry the mass of returning to
    the starting site.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: float
    values: np.ndarray
    source: CouplingSource
    one_sided_mass: float
    truncation_error: float = 0.0
    pointwise_error: float = 0.0
    mass_at_zero: Optional[float] = None
    stderr: Optional[np.ndarray] = None
    horizon: Optional[int] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("values", "stderr", mode="before")
    @classmethod
    def as_float_array(cls, v):
        if v is None:
            return None
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coupling arrays must be non-empty and 1-D")
        return arr

    @field_validator("truncation_error", "pointwise_error")
    @classmethod
    def non_negative(cls, v):
        if v < 0:
            raise ValueError(f"error bounds must be >= 0, got {v}")
        return v

    @model_validator(mode="after")
    def check_positivity(self):
        if np.any(self.values < 0):
            worst = float(self.values.min())
            raise ValueError(f"Couplings must be non-negative, found {worst:.3e}")
        if self.stderr is not None and self.stderr.shape != self.values.shape:
            raise ValueError("stderr must match values")
        return self

    @property
    def s(self) -> float:
        return self.alpha - 2.0

    @property
    def radius(self) -> int:
        return int(self.values.size)

    @property
    def is_walk_derived(self) -> bool:
        return self.mass_at_zero is not None

    def J(self, r) -> np.ndarray:
        """Coupling at (possibly negative or zero) distance ``r``; 0 beyond R."""
        r = np.abs(np.asarray(r, dtype=np.int64))
        out = np.zeros(r.shape, dtype=float)
        inside = (r >= 1) & (r <= self.radius)
        out[inside] = self.values[r[inside] - 1]
        if self.mass_at_zero is not None:
            out[r == 0] = self.mass_at_zero
        return out if out.ndim else float(out)

    def total_mass(self) -> float:
        """mass_at_zero + 2 Σ_{r ≤ R} J(r)."""
        zero = self.mass_at_zero or 0.0
        return float(zero + 2.0 * np.sum(self.values))

    def is_monotone(self, start: int = 2) -> bool:
        """Whether J(r) is non-increasing for r >= start."""
        return bool(np.all(np.diff(self.values[start - 1:]) <= 0))

    def as_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for r in range(1, self.radius + 1):
            row: Dict[str, Any] = {"r": r, "J": float(self.values[r - 1])}
            if self.stderr is not None:
                row["stderr"] = float(self.stderr[r - 1])
            rows.append(row)
        return rows


class TailFit(BaseModel):
    """Power-law fit J(r) ≈ constant · r^(−exponent) on a window."""

    exponent: float
    constant: float
    fit_window: Tuple[int, int]
    residual: float
    n_points: int = 0

    @field_validator("fit_window")
    @classmethod
    def ordered_window(cls, v):
        if not v[0] < v[1]:
            raise ValueError(f"fit window must satisfy r_min < r_max, got {v}")
        return v

    @field_validator("residual")
    @classmethod
    def residual_non_negative(cls, v):
        if v < 0:
            raise ValueError("residual must be >= 0")
        return v


class FirstReturnLaw(BaseModel):
    """First-return law g_s(n) of the Bessel walk, indexed by n = 0..T."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    s: float
    g: np.ndarray
    horizon: int
    tail_mass: float

    @model_validator(mode="after")
    def check_shape(self):
        if self.g.shape != (self.horizon + 1,):
            raise ValueError("g must have length horizon + 1")
        return self

    @property
    def exponent(self) -> float:
        """Asymptotic decay exponent (3 + s) / 2."""
        return (3.0 + self.s) / 2.0

    def mass(self) -> float:
        return float(np.sum(self.g))

    def plateau(self, n: np.ndarray) -> np.ndarray:
        """g(n) · n^((3+s)/2) at even times ``n``."""
        n = np.asarray(n, dtype=np.int64)
        return self.g[n] * n.astype(float) ** self.exponent

    def tail_constant(self) -> float:
        """Plateau level averaged over the last half of the horizon."""
        n = np.arange(self.horizon // 2 + (self.horizon // 2) % 2, self.horizon + 1, 2)
        return float(np.mean(self.plateau(n)))


class DomainSpec(BaseModel):
    """JSON description of a lattice domain, used in walk and experiment configs."""

    kind: Literal[
        "interval", "box2d", "torus2d", "free_box2d",
        "slit_diamond", "smoothed_slit", "half_plane_free_bottom",
    ]
    n: int = Field(ge=1)
    M: Optional[float] = None
    factor: Optional[float] = None
    half_plane: bool = False

    def build(self):
        from .lattice.domains import build_domain

        params = self.model_dump(exclude={"kind"}, exclude_none=True)
        if not params.get("half_plane"):
            params.pop("half_plane", None)
        return build_domain(self.kind, **params)


class WalkSpec(BaseModel):
    """Parameters of a batch of Bessel-walk simulations."""

    geometry: Literal["diamond", "grid"] = "diamond"
    dimension: int = Field(default=1, ge=1)
    s: float = 0.0
    domain: Optional[DomainSpec] = None
    max_steps: int = Field(default=10 ** 6, ge=1)
    seed: int = 0
    n_walks: int = Field(default=10 ** 4, ge=1)
    reflect: bool = False
    start_height: int = Field(default=0, ge=0)
    observe_sites: List[Tuple[int, int]] = Field(default_factory=list)

    @field_validator("s")
    @classmethod
    def valid_s(cls, v):
        if v <= -1:
            raise ValueError(f"s must be > -1, got {v}")
        return v

    @model_validator(mode="after")
    def diamond_is_planar(self):
        if self.geometry == "diamond" and self.dimension != 1:
            raise ValueError("diamond geometry has a 1-dimensional baseline")
        return self


class ConductanceField(BaseModel):
    """
    Height-dependent conductances a(r, r+1) on the diamond graph.

    ``values[r]`` is the conductance of an edge between heights r and r+1.
    Edges below the baseline mirror those above.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    s: float
    values: np.ndarray
    max_height: int
    bound_constant: float

    def edge(self, lower_height) -> np.ndarray:
        """Conductance of the edge between heights h and h+1."""
        h = np.asarray(lower_height, dtype=np.int64)
        r = np.where(h >= 0, h, -h - 1)
        if np.any(r >= self.max_height):
            raise ValueError(
                f"Height {int(r.max())} beyond conductance field (max_height={self.max_height})"
            )
        return self.values[r]


class FbmSpec(BaseModel):
    """Fractional Brownian motion target for a chain with exponent alpha."""

    H: float = Field(ge=0.0, lt=0.5)
    beta: float = Field(default=1.0, gt=0.0)
    geometry: Literal["free_line", "dirichlet_interval"] = "dirichlet_interval"
    K: Optional[float] = None

    @classmethod
    def from_alpha(cls, alpha: float, **kwargs) -> "FbmSpec":
        return cls(H=(alpha - 2.0) / 2.0, **kwargs)

    @property
    def alpha(self) -> float:
        return 2.0 * self.H + 2.0

    @property
    def u(self) -> float:
        return self.H + 0.5


class ShapeFit(BaseModel):
    """One-scalar fit of an empirical covariance to a target shape."""

    K: float
    scale: float
    residual: float
    n_entries: int


class ObservableEstimate(BaseModel):
    value: float
    stderr: float
    n_batches: int


class ObservableSet(BaseModel):
    """Batch-means estimates from a Markov chain run."""

    estimates: Dict[str, ObservableEstimate] = Field(default_factory=dict)
    sweeps: int
    burn_in: int
    n_chains: int = 1
    equilibration_warning: bool = False
    max_window_tail: float = 0.0
    acceptance_rate: Optional[float] = None

    def __getitem__(self, name: str) -> ObservableEstimate:
        return self.estimates[name]

    def __contains__(self, name: str) -> bool:
        return name in self.estimates


class ExperimentConfig(BaseModel):
    """One experiment of the acceptance suite, loaded from experiments/*.json."""

    model_config = ConfigDict(extra="forbid")

    id: str
    kind: str
    criterion: Optional[int] = None
    anchor: str = ""
    description: str = ""
    seed: int = 0
    params: Dict[str, Any] = Field(default_factory=dict)
    sweeps: Optional[int] = None
    burn_in: Optional[int] = None
    n_batches: int = Config.MIN_BATCHES
    tolerances: Dict[str, float] = Field(default_factory=dict)
    solver_threshold: Optional[int] = None

    @field_validator("id", "kind")
    @classmethod
    def slug(cls, v):
        v = v.strip()
        if not v or any(c.isspace() for c in v):
            raise ValueError(f"'{v}' is not a valid identifier")
        return v

    @field_validator("n_batches")
    @classmethod
    def enough_batches(cls, v):
        if v < Config.MIN_BATCHES:
            raise ValueError(f"n_batches must be >= {Config.MIN_BATCHES}, got {v}")
        return v

    @model_validator(mode="after")
    def sweeps_exceed_burn_in(self):
        if self.sweeps is not None and self.burn_in is not None and self.sweeps <= self.burn_in:
            raise ValueError("sweeps must exceed burn_in")
        return self

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


class ResultRecord(BaseModel):
    """
    One checked metric of an experiment.

    ``passed`` is derived from [lower, upper] only. With ``error_multiplier``
    k > 0 the value passes when ``value ± k·error`` reaches the interval.
    """

    experiment: str
    criterion: Optional[int] = None
    anchor: str = ""
    metric: str
    value: float
    error: Optional[float] = None
    target: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    error_multiplier: float = 0.0
    passed: bool = True
    runtime: float = 0.0
    claim: str = ""

    @model_validator(mode="after")
    def evaluate(self):
        slack = self.error_multiplier * (self.error or 0.0)
        ok = bool(np.isfinite(self.value))
        if self.lower is not None:
            ok = ok and self.value + slack >= self.lower
        if self.upper is not None:
            ok = ok and self.value - slack <= self.upper
        self.passed = ok
        return self
