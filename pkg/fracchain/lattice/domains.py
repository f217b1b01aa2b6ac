"""Lattice domains: intervals, boxes, tori, slit and smoothed slit domains.

Diamond-graph domains are stored on an integer index lattice (u, v) = (2x, 2y)
with u ≡ v (mod 2). Diamond neighbours differ by (±1, ±1) in index units, the
vertical index v is the Bessel height, and baseline site k sits at u = 2k.
"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from ..models import ConductanceField, DomainSpec

logger = logging.getLogger(__name__)

DIAMOND_OFFSETS = ((1, 1), (-1, 1), (1, -1), (-1, -1))
SQUARE_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))
LINE_OFFSETS = ((1, 0), (-1, 0))

DIAMOND_KINDS = ("slit_diamond", "smoothed_slit", "half_plane_free_bottom")
SQUARE_KINDS = ("box2d", "torus2d", "free_box2d")


class LatticeDomain:
    """
    A finite set of alive sites with killed (Dirichlet) exterior.

    Sites are integer coordinates. Edges to sites outside the alive set
    count towards the degree and end the walk, except across a free
    boundary (no edge at all) or through a periodic wrap.
    """

    def __init__(
        self,
        kind: str,
        params: Dict,
        lattice: str,
        coords: np.ndarray,
        bounds: Tuple[int, int, int, int],
        period: Optional[int] = None,
        free_bottom: bool = False,
        free_boundary: bool = False,
        boundary_label: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.kind = kind
        self.params = dict(params)
        self.lattice = lattice
        self.coords = np.asarray(coords, dtype=np.int64)
        self.bounds = bounds
        self.period = period
        self.free_bottom = free_bottom
        self.free_boundary = free_boundary
        self._boundary_label = boundary_label

        u_min, u_max, v_min, v_max = bounds
        self._lookup = np.full((u_max - u_min + 1, v_max - v_min + 1), -1, dtype=np.int32)
        self._lookup[self.coords[:, 0] - u_min, self.coords[:, 1] - v_min] = np.arange(
            len(self.coords), dtype=np.int32
        )

    # ------------------------------------------------------------------ sites

    @property
    def n_sites(self) -> int:
        return int(len(self.coords))

    @property
    def offsets(self) -> Tuple[Tuple[int, int], ...]:
        if self.lattice == "diamond":
            return DIAMOND_OFFSETS
        if self.lattice == "square":
            return SQUARE_OFFSETS
        return LINE_OFFSETS

    @property
    def max_height(self) -> int:
        """Largest |v| an edge can reach, in index units."""
        return int(np.abs(self.coords[:, 1]).max()) + 1

    def wrap(self, u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.period is None:
            return u, v
        half = self.period // 2
        return (u + half) % self.period - half, (v + half) % self.period - half

    def lookup(self, u, v) -> np.ndarray:
        """Index of each (u, v), or -1 when the site is not alive."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        u, v = self.wrap(u, v)
        u_min, u_max, v_min, v_max = self.bounds
        inside = (u >= u_min) & (u <= u_max) & (v >= v_min) & (v <= v_max)
        out = np.full(u.shape, -1, dtype=np.int64)
        out[inside] = self._lookup[u[inside] - u_min, v[inside] - v_min]
        return out

    def index_of(self, site) -> int:
        idx = int(self.lookup(site[0], site[1]))
        if idx < 0:
            raise KeyError(f"Site {tuple(site)} is not alive in {self.kind}")
        return idx

    def contains(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        return self.lookup(coords[:, 0], coords[:, 1]) >= 0

    def physical(self, coords: Optional[np.ndarray] = None) -> np.ndarray:
        """Physical coordinates; diamond index coordinates are halved."""
        coords = self.coords if coords is None else np.asarray(coords)
        if self.lattice == "diamond":
            return coords / 2.0
        return coords.astype(float)

    def distance_to_slit(self, indices: Optional[np.ndarray] = None) -> np.ndarray:
        """Physical ∞-distance from sites of a diamond host to the half-lines |x| >= n+1."""
        if self.lattice != "diamond":
            raise ValueError(f"{self.kind} has no slit")
        coords = self.coords if indices is None else self.coords[np.asarray(indices, dtype=np.int64)]
        return slit_distance_index(coords, int(self.params["n"])) / 2.0

    def baseline_indices(self) -> np.ndarray:
        """Alive sites on the horizontal axis, ordered left to right."""
        on_line = np.flatnonzero(self.coords[:, 1] == 0)
        return on_line[np.argsort(self.coords[on_line, 0])]

    def baseline_positions(self) -> np.ndarray:
        """Integer positions k of the baseline sites."""
        u = self.coords[self.baseline_indices(), 0]
        return u // 2 if self.lattice == "diamond" else u

    def baseline_index(self, k: int) -> int:
        """Site index of baseline position k."""
        u = 2 * k if self.lattice == "diamond" else k
        return self.index_of((u, 0))

    # ------------------------------------------------------------------ edges

    def _edge_exists(self, nb_u: np.ndarray, nb_v: np.ndarray) -> np.ndarray:
        exists = np.ones(nb_u.shape, dtype=bool)
        if self.free_bottom:
            exists &= nb_v >= 0
        if self.free_boundary:
            u_min, u_max, v_min, v_max = self.bounds
            exists &= (nb_u >= u_min) & (nb_u <= u_max) & (nb_v >= v_min) & (nb_v <= v_max)
        return exists

    def _edge_weights(
        self, v: np.ndarray, dv: int, conductances: Optional[ConductanceField]
    ) -> np.ndarray:
        if self.lattice == "diamond":
            if conductances is None:
                return np.full(v.shape, 0.25)
            return conductances.edge(np.minimum(v, v + dv))
        if self.lattice == "square":
            return np.full(v.shape, 0.25)
        return np.full(v.shape, 0.5)

    def adjacency(
        self, conductances: Optional[ConductanceField] = None
    ) -> Tuple[sparse.csr_matrix, np.ndarray]:
        """
        Weighted adjacency between alive sites and total incident conductance.

        Edges to killed sites count in the degree. Square and line lattices use
        uniform weights 1/4 and 1/2 so interior degrees equal 1.

        Returns:
            (A, deg): sparse symmetric weights and the degree vector
        """
        if conductances is not None and self.lattice != "diamond":
            raise ValueError("Conductance fields apply to diamond domains only")
        if conductances is not None and conductances.max_height < self.max_height:
            raise ValueError(
                f"Conductance field too short: need {self.max_height}, "
                f"have {conductances.max_height}"
            )

        u = self.coords[:, 0]
        v = self.coords[:, 1]
        degree = np.zeros(self.n_sites)
        rows, cols, weights = [], [], []
        for du, dv in self.offsets:
            nb_u, nb_v = u + du, v + dv
            exists = self._edge_exists(nb_u, nb_v)
            w = self._edge_weights(v, dv, conductances)
            degree += np.where(exists, w, 0.0)
            nb = self.lookup(nb_u, nb_v)
            alive = exists & (nb >= 0)
            rows.append(np.flatnonzero(alive))
            cols.append(nb[alive])
            weights.append(w[alive])

        A = sparse.csr_matrix(
            (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_sites, self.n_sites),
        )
        return A, degree

    def boundary(self) -> Dict[str, np.ndarray]:
        """Killed neighbours of alive sites, grouped by boundary label."""
        u = self.coords[:, 0]
        v = self.coords[:, 1]
        killed = []
        for du, dv in self.offsets:
            nb_u, nb_v = self.wrap(u + du, v + dv)
            exists = self._edge_exists(u + du, v + dv)
            dead = exists & (self.lookup(nb_u, nb_v) < 0)
            killed.append(np.column_stack([nb_u[dead], nb_v[dead]]))
        sites = np.unique(np.concatenate(killed), axis=0) if killed else np.empty((0, 2))
        if self._boundary_label is None:
            return {"outer": sites}
        labels = self._boundary_label(sites)
        return {str(label): sites[labels == label] for label in np.unique(labels)}

    def to_spec(self) -> DomainSpec:
        return DomainSpec(kind=self.kind, **self.params)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"LatticeDomain({self.kind}, {params}, sites={self.n_sites})"


# ---------------------------------------------------------------------- builders


def _diamond_grid(half_width: int, v_min: int, v_max: int) -> np.ndarray:
    u, v = np.meshgrid(
        np.arange(-half_width, half_width + 1),
        np.arange(v_min, v_max + 1),
        indexing="ij",
    )
    u, v = u.ravel(), v.ravel()
    keep = (u + v) % 2 == 0
    return np.column_stack([u[keep], v[keep]])


def _square_grid(half_width: int) -> np.ndarray:
    x, y = np.meshgrid(
        np.arange(-half_width, half_width + 1),
        np.arange(-half_width, half_width + 1),
        indexing="ij",
    )
    return np.column_stack([x.ravel(), y.ravel()])


def slit_distance_index(coords: np.ndarray, n: int) -> np.ndarray:
    """
    Lattice ∞-distance from diamond sites to L_n = {(k, 0): |k| >= n+1}, in index units.
    """
    u = np.abs(coords[:, 0])
    v = np.abs(coords[:, 1])
    edge = 2 * (n + 1)
    horizontal = np.where(u <= edge, edge - u, u % 2)
    return np.maximum(v, horizontal)


def _interval(n: int) -> LatticeDomain:
    coords = np.column_stack([np.arange(-n, n + 1), np.zeros(2 * n + 1, dtype=np.int64)])
    return LatticeDomain("interval", {"n": n}, "line", coords, (-n, n, 0, 0))


def _box2d(n: int) -> LatticeDomain:
    return LatticeDomain("box2d", {"n": n}, "square", _square_grid(n), (-n, n, -n, n))


def _torus2d(n: int) -> LatticeDomain:
    coords = _square_grid(n)
    coords = coords[np.any(coords != 0, axis=1)]
    return LatticeDomain(
        "torus2d", {"n": n}, "square", coords, (-n, n, -n, n), period=2 * n + 1
    )


def _free_box2d(n: int) -> LatticeDomain:
    coords = _square_grid(n)
    coords = coords[np.any(coords != 0, axis=1)]
    return LatticeDomain(
        "free_box2d", {"n": n}, "square", coords, (-n, n, -n, n), free_boundary=True
    )


def _slit_half_width(n: int, factor: float) -> int:
    W = int(math.ceil(factor * n / 2.0))
    if W < n + 1:
        raise ValueError(
            f"Box half-width {W} does not reach past the slit tip at {n + 1} (factor={factor})"
        )
    return W


def _slit_diamond(n: int, factor: float = 16, half_plane: bool = False) -> LatticeDomain:
    U = 2 * _slit_half_width(n, factor)
    coords = _diamond_grid(U, 0 if half_plane else -U, U)
    on_slit = (coords[:, 1] == 0) & (np.abs(coords[:, 0]) >= 2 * (n + 1))
    coords = coords[~on_slit]
    return LatticeDomain(
        "slit_diamond",
        {"n": n, "factor": factor, "half_plane": half_plane},
        "diamond",
        coords,
        (-U, U, 0 if half_plane else -U, U),
        free_bottom=half_plane,
    )


def _half_plane_free_bottom(n: int, factor: float = 2) -> LatticeDomain:
    U = 2 * int(math.ceil(factor * n / 2.0))
    if U < 2 * n:
        raise ValueError(f"factor must be >= 2, got {factor}")
    coords = _diamond_grid(U, 0, U)
    on_slit = (coords[:, 1] == 0) & (np.abs(coords[:, 0]) >= 2 * (n + 1))
    coords = coords[~on_slit]
    return LatticeDomain(
        "half_plane_free_bottom",
        {"n": n, "factor": factor},
        "diamond",
        coords,
        (-U, U, 0, U),
        free_bottom=True,
    )


def _smoothed_slit(n: int, M: float = 8, half_plane: bool = False) -> LatticeDomain:
    if M < 2:
        raise ValueError(f"smoothed_slit needs M >= 2, got {M}")
    U = int(math.floor(2 * M * n))
    coords = _diamond_grid(U, 0 if half_plane else -U, U)
    keep = slit_distance_index(coords, n) >= 2.0 * n / M
    coords = coords[keep]

    def label(sites: np.ndarray) -> np.ndarray:
        outside = np.max(np.abs(sites), axis=1) > U
        return np.where(outside, "square", "slit")

    return LatticeDomain(
        "smoothed_slit",
        {"n": n, "M": M, "half_plane": half_plane},
        "diamond",
        coords,
        (-U, U, 0 if half_plane else -U, U),
        free_bottom=half_plane,
        boundary_label=label,
    )


_BUILDERS = {
    "interval": _interval,
    "box2d": _box2d,
    "torus2d": _torus2d,
    "free_box2d": _free_box2d,
    "slit_diamond": _slit_diamond,
    "smoothed_slit": _smoothed_slit,
    "half_plane_free_bottom": _half_plane_free_bottom,
}


def build_domain(kind: str, **params) -> LatticeDomain:
    """
    Build a lattice domain.

    Args:
        kind: One of interval, box2d, torus2d, free_box2d, slit_diamond,
              smoothed_slit, half_plane_free_bottom
        **params: n (all kinds), factor (slit kinds), M (smoothed_slit),
                  half_plane (slit_diamond, smoothed_slit)

    Returns:
        LatticeDomain
    """
    if kind not in _BUILDERS:
        raise ValueError(f"Unknown domain kind: {kind}. Use one of {sorted(_BUILDERS)}")
    n = params.get("n")
    if n is None or int(n) != n or n < 1:
        raise ValueError(f"Domain size n must be an integer >= 1, got {n}")
    params = {k: v for k, v in params.items() if v is not None}
    try:
        domain = _BUILDERS[kind](**params)
    except TypeError as e:
        raise ValueError(f"Invalid parameters for {kind}: {e}") from e
    logger.debug(f"Built {domain}")
    return domain
