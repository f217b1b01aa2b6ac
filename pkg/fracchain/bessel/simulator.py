"""Vectorised Bessel-walk simulators on the diamond graph and the grid."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..config import Config
from ..models import WalkSpec
from ..utils.rng import spawn_generators, split_counts
from .kernel import kernel

logger = logging.getLogger(__name__)

REPLICA_SIZE = 4096


@dataclass
class WalkSummary:
    """
    Outcome of a batch of walks, in replica order.

    ``sites`` holds the baseline return site (unbounded walks, shape (N, d))
    or the killed site that ended the walk (domain walks, index coordinates).
    Censored walks keep their last position and are flagged.
    """

    spec: WalkSpec
    sites: np.ndarray
    times: np.ndarray
    censored: np.ndarray
    visits: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def n_walks(self) -> int:
        return int(self.times.size)

    @property
    def n_censored(self) -> int:
        return int(self.censored.sum())

    def return_site_histogram(self, R: int) -> Tuple[np.ndarray, int]:
        """
        Counts of returns at |site|_∞ = 0..R, and the number of returns beyond R.

        Censored walks are excluded from both.
        """
        returned = self.sites[~self.censored]
        radius = np.max(np.abs(returned), axis=1) if returned.size else np.zeros(0, dtype=int)
        counts = np.bincount(radius[radius <= R], minlength=R + 1)
        return counts, int(np.sum(radius > R))

    def signed_histogram(self, R: int) -> np.ndarray:
        """Counts of returns at each signed site -R..R (first coordinate, d = 1)."""
        returned = self.sites[~self.censored, 0]
        inside = np.abs(returned) <= R
        return np.bincount(returned[inside] + R, minlength=2 * R + 1)

    def first_return_histogram(self, T: int) -> np.ndarray:
        """Counts of uncensored walks by return time 0..T."""
        times = self.times[~self.censored]
        return np.bincount(times[times <= T], minlength=T + 1)


def _vertical_step(
    y: np.ndarray, up_prob: np.ndarray, rng: np.random.Generator, reflect: bool
) -> np.ndarray:
    """One Bessel move of signed heights; the walk is symmetric in the sign of y."""
    height = np.abs(y)
    p_up = up_prob[np.minimum(height, len(up_prob) - 1)]
    away = rng.random(y.size) < p_up
    sign = np.sign(y)
    at_zero = height == 0
    if reflect:
        sign[at_zero] = np.where(rng.random(int(at_zero.sum())) < 0.5, 1, -1)
    else:
        sign[at_zero] = 1
    return y + np.where(away, sign, -sign)


def _run_unbounded(spec: WalkSpec, n: int, rng: np.random.Generator) -> Tuple:
    """Walks from the origin until the first return to the baseline."""
    d = spec.dimension
    up_prob = kernel(spec.s).up_probabilities(np.arange(spec.max_steps + 2))

    x = np.zeros((n, d), dtype=np.int64)
    scale = 2 if spec.geometry == "diamond" else 1
    y = np.full(n, scale * spec.start_height, dtype=np.int64)
    sites = np.zeros((n, d), dtype=np.int64)
    times = np.full(n, spec.max_steps, dtype=np.int64)
    censored = np.ones(n, dtype=bool)
    active = np.arange(n)

    for t in range(1, spec.max_steps + 1):
        if active.size == 0:
            break
        xa, ya = x[active], y[active]
        if spec.geometry == "diamond":
            xa[:, 0] += np.where(rng.random(active.size) < 0.5, 1, -1)
            ya = _vertical_step(ya, up_prob, rng, spec.reflect)
            vertical = np.ones(active.size, dtype=bool)
        else:
            vertical = rng.random(active.size) < 0.5
            horizontal = np.flatnonzero(~vertical)
            axis = rng.integers(0, d, size=horizontal.size)
            step = np.where(rng.random(horizontal.size) < 0.5, 1, -1)
            xa[horizontal, axis] += step
            moved = np.flatnonzero(vertical)
            ya[moved] = _vertical_step(ya[moved], up_prob, rng, spec.reflect)
        x[active], y[active] = xa, ya

        done = vertical & (ya == 0)
        if np.any(done):
            finished = active[done]
            times[finished] = t
            censored[finished] = False
            active = active[~done]

    sites[:] = x
    if spec.geometry == "diamond":
        # Index units: returns happen at even u
        sites[:, 0] //= 2
    return sites, times, censored, {}


def _run_in_domain(spec: WalkSpec, n: int, rng: np.random.Generator) -> Tuple:
    """
    Diamond walks started above the origin, stopped on killed sites.

    Observed sites and reported sites are index coordinates (u, v).
    """
    domain = spec.domain.build()
    if domain.lattice != "diamond":
        raise ValueError("Domain walks run on diamond-graph domains")
    reflect = not domain.free_bottom
    up_prob = kernel(spec.s).up_probabilities(np.arange(domain.max_height + 2))

    u = np.zeros(n, dtype=np.int64)
    v = np.full(n, 2 * spec.start_height, dtype=np.int64)
    if np.any(domain.lookup(u[:1], v[:1]) < 0):
        raise ValueError("Walk must start at an alive site")
    times = np.full(n, spec.max_steps, dtype=np.int64)
    censored = np.ones(n, dtype=bool)
    observe = [tuple(site) for site in spec.observe_sites]
    visits = {site: 0 for site in observe}
    active = np.arange(n)

    for t in range(1, spec.max_steps + 1):
        if active.size == 0:
            break
        ua, va = u[active], v[active]
        ua = ua + np.where(rng.random(active.size) < 0.5, 1, -1)
        va = _vertical_step(va, up_prob, rng, reflect)
        u[active], v[active] = ua, va

        for site in observe:
            visits[site] += int(np.sum((ua == site[0]) & (va == site[1])))

        done = domain.lookup(ua, va) < 0
        if np.any(done):
            finished = active[done]
            times[finished] = t
            censored[finished] = False
            active = active[~done]

    sites = np.column_stack([u, v])
    return sites, times, censored, visits


def _run_replica(spec: WalkSpec, n: int, rng: np.random.Generator) -> Tuple:
    if spec.domain is None:
        return _run_unbounded(spec, n, rng)
    if spec.geometry != "diamond":
        raise ValueError("Grid walks run on the unbounded half-space only")
    return _run_in_domain(spec, n, rng)


def simulate_walk(
    spec: WalkSpec,
    num_workers: Optional[int] = None,
    show_progress: bool = False,
) -> WalkSummary:
    """
    Simulate ``spec.n_walks`` independent walks.

    Walks are split into replicas of fixed size, each with its own stream
    derived from ``(seed, replica)``. Replicas run on a thread pool and are
    merged in replica order, so the result depends only on the WalkSpec.

    Args:
        spec: Walk parameters
        num_workers: Worker threads (default: Config.THREADS)
        show_progress: Show a progress bar over replicas

    Returns:
        WalkSummary
    """
    n_replicas = max(1, -(-spec.n_walks // REPLICA_SIZE))
    counts = split_counts(spec.n_walks, n_replicas)
    streams = spawn_generators(spec.seed, n_replicas)
    workers = num_workers or Config.THREADS

    logger.info(
        f"Simulating {spec.n_walks} {spec.geometry} walks (s={spec.s}) "
        f"in {n_replicas} replicas on {workers} threads"
    )

    results: List[Tuple] = [None] * n_replicas
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(_run_replica, spec, counts[i], streams[i]): i
            for i in range(n_replicas)
        }
        iterator = futures
        if show_progress:
            iterator = tqdm(futures, total=n_replicas, desc="Walk replicas", unit="replicas")
        for future in iterator:
            results[futures[future]] = future.result()

    sites = np.concatenate([r[0] for r in results])
    times = np.concatenate([r[1] for r in results])
    censored = np.concatenate([r[2] for r in results])
    visits: Dict[Tuple[int, int], int] = {}
    for r in results:
        for site, count in r[3].items():
            visits[site] = visits.get(site, 0) + count

    summary = WalkSummary(spec=spec, sites=sites, times=times, censored=censored, visits=visits)
    if summary.n_censored:
        logger.warning(f"⚠️  {summary.n_censored}/{summary.n_walks} walks censored at {spec.max_steps} steps")
    return summary
