"""Batch-means error bars for correlated Markov chain output."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr


@dataclass(frozen=True)
class BatchMeans:
    """Batch-means summary of one or more time series."""

    mean: np.ndarray
    stderr: np.ndarray
    batches: np.ndarray

    @property
    def n_batches(self) -> int:
        return int(self.batches.shape[0])


def batch_means(samples: np.ndarray, n_batches: int) -> BatchMeans:
    """
    Split a chain into contiguous batches and average each one.

    Args:
        samples: Array of shape (n_samples,) or (n_samples, n_series)
        n_batches: Number of batches (leftover samples at the end are dropped)

    Returns:
        Overall mean, standard error of the mean and the batch averages
    """
    samples = np.asarray(samples, dtype=float)
    squeeze = samples.ndim == 1
    if squeeze:
        samples = samples[:, None]
    n_samples = samples.shape[0]
    if n_batches < 2:
        raise ValueError(f"Need at least 2 batches, got {n_batches}")
    size = n_samples // n_batches
    if size < 1:
        raise ValueError(f"{n_samples} samples cannot fill {n_batches} batches")

    blocks = samples[: size * n_batches].reshape(n_batches, size, -1).mean(axis=1)
    mean = blocks.mean(axis=0)
    stderr = blocks.std(axis=0, ddof=1) / np.sqrt(n_batches)
    if squeeze:
        return BatchMeans(mean=mean[0], stderr=stderr[0], batches=blocks[:, 0])
    return BatchMeans(mean=mean, stderr=stderr, batches=blocks)


def batch_statistic(batches: np.ndarray) -> tuple:
    """Mean and standard error of a per-batch derived quantity."""
    batches = np.asarray(batches, dtype=float)
    return float(batches.mean()), float(batches.std(ddof=1) / np.sqrt(batches.size))


def monotone_drift(batches: np.ndarray, threshold: float = 0.9) -> bool:
    """
    Flag a series of batch means that trends in one direction.

    Uses the Spearman rank correlation of the batch means against batch index.
    """
    batches = np.asarray(batches, dtype=float)
    if batches.size < 3 or np.allclose(batches, batches[0]):
        return False
    rho = spearmanr(np.arange(batches.size), batches).statistic
    return bool(np.isfinite(rho) and abs(rho) >= threshold)
