"""Counter-based, splittable random streams.

Every random draw in the package goes through a ``numpy.random.Generator``
backed by Philox. Replica streams are derived from ``(seed, replica)`` with
``SeedSequence.spawn`` so results do not depend on how work is scheduled.
"""

from typing import List, Optional

import numpy as np


def make_generator(seed: Optional[int]) -> np.random.Generator:
    """Return a Philox generator for ``seed`` (fresh entropy when ``None``)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_generators(seed: Optional[int], count: int) -> List[np.random.Generator]:
    """
    Derive ``count`` independent streams from one seed.

    Args:
        seed: Root seed (64-bit integer)
        count: Number of replica streams

    Returns:
        Generators in replica order
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def split_counts(total: int, parts: int) -> List[int]:
    """Split ``total`` items into ``parts`` near-equal chunks, larger ones first."""
    base, remainder = divmod(total, parts)
    return [base + (1 if i < remainder else 0) for i in range(parts)]
