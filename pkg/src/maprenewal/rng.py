"""Seeded, splittable random streams.

All randomness flows through :func:`stream`, which derives an independent
PCG64 generator from a user seed and a tuple of integer keys.  The mixing
function is numpy's :class:`~numpy.random.SeedSequence` hash, fed with
``entropy=seed`` and ``spawn_key=keys``; two different key tuples give
statistically independent streams, and the same (seed, keys) pair always
gives the same stream regardless of how work is scheduled.

Monte Carlo drivers split trajectories into fixed-size blocks and use
``stream(seed, purpose, block_index)``, so the trajectories owned by a
block never depend on which worker runs it or in which order.
"""

from __future__ import annotations

import numpy as np

# purpose tags keep unrelated consumers of one seed apart
SIMULATE = 1
RENEWAL_MC = 2
SEMIGROUP_MC = 3
AR_MC = 4
GRID = 5


def stream(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def block_sizes(n_items: int, block: int) -> list[int]:
    """Sizes of the fixed blocks that partition ``n_items``."""
    full, rest = divmod(n_items, block)
    return [block] * full + ([rest] if rest else [])
