"""Deterministic per-replication RNG streams.

Every replication derives its own generator from (seed, rep, purpose) so
results never depend on scheduling or worker count.  Purpose 0 is data
simulation, purpose 1 is bootstrap resampling.
"""
from __future__ import annotations

import numpy as np

DATA_STREAM = 0
BOOT_STREAM = 1


def stream_rng(seed: int, rep: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(rep), int(purpose)))
    return np.random.default_rng(ss)


def derived_seed(seed: int, rep: int, purpose: int) -> int:
    """A 64-bit integer seed for nested runs (e.g. a full test per rep)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(rep), int(purpose)))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
