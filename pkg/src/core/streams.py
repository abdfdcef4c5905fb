# src/core/streams.py
"""
Deterministic random streams.

Every random draw in the lab comes from `stream(seed, rep, purpose)`. The
stream depends only on its three arguments, never on which worker thread
asks for it, so results do not change with the worker count.
"""
import numpy as np

PURPOSES = {
    "path": 0,
    "subordinated": 1,
    "oracle": 2,
    "bootstrap": 3,
}


def stream(seed: int, rep: int = 0, purpose: str = "path") -> np.random.Generator:
    """Returns an independent PCG64 generator for (seed, replication, purpose)."""
    if purpose not in PURPOSES:
        raise KeyError(f"unknown stream purpose '{purpose}'; known: {sorted(PURPOSES)}")
    if seed < 0 or rep < 0:
        raise ValueError("seed and replication index must be non-negative")
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(rep), PURPOSES[purpose]))
    return np.random.default_rng(seq)
