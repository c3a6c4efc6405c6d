"""
Counter-based random streams.

Streams are keyed by (master seed, experiment, n, replicate, phase) through
SeedSequence spawn keys and drive a Philox generator, so a replicate can be
replayed in isolation regardless of which worker ran it.
"""

from typing import Sequence
import numpy as np
from numpy.random import Generator, Philox, SeedSequence

# Phases of a single replicate
PHASE_DEGREES = 0
PHASE_PERCOLATION = 1
PHASE_EXPLORATION = 2
PHASE_LIMIT = 3
PHASE_MARKS = 4

_MASK64 = (1 << 64) - 1


def make_rng(master_seed: int, *keys: int) -> Generator:
    """Build an independent generator for the given key path"""
    spawn_key = tuple(int(k) & _MASK64 for k in keys)
    seq = SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=spawn_key)
    return Generator(Philox(seq))


def stream_seed(master_seed: int, keys: Sequence[int]) -> int:
    """64-bit fingerprint of a stream, recorded in report rows"""
    spawn_key = tuple(int(k) & _MASK64 for k in keys)
    seq = SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=spawn_key)
    return int(seq.generate_state(1, dtype=np.uint64)[0])
