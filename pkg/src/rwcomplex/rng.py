"""Deterministic counter-based random streams.

Every draw is a pure function of (seed, stream tag, counter), so arbitrary
slices of a stream can be materialized in any order, on any worker, and
still agree bit for bit.  The generator is the SplitMix64 sequence: output
at counter r is the SplitMix64 finalizer applied to key + (r+1)*GOLDEN.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)

# Stream tags: presence bit, weight, and their independent primed copies.
TAG_B = 0
TAG_W = 1
TAG_BP = 2
TAG_WP = 3


def mix64(z: int) -> int:
    """SplitMix64 finalizer of a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def stream_key(seed: int, tag: int) -> int:
    """Key for one of the four per-sample streams."""
    return mix64((seed & _MASK) ^ mix64(0xA5A5A5A5A5A5A5A5 + tag))


def child_seed(seed: int, index: int) -> int:
    """Derive an independent child seed (e.g. per-replica from a master)."""
    return mix64(((seed & _MASK) + _GOLDEN * (index + 1)) & _MASK)


def uniform_at(key: int, counter: int) -> float:
    """Scalar 53-bit uniform in [0, 1) at one counter position."""
    z = (key + _GOLDEN * ((counter + 1) & _MASK)) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    z ^= z >> 31
    return (z >> 11) * _INV_2_53


def uniforms(key: int, counters) -> np.ndarray:
    """Vectorized 53-bit uniforms in [0, 1) at the given counter positions.

    Bit-compatible with ``uniform_at``; `counters` may be any integer array
    (scattered, unsorted, repeated).
    """
    r = np.asarray(counters).astype(np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + (r + np.uint64(1)) * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
