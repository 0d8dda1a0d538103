"""Counter-based uniform random streams.

A draw depends only on (key, index), never on call order, so shot loops
can be vectorized, chunked, or run in parallel and still aggregate to
bitwise-identical results for a fixed seed. The generator is the
splitmix64 finalizer over a Weyl sequence keyed by the seed.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
_INV_2_53 = float(2.0**-53)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def derive_key(seed: int, *stream: int) -> int:
    """Fold substream identifiers into a seed, giving independent keys
    for e.g. (seed, trial, purpose) triples. Every component passes
    through the finalizer before combining, so nearby integers share no
    structure."""
    with np.errstate(over="ignore"):
        z = _mix(np.uint64(seed & _MASK) + _GAMMA)
        for part in stream:
            z = _mix(z + _GAMMA + _mix(np.uint64(part & _MASK) + _GAMMA))
    return int(z)


def uniforms(key: int, indices) -> np.ndarray:
    """Uniform [0, 1) doubles at the given stream indices."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        raw = _mix(np.uint64(key & _MASK) + (idx + np.uint64(1)) * _GAMMA)
    return (raw >> np.uint64(11)).astype(np.float64) * _INV_2_53


def uniform(key: int, index: int) -> float:
    return float(uniforms(key, np.array([index], dtype=np.uint64))[0])
