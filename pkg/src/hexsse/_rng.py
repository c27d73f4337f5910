"""Deterministic 64-bit pseudo-random stream (xoshiro256**).

The generator state is four uint64 words held in a numpy array so that the
compiled and pure-Python sweep kernels can advance the *same* stream and
produce bit-identical Markov chains.  Seeding and stream splitting use
splitmix64: chain k of a master seed is seeded from outputs 4k..4k+3 of the
splitmix64 sequence started at ``master + k * GOLDEN``.
"""
from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_DOUBLE_NORM = 1.0 / 9007199254740992.0  # 2**-53


def splitmix64(x: int) -> tuple[int, int]:
    """Advance a splitmix64 state, returning (new_state, output)."""
    x = (x + GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def seed_state(seed: int, stream: int = 0) -> np.ndarray:
    """Four xoshiro256** words for chain `stream` of `seed`."""
    x = (int(seed) + stream * GOLDEN) & MASK64
    words = []
    for _ in range(4):
        x, z = splitmix64(x)
        words.append(z)
    if not any(words):  # all-zero state is the one forbidden seed
        words[0] = 1
    return np.array(words, dtype=np.uint64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def next_u64(state: np.ndarray) -> int:
    """One xoshiro256** step on a 4-word state array."""
    s0, s1, s2, s3 = (int(state[0]), int(state[1]), int(state[2]), int(state[3]))
    result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


def next_double(state: np.ndarray) -> float:
    """Uniform double in [0, 1) from the top 53 bits."""
    return (next_u64(state) >> 11) * _DOUBLE_NORM
