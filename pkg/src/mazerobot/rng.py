"""Deterministic fair-bit source.

The bit stream is SplitMix64 read least-significant-bit first: bit ``t`` is
bit ``t % 64`` of the 64-bit output word ``t // 64``, where word ``j`` is
``mix64(seed + (j + 1) * GAMMA)``. Being counter based, any position of the
stream can be produced directly, which lets the compiled kernels and the
pure-Python fallback consume bitwise-identical sequences.
"""
from __future__ import annotations

import numpy as np

GENERATOR_ID = "splitmix64-lsb/v1"
DEFAULT_SEED = 20240917

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def word(seed: int, j: int) -> int:
    return mix64(seed + (j + 1) * GAMMA)


def words(seed: int, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count-1`` as a uint64 array (vectorised)."""
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + j * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master: int, index: int) -> int:
    """Per-trial seed: ``mix64(mix64(master) ^ (index * GAMMA mod 2^64))``.

    For a fixed master seed this is injective in ``index`` (multiplication by
    an odd constant, xor and mix64 are all bijections of 64-bit words).
    """
    if index < 0:
        raise ValueError("trial index must be non-negative")
    return mix64(mix64(master) ^ ((index * GAMMA) & MASK64))


class RngStream:
    """Sequential reader over the bit stream of one seed."""

    def __init__(self, seed: int = DEFAULT_SEED, position: int = 0):
        self.seed = int(seed) & MASK64
        self.position = int(position)

    def bit(self, t: int) -> int:
        return (word(self.seed, t >> 6) >> (t & 63)) & 1

    def next_bit(self) -> int:
        b = self.bit(self.position)
        self.position += 1
        return b

    def bits(self, count: int) -> np.ndarray:
        """The next ``count`` bits as a uint8 array; advances the stream."""
        start = self.position
        first, last = start >> 6, (start + count + 63) >> 6
        w = words(self.seed, first, max(last - first, 0))
        allbits = np.unpackbits(w.astype("<u8").view(np.uint8), bitorder="little")
        off = start - (first << 6)
        self.position += count
        return allbits[off:off + count]

    def __repr__(self):
        return f"RngStream(seed={self.seed}, position={self.position})"
