"""Deterministic randomness: named, counter-based substreams.

Every random operation in the package draws from a stream identified by a
64-bit seed plus a name path (e.g. ``substream(seed, "tree", 3)``).  Streams
are backed by Philox, a counter-based generator, so identical (seed, path)
always reproduces the same output and distinct paths are independent.
Graphs and samplers never share a bare generator; parallel callers use
distinct paths.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def _digest(seed: int, path: tuple) -> bytes:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    name = "/".join(str(p) for p in path)
    return hashlib.blake2b(
        name.encode("utf-8"), digest_size=16, key=seed.to_bytes(8, "little")
    ).digest()


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for (seed, path).  Same inputs, bit-identical stream."""
    key = int.from_bytes(_digest(seed, path), "little")
    return np.random.Generator(np.random.Philox(key=key))


def child_seed(seed: int, *path) -> int:
    """Derive a 64-bit child seed, for handing to an operation that seeds itself."""
    return int.from_bytes(_digest(seed, path)[:8], "little")


class BoundedDraws:
    """Buffered unbiased integer draws below varying bounds.

    Consumes raw 64-bit words from a generator and reduces them by rejection,
    so walk decisions involve no floating point and no platform-dependent
    rounding.  Cheap enough to sit inside per-step loops.
    """

    __slots__ = ("_gen", "_buf", "_pos", "_size", "_cap")

    def __init__(self, gen: np.random.Generator, size: int = 64, cap: int = 16384):
        self._gen = gen
        self._size = size
        self._cap = cap
        self._buf = gen.integers(0, 1 << 64, size=size, dtype=np.uint64).tolist()
        self._pos = 0

    def _next_word(self) -> int:
        if self._pos >= len(self._buf):
            self._size = min(self._size * 4, self._cap)
            self._buf = self._gen.integers(
                0, 1 << 64, size=self._size, dtype=np.uint64
            ).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // bound) * bound
        w = self._next_word()
        while w >= limit:
            w = self._next_word()
        return w % bound
