"""Deterministic, replayable random streams.

A stream is the pair ``(seed, counter)``; every draw is a pure function of it,
so resetting the counter replays the identical values bitwise.  Counter
consumption is fixed and documented: 1 per uniform entry, ``n + n%2`` per
``n``-entry normal draw (Box-Muller pairs).  This is what lets the seed-replay
memory strategy regenerate a perturbation instead of storing it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

_MASK = 0xFFFFFFFFFFFFFFFF


def normal_stride(n: int) -> int:
    """Counters consumed by an ``n``-entry normal draw."""
    return n + (n & 1)


def derive_seed(seed: int, salt: int) -> int:
    """Decorrelated child seed for an auxiliary stream (e.g. initial iterates)."""
    from .kernels import pykern

    return pykern._mix_int(((seed & _MASK) ^ (salt & _MASK)) * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019)


@dataclass
class RngStream:
    """A (seed, counter) random stream.

    Mutable only through its counter; draws advance it by the documented
    stride.  ``reserve_normals`` hands out the base counter of a draw without
    materializing it, for callers that stream the values through fused kernels.
    """

    seed: int
    counter: int = 0

    def normals(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.float64)
        kernels.active().normal_fill(out, self.seed, self.counter)
        self.counter += normal_stride(n)
        return out

    def uniforms(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.float64)
        kernels.active().uniform_fill(out, self.seed, self.counter)
        self.counter += n
        return out

    def reserve_normals(self, n: int) -> int:
        """Advance past one ``n``-entry normal draw, returning its base counter."""
        base = self.counter
        self.counter += normal_stride(n)
        return base

    def clone(self) -> "RngStream":
        return RngStream(self.seed, self.counter)
