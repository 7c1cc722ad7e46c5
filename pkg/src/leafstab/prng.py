"""Deterministic perturbation directions from a splitmix64 stream.

The simulation front end perturbs an equilibrium along a pseudo-random
unit vector. The generator is fixed here, bit by bit, so any other
implementation can reproduce the direction from the seed alone:

1. splitmix64 with the usual constants; state advances by
   0x9E3779B97F4B7C15 and each output is finalized with the
   30/27/31-shift xor-multiply mix.
2. Each 64-bit output z is mapped to a double: u = (z >> 11) / 2^53,
   uniform on [0, 1).
3. Standard normals come from Box-Muller pairs
   (sqrt(-2 ln u1') cos(2 pi u2), sqrt(-2 ln u1') sin(2 pi u2)) where
   u1' = ((z1 >> 11) + 1) / 2^53 avoids log(0).
4. The first n normals, in order, are normalized to a Euclidean unit
   vector.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4B7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


class SplitMix64:
    """Minimal splitmix64 stream over Python integers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) / _TWO53

    def next_normal_pair(self) -> tuple[float, float]:
        u1 = ((self.next_u64() >> 11) + 1) / _TWO53
        u2 = self.next_unit()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)


def unit_direction(seed: int, n: int) -> np.ndarray:
    """Deterministic pseudo-random unit vector in R^n for a 64-bit seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    stream = SplitMix64(seed)
    vals: list[float] = []
    while len(vals) < n:
        vals.extend(stream.next_normal_pair())
    v = np.array(vals[:n])
    norm = float(np.sqrt(v @ v))
    if norm == 0.0:  # not reachable in practice; Box-Muller outputs r > 0
        v[0] = 1.0
        norm = 1.0
    return v / norm
