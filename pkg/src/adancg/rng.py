"""Small-state deterministic PRNG used for every seeded instance.

The stream is fully pinned so other implementations can regenerate
bit-identical instance data:

* seeding: four successive SplitMix64 outputs starting from ``seed``
  fill the xoshiro256** state;
* integers: xoshiro256** (Blackman & Vigna, 2018);
* uniforms: ``(next() >> 11) * 2**-53`` in ``[0, 1)``;
* normals: Box-Muller on ``u1 = 1 - uniform()`` and ``u2 = uniform()``,
  emitting ``r*cos(2*pi*u2)`` and then ``r*sin(2*pi*u2)`` from each pair.
"""

import math

import numpy as np

_MASK = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / (1 << 53)


def splitmix64(state):
    """Advance a SplitMix64 state; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** generator with Box-Muller normals.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed, expanded through SplitMix64.
    state : sequence of 4 ints, optional
        Raw state; overrides ``seed`` (used for reference test vectors).
    """

    def __init__(self, seed=0, state=None):
        if state is not None:
            s = [int(v) & _MASK for v in state]
            if len(s) != 4 or not any(s):
                raise ValueError("xoshiro256 state must be four words, not all zero")
        else:
            if seed < 0 or seed > _MASK:
                raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
            sm = int(seed)
            s = []
            for _ in range(4):
                sm, out = splitmix64(sm)
                s.append(out)
        self._s = s
        self._spare = None

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self):
        return (self.next_u64() >> 11) * _INV_2_53

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(_TWO_PI * u2)
        return r * math.cos(_TWO_PI * u2)

    def normals(self, size):
        """Draw standard normals into an array of shape ``size`` (C order)."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        normal = self.normal
        return np.array([normal() for _ in range(count)], dtype=float).reshape(shape)

    def uniforms(self, size):
        shape = (size,) if isinstance(size, int) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        uniform = self.uniform
        return np.array([uniform() for _ in range(count)], dtype=float).reshape(shape)
