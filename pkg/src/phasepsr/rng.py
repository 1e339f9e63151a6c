"""Deterministic, bit-reproducible random numbers.

Algorithm (fixed, so any implementation can reproduce a run exactly):

* Seeding: a 64-bit seed drives SplitMix64; its first four outputs form the
  xoshiro256** state.
* Generator: xoshiro256** (Blackman & Vigna, 2018).
* Uniform doubles: ``(x >> 11) * 2**-53`` in [0, 1).
* Independent streams: stream ``i`` of a seed is the base state advanced by
  ``i`` applications of the standard xoshiro256 ``jump()`` (2**128 steps each).
* Normals: Box-Muller on consecutive uniform pairs ``(u1, u2)``:
  ``sqrt(-2 ln(1 - u1)) * (cos 2 pi u2, sin 2 pi u2)``.
"""

import math

import numpy as np

from phasepsr import kernels

MASK64 = (1 << 64) - 1
_JUMP = (0x180EC6D33CFD0ABA, 0xD5A61266F0C9392C, 0xA9582618E03FC9AA, 0x39ABDC4529B1661C)


def splitmix64(x):
    """One SplitMix64 step; returns ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** generator seeded through SplitMix64."""

    def __init__(self, seed=0, stream=0):
        x = int(seed) & MASK64
        words = []
        for _ in range(4):
            x, out = splitmix64(x)
            words.append(out)
        self.state = np.array(words, dtype=np.uint64)
        for _ in range(stream):
            self.jump()

    @classmethod
    def from_state(cls, state):
        gen = cls.__new__(cls)
        gen.state = np.array(state, dtype=np.uint64)
        return gen

    def next_u64(self, count=None):
        out = kernels.xoshiro_next(self.state, 1 if count is None else count)
        return int(out[0]) if count is None else out

    def random(self, count=None):
        out = kernels.xoshiro_uniforms(self.state, 1 if count is None else count)
        return float(out[0]) if count is None else out

    def normal(self, count):
        """``count`` standard normals via Box-Muller (pairs, excess dropped)."""
        pairs = (count + 1) // 2
        u = self.random(2 * pairs)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        ang = 2.0 * math.pi * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(ang)
        z[1::2] = r * np.sin(ang)
        return z[:count]

    def jump(self):
        s = [0, 0, 0, 0]
        for word in _JUMP:
            for b in range(64):
                if (word >> b) & 1:
                    for i in range(4):
                        s[i] ^= int(self.state[i])
                self.next_u64()
        self.state[:] = np.array(s, dtype=np.uint64)

    def sample_counts(self, probabilities, shots):
        """Draw ``shots`` outcomes from a discrete distribution, return counts.

        Outcome ``i`` is the first index with ``u < cdf[i]``. Zero-probability
        outcomes can never be drawn.
        """
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < -1e-12):
            raise ValueError("probabilities must be a non-empty vector of non-negative reals")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if total <= 0.0:
            raise ValueError("probabilities sum to zero")
        cdf = np.cumsum(p / total)
        last = int(np.nonzero(p > 0.0)[0][-1])
        cdf[last:] = 1.0
        return kernels.sample_counts(self.state, cdf, int(shots))


def stream(seed, index):
    """Independent generator for work item ``index`` under ``seed``."""
    return Xoshiro256(seed, stream=index)
