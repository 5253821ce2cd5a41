"""Deterministic synthetic splat clouds for tests and benchmarking.

Randomness comes from a SplitMix64 generator implemented on integer
arithmetic, so the same seed yields byte-identical clouds on every
platform.

Kinds:
  sphere           unit-radius surface samples, uniform features in [-1, 1],
                   scales in (0, 0.1]
  cube             uniform samples in [-1, 1]^3, same feature model
  gaussian-mixture three isotropic components at (-2,0,0), (0,2,0), (1,-1,2)
                   with sigmas 0.5, 0.3, 0.8 and weights 0.5, 0.3, 0.2
"""

from __future__ import annotations

import math

import numpy as np

from .core import SplatCloud
from .errors import ConfigError

_MASK = (1 << 64) - 1

MIXTURE_MEANS = ((-2.0, 0.0, 0.0), (0.0, 2.0, 0.0), (1.0, -1.0, 2.0))
MIXTURE_SIGMAS = (0.5, 0.3, 0.8)
MIXTURE_WEIGHTS = (0.5, 0.3, 0.2)


class SplitMix64:
    """Seed-stable 64-bit PRNG (Steele et al. splitmix update)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        # 53-bit mantissa so the value is exactly representable.
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + (hi - lo) * u

    def normal(self) -> float:
        # Box-Muller; u1 kept away from zero.
        u1 = ((self.next_u64() >> 11) + 1) * (1.0 / ((1 << 53) + 1))
        u2 = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def _features_and_scales(rng: SplitMix64, count: int, n_f: int):
    features = np.empty((count, n_f))
    scales = np.empty((count, 3))
    for i in range(count):
        for c in range(n_f):
            features[i, c] = rng.uniform(-1.0, 1.0)
        for c in range(3):
            scales[i, c] = rng.uniform(1e-4, 0.1)
    return features, scales


def make_fixture(kind: str, count: int, n_f: int = 8, seed: int = 0) -> SplatCloud:
    """Generate a deterministic synthetic cloud."""
    if count < 1:
        raise ConfigError("count must be >= 1")
    rng = SplitMix64(seed)
    xyz = np.empty((count, 3))
    if kind == "sphere":
        for i in range(count):
            # Marsaglia-free: normalize a Gaussian triple onto the sphere.
            v = np.array([rng.normal(), rng.normal(), rng.normal()])
            norm = float(np.linalg.norm(v))
            if norm < 1e-12:
                v = np.array([1.0, 0.0, 0.0])
                norm = 1.0
            xyz[i] = v / norm
    elif kind == "cube":
        for i in range(count):
            for c in range(3):
                xyz[i, c] = rng.uniform(-1.0, 1.0)
    elif kind == "gaussian-mixture":
        for i in range(count):
            u = rng.uniform()
            comp = 0
            acc = 0.0
            for k, w in enumerate(MIXTURE_WEIGHTS):
                acc += w
                if u < acc:
                    comp = k
                    break
            mean = MIXTURE_MEANS[comp]
            sigma = MIXTURE_SIGMAS[comp]
            for c in range(3):
                xyz[i, c] = mean[c] + sigma * rng.normal()
    else:
        raise ConfigError(f"unknown fixture kind {kind!r}")
    features, scales = _features_and_scales(rng, count, n_f)
    return SplatCloud(xyz, features, scales)
