"""Core domain types: splat clouds, grid geometry, codec configuration.

All types are plain immutable dataclasses wrapping numpy arrays; they are
safe to share read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyCloud, InvalidValue

# Relative inflation applied to the tight bounding box so points sitting
# exactly on the max face still quantize to an in-range cell.
BBOX_EPS_REL = 1e-9


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with strictly positive extent on every axis."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.min, dtype=np.float64).reshape(3)
        hi = np.asarray(self.max, dtype=np.float64).reshape(3)
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidValue("bounding box must be finite")
        if not np.all(hi > lo):
            raise InvalidValue("bounding box must have positive extent on every axis")

    @property
    def extent(self) -> np.ndarray:
        return self.max - self.min

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.min) and np.all(x <= self.max))


@dataclass(frozen=True)
class Splat:
    """One Gaussian splat: coordinate, abstract feature, scaling controller."""

    x: np.ndarray
    f: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64).reshape(3)
        f = np.asarray(self.f, dtype=np.float64).reshape(-1)
        s = np.asarray(self.s, dtype=np.float64).reshape(3)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "s", s)
        for arr in (x, f, s):
            if not np.all(np.isfinite(arr)):
                raise InvalidValue("splat components must be finite")


class SplatCloud:
    """Ordered collection of splats stored as dense arrays.

    Arrays are made read-only at construction; the cloud never mutates.
    """

    def __init__(self, xyz, features, scales, bbox: BoundingBox | None = None):
        xyz = np.ascontiguousarray(xyz, dtype=np.float64)
        features = np.ascontiguousarray(features, dtype=np.float64)
        scales = np.ascontiguousarray(scales, dtype=np.float64)
        if xyz.ndim != 2 or xyz.shape[1] != 3:
            raise InvalidValue("xyz must have shape (n, 3)")
        n = xyz.shape[0]
        if features.ndim != 2 or features.shape[0] != n:
            raise InvalidValue("features must have shape (n, n_f)")
        if scales.shape != (n, 3):
            raise InvalidValue("scales must have shape (n, 3)")
        for arr in (xyz, features, scales):
            if not np.all(np.isfinite(arr)):
                raise InvalidValue("cloud arrays must be finite")
            arr.setflags(write=False)
        self.xyz = xyz
        self.features = features
        self.scales = scales
        self.n_f = features.shape[1]
        if bbox is None:
            bbox = tight_bounding_box_arrays(xyz)
        else:
            if n and not (
                np.all(xyz >= bbox.min[None, :]) and np.all(xyz <= bbox.max[None, :])
            ):
                raise InvalidValue("bbox does not contain every coordinate")
        self.bbox = bbox

    def __len__(self) -> int:
        return self.xyz.shape[0]

    def splat(self, i: int) -> Splat:
        return Splat(self.xyz[i], self.features[i], self.scales[i])

    @classmethod
    def from_splats(cls, splats, n_f=None) -> "SplatCloud":
        if not splats:
            raise EmptyCloud("cannot build a cloud from zero splats")
        xyz = np.stack([s.x for s in splats])
        features = np.stack([s.f for s in splats])
        scales = np.stack([s.s for s in splats])
        if n_f is not None and features.shape[1] != n_f:
            raise InvalidValue(
                f"feature dimension {features.shape[1]} != configured n_f {n_f}"
            )
        return cls(xyz, features, scales)


@dataclass(frozen=True)
class CodecConfig:
    """Tunable parameters of the codec pipeline."""

    recursion_depth: int = 16
    n_f: int = 8
    sigma_floor: float = 1e-6
    delta_floor: float = 1e-6
    min_bin_probability: float = 2.0 ** -16
    chunk_size: int = 65536

    def __post_init__(self):
        if not (1 <= self.recursion_depth <= 21):
            raise ConfigError("recursion_depth must be in [1, 21] (Morton codes fit 64 bits)")
        if self.n_f < 1:
            raise ConfigError("n_f must be positive")
        if self.sigma_floor <= 0 or self.delta_floor <= 0:
            raise ConfigError("floors must be positive")
        if not (0 < self.min_bin_probability < 1):
            raise ConfigError("min_bin_probability must be in (0, 1)")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be positive")


def tight_bounding_box_arrays(xyz: np.ndarray) -> BoundingBox:
    """Componentwise min/max of the coordinates, inflated so max-face points
    quantize in-range.  Degenerate axes get an absolute-scale inflation."""
    if xyz.shape[0] == 0:
        raise EmptyCloud("empty cloud has no bounding box")
    lo = xyz.min(axis=0).astype(np.float64)
    hi = xyz.max(axis=0).astype(np.float64)
    extent = hi - lo
    degenerate = extent <= 0.0
    eps = BBOX_EPS_REL * np.maximum(1.0, np.abs(lo))
    new_lo = np.where(degenerate, lo - eps, lo)
    new_hi = np.where(degenerate, hi + eps, hi + BBOX_EPS_REL * extent)
    return BoundingBox(new_lo, new_hi)


def tight_bounding_box(cloud: SplatCloud) -> BoundingBox:
    """Bounding box of a cloud, see :func:`tight_bounding_box_arrays`."""
    return tight_bounding_box_arrays(cloud.xyz)
