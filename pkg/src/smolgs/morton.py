"""Morton (Z-order) codes for 3D grid indices.

Bit convention: bit 3k of the code is bit k of ix, bit 3k+1 is bit k of iy,
bit 3k+2 is bit k of iz.  The child index inside an octree node is therefore
the 3-bit group (z << 2 | y << 1 | x) of the corresponding level.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidCode, OutOfBounds

_MAX_DEPTH = 21  # 3 * 21 = 63 bits fits an unsigned 64-bit word


def _check_depth(depth: int):
    if not (1 <= depth <= _MAX_DEPTH):
        raise InvalidCode(f"depth must be in [1, {_MAX_DEPTH}], got {depth}")


def _spread3(v: np.ndarray) -> np.ndarray:
    """Insert two zero bits after each of the low 21 bits of v."""
    v = v.astype(np.uint64)
    v = (v | (v << np.uint64(32))) & np.uint64(0x1F00000000FFFF)
    v = (v | (v << np.uint64(16))) & np.uint64(0x1F0000FF0000FF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x100F00F00F00F00F)
    v = (v | (v << np.uint64(4))) & np.uint64(0x10C30C30C30C30C3)
    v = (v | (v << np.uint64(2))) & np.uint64(0x1249249249249249)
    return v


def _compact3(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_spread3`."""
    v = v.astype(np.uint64) & np.uint64(0x1249249249249249)
    v = (v | (v >> np.uint64(2))) & np.uint64(0x10C30C30C30C30C3)
    v = (v | (v >> np.uint64(4))) & np.uint64(0x100F00F00F00F00F)
    v = (v | (v >> np.uint64(8))) & np.uint64(0x1F0000FF0000FF)
    v = (v | (v >> np.uint64(16))) & np.uint64(0x1F00000000FFFF)
    v = (v | (v >> np.uint64(32))) & np.uint64(0x1FFFFF)
    return v


def morton_encode_arrays(ix, iy, iz, depth: int) -> np.ndarray:
    """Interleave per-axis index arrays into Morton codes (uint64)."""
    _check_depth(depth)
    ix = np.asarray(ix, dtype=np.uint64)
    iy = np.asarray(iy, dtype=np.uint64)
    iz = np.asarray(iz, dtype=np.uint64)
    limit = np.uint64(1) << np.uint64(depth)
    if np.any(ix >= limit) or np.any(iy >= limit) or np.any(iz >= limit):
        raise OutOfBounds(f"grid index out of range for depth {depth}")
    return (
        _spread3(ix)
        | (_spread3(iy) << np.uint64(1))
        | (_spread3(iz) << np.uint64(2))
    )


def morton_decode_arrays(codes, depth: int):
    """Split Morton codes back into (ix, iy, iz) arrays."""
    _check_depth(depth)
    codes = np.asarray(codes, dtype=np.uint64)
    if depth < _MAX_DEPTH and np.any(codes >> np.uint64(3 * depth)):
        raise InvalidCode(f"code exceeds 2^{3 * depth}")
    return _compact3(codes), _compact3(codes >> np.uint64(1)), _compact3(codes >> np.uint64(2))


def morton_encode(index, depth: int) -> int:
    """Morton code of a single (ix, iy, iz) grid index."""
    ix, iy, iz = index
    code = morton_encode_arrays(
        np.asarray([ix]), np.asarray([iy]), np.asarray([iz]), depth
    )
    return int(code[0])


def morton_decode(code: int, depth: int):
    """Grid index (ix, iy, iz) of a single Morton code."""
    _check_depth(depth)
    if not (0 <= code < 1 << (3 * depth)):
        raise InvalidCode(f"code {code} out of range for depth {depth}")
    ix, iy, iz = morton_decode_arrays(np.asarray([code], dtype=np.uint64), depth)
    return int(ix[0]), int(iy[0]), int(iz[0])
