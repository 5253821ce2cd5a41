"""Occupancy-octree coordinate coding.

Coordinates are snapped to a 2^R per-axis grid inside the scene bounding
box.  The set of occupied leaf cells is stored as a breadth-first sequence
of 8-bit occupancy bytes: one byte per non-empty internal node, levels
coarse to fine, nodes within a level in ascending Morton order, child bit j
set iff child j (j = z<<2 | y<<1 | x) is non-empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, SplatCloud
from .errors import CorruptStream, EmptyCloud, OutOfBounds
from .morton import morton_decode_arrays, morton_encode_arrays


@dataclass(frozen=True)
class OctreeStream:
    """Serialized occupancy octree plus the geometry needed to invert it."""

    bbox: BoundingBox
    depth: int
    occupancy_bytes: bytes
    leaf_count: int


def quantize_coordinates(xyz: np.ndarray, bbox: BoundingBox, depth: int) -> np.ndarray:
    """Map coordinates to integer grid indices, shape (n, 3) uint64.

    i_k = floor((x_k - min_k) / cell_k), clamped to 2^R - 1.
    """
    xyz = np.asarray(xyz, dtype=np.float64)
    flat = xyz.reshape(-1, 3)
    if np.any(flat < bbox.min[None, :]) or np.any(flat > bbox.max[None, :]):
        raise OutOfBounds("coordinate outside bounding box")
    n_cells = 1 << depth
    cell = bbox.extent / n_cells
    idx = np.floor((flat - bbox.min[None, :]) / cell[None, :])
    idx = np.clip(idx, 0, n_cells - 1).astype(np.uint64)
    return idx.reshape(xyz.shape)


def quantize_coordinate(x, bbox: BoundingBox, depth: int):
    """Grid index of a single coordinate."""
    idx = quantize_coordinates(np.asarray(x, dtype=np.float64).reshape(1, 3), bbox, depth)
    return int(idx[0, 0]), int(idx[0, 1]), int(idx[0, 2])


def dequantize_indices(indices: np.ndarray, bbox: BoundingBox, depth: int) -> np.ndarray:
    """Cell centers of grid indices, shape (n, 3) float64."""
    indices = np.asarray(indices, dtype=np.float64)
    cell = bbox.extent / (1 << depth)
    return bbox.min[None, :] + (indices + 0.5) * cell[None, :]


def dequantize_index(index, bbox: BoundingBox, depth: int):
    """Cell center of a single grid index."""
    return dequantize_indices(np.asarray(index, dtype=np.float64).reshape(1, 3), bbox, depth)[0]


def leaf_morton_codes(cloud: SplatCloud, depth: int) -> np.ndarray:
    """Morton codes of every splat's leaf cell (unsorted, one per splat)."""
    idx = quantize_coordinates(cloud.xyz, cloud.bbox, depth)
    return morton_encode_arrays(idx[:, 0], idx[:, 1], idx[:, 2], depth)


def build_octree(cloud: SplatCloud, depth: int):
    """Build the occupancy byte stream for a cloud.

    Returns (stream, canonical_order, merge_groups):
      canonical_order -- one original splat index per distinct leaf, leaves
        in ascending Morton order (the representative is the lowest original
        index that fell into the leaf);
      merge_groups -- per leaf, the list of all original splat indices that
        quantized to it, in original order.
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot build an octree from an empty cloud")
    codes = leaf_morton_codes(cloud, depth)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    unique_codes, first_pos, counts = np.unique(
        sorted_codes, return_index=True, return_counts=True
    )
    canonical_order = order[first_pos]
    merge_groups = [
        sorted(order[start : start + cnt].tolist())
        for start, cnt in zip(first_pos.tolist(), counts.tolist())
    ]
    # The representative is the lowest original index in each group.
    canonical_order = np.asarray([g[0] for g in merge_groups], dtype=np.int64)

    out = bytearray()
    for level in range(depth):
        shift = np.uint64(3 * (depth - level - 1))
        # Distinct (node prefix, child) pairs at this level, Morton-sorted.
        pairs = np.unique(unique_codes >> shift)
        node = pairs >> np.uint64(3)
        child = (pairs & np.uint64(7)).astype(np.uint8)
        starts = np.flatnonzero(np.r_[True, node[1:] != node[:-1]])
        level_bytes = np.bitwise_or.reduceat(np.uint8(1) << child, starts)
        out.extend(level_bytes.tobytes())
    stream = OctreeStream(
        bbox=cloud.bbox,
        depth=depth,
        occupancy_bytes=bytes(out),
        leaf_count=len(unique_codes),
    )
    return stream, canonical_order, merge_groups


def decode_octree(stream: OctreeStream) -> np.ndarray:
    """Recover the occupied leaf grid indices, shape (leaf_count, 3),
    in ascending Morton order."""
    depth = stream.depth
    data = stream.occupancy_bytes
    pos = 0
    # Morton-code prefixes of the non-empty nodes at the current level.
    prefixes = np.zeros(1, dtype=np.uint64)
    for level in range(depth):
        n_nodes = len(prefixes)
        if pos + n_nodes > len(data):
            raise CorruptStream("occupancy stream truncated")
        level_bytes = np.frombuffer(data, dtype=np.uint8, count=n_nodes, offset=pos)
        pos += n_nodes
        if np.any(level_bytes == 0):
            raise CorruptStream("zero occupancy byte (empty node emitted)")
        bits = (level_bytes[:, None] >> np.arange(8, dtype=np.uint8)[None, :]) & 1
        parent_idx, child_idx = np.nonzero(bits)
        prefixes = (prefixes[parent_idx] << np.uint64(3)) | child_idx.astype(np.uint64)
    if pos != len(data):
        raise CorruptStream("trailing bytes after last octree level")
    if len(prefixes) != stream.leaf_count:
        raise CorruptStream(
            f"decoded {len(prefixes)} leaves, header says {stream.leaf_count}"
        )
    ix, iy, iz = morton_decode_arrays(prefixes, depth)
    return np.stack([ix, iy, iz], axis=1)


def occupancy_statistics(stream: OctreeStream):
    """Per-level popcount histogram and global byte-value frequencies.

    Returns (per_level, byte_freq): per_level is a list (level 0 first) of
    length-9 arrays where entry p counts bytes with popcount p at that
    level; byte_freq is a length-256 array of global byte-value counts.
    """
    data = np.frombuffer(stream.occupancy_bytes, dtype=np.uint8)
    popcount = np.asarray([bin(v).count("1") for v in range(256)], dtype=np.int64)
    byte_freq = np.bincount(data, minlength=256)

    per_level = []
    pos = 0
    n_nodes = 1
    for level in range(stream.depth):
        level_bytes = data[pos : pos + n_nodes]
        if len(level_bytes) != n_nodes:
            raise CorruptStream("occupancy stream truncated")
        counts = np.bincount(popcount[level_bytes], minlength=9)
        per_level.append(counts)
        pos += n_nodes
        n_nodes = int(counts @ np.arange(9))
    if pos != len(data):
        raise CorruptStream("trailing bytes after last octree level")
    return per_level, byte_freq
