"""Container inspection: size breakdown, octree sparsity, rate estimates."""

from __future__ import annotations

import struct

import numpy as np

from .container import (
    SEC_FEATURES,
    SEC_SCALING,
    decode_container,
    size_breakdown,
    _parse_header,
    _read_sections,
)
from .octree import OctreeStream, occupancy_statistics
from .quant import QuantParams, QuantizedBlock, rate_report


def _stream_coded_bits(payload: bytes) -> dict:
    """Range-coded payload bits of a FEATURES/SCALING section (framing excluded)."""
    (n_chunks,) = struct.unpack_from("<I", payload, 0)
    pos = 4
    blob_bits = 0
    escape_bits = 0
    for _ in range(n_chunks):
        blob_len, n_escapes = struct.unpack_from("<II", payload, pos)
        pos += 8 + blob_len + 4 * n_escapes
        blob_bits += 8 * blob_len
        escape_bits += 32 * n_escapes
    return {"chunks": n_chunks, "coded_bits": blob_bits, "escape_bits": escape_bits}


def stats_report(data: bytes) -> dict:
    """Full machine-readable report over a container file."""
    decoded = decode_container(data)
    n = len(decoded.cloud)
    sizes = size_breakdown(data)

    # Octree sparsity: recover the occupancy bytes from the OCTREE section.
    from .container import SEC_OCTREE
    from .huffman import HuffmanTable, huffman_decode

    _, bbox, depth, _, _, _, entries = _parse_header(data)
    sections = _read_sections(data, entries)
    payload = sections[SEC_OCTREE]
    table = HuffmanTable(tuple(payload[:256]))
    raw_count, nbits = struct.unpack_from("<QQ", payload, 256)
    occ = huffman_decode(payload[256 + 16 :], table, raw_count, nbits)
    stream = OctreeStream(bbox=bbox, depth=depth, occupancy_bytes=occ, leaf_count=n)
    per_level, byte_freq = occupancy_statistics(stream)

    order = np.argsort(byte_freq)[::-1]
    top_bytes = [
        {"value": int(v), "count": int(byte_freq[v])}
        for v in order[:20]
        if byte_freq[v] > 0
    ]

    # Rate model vs actual coded size.
    if decoded.context_kind == "static":
        ctx_f = decoded.static_context.features
        ctx_s = decoded.static_context.scales
    else:
        from .neural import predict_context

        feat, scal = predict_context(
            decoded.cloud.xyz, decoded.weights, bbox=decoded.cloud.bbox,
            sigma_floor=decoded.config.sigma_floor,
            delta_floor=decoded.config.delta_floor,
        )
        ctx_f = QuantParams(feat["mu"], feat["sigma"], feat["delta"])
        ctx_s = QuantParams(scal["mu"], scal["sigma"], scal["delta"])
    blocks = [
        QuantizedBlock(decoded.feature_symbols, decoded.feature_deltas, "feature"),
        QuantizedBlock(decoded.scale_symbols, decoded.scale_deltas, "scaling"),
    ]
    rates = rate_report(
        blocks, [ctx_f, ctx_s], decoded.config.min_bin_probability
    )

    feat_actual = _stream_coded_bits(sections[SEC_FEATURES])
    scal_actual = _stream_coded_bits(sections[SEC_SCALING])
    actual_bits = (
        feat_actual["coded_bits"] + feat_actual["escape_bits"]
        + scal_actual["coded_bits"] + scal_actual["escape_bits"]
    )

    return {
        "schema": 1,
        "splat_count": n,
        "recursion_depth": int(depth),
        "n_f": decoded.config.n_f,
        "context": decoded.context_kind,
        "sizes": sizes,
        "bits_per_splat": 8.0 * sizes["total"] / n,
        "coordinate_bits_per_splat": 8.0 * sizes["x"] / n,
        "coordinate_huffman_bits": int(nbits),
        "occupancy_bytes": int(raw_count),
        "popcount_histogram_per_level": [
            [int(c) for c in level] for level in per_level
        ],
        "byte_value_top20": top_bytes,
        "nll_bits_total": rates["nll_bits_total"],
        "nll_bits_per_splat": rates["nll_bits_per_splat"],
        "wide_nll_bits_total": rates["wide_nll_total"],
        "actual_feature_scaling_bits": actual_bits,
    }
