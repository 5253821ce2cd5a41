"""Bit-exact on-disk archive for compressed splat scenes.

Layout (all integers little-endian):

  magic "SMGS" | version u16 | flags u16 | bbox 6*f64 | R u8 | n_f u8
  | splat_count u64 | chunk_size u32 | n_sections u8
  | per section: id u8, offset u64, length u64, crc32 u32
  | section payloads in table order

Sections: OCTREE (Huffman table + coded occupancy bytes), FEATURES and
SCALING (per-chunk range-coded blobs plus escape payloads), MODEL (static
context triples or decoder weights), META (key/value strings).

flags bit 0 selects the context model: 0 = static per-channel triples,
1 = hash-grid + context-MLP prediction at leaf centers.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .core import BoundingBox, CodecConfig, SplatCloud, tight_bounding_box
from .errors import (
    BadMagic,
    CorruptStream,
    CrcMismatch,
    EmptyCloud,
    LimitExceeded,
    NoModel,
    UnsupportedVersion,
)
from .huffman import HuffmanTable, huffman_build, huffman_decode, huffman_encode
from .neural import (
    DecoderWeights,
    HashEncoder,
    MlpSpec,
    FEATURES_PER_LEVEL,
    PLANES_2D,
    RESOLUTIONS_2D,
    RESOLUTIONS_3D,
    TABLE_SIZE_2D,
    TABLE_SIZE_3D,
    predict_context,
)
from .octree import OctreeStream, build_octree, decode_octree, dequantize_indices
from .quant import (
    QuantParams,
    StaticContext,
    build_channel_model,
    fit_static_context,
    quantize,
)
from .range_coder import RangeDecoder, RangeEncoder

MAGIC = b"SMGS"
VERSION = 1
FLAG_NEURAL = 1

SEC_OCTREE = 1
SEC_FEATURES = 2
SEC_SCALING = 3
SEC_MODEL = 4
SEC_META = 5

SECTION_NAMES = {
    SEC_OCTREE: "OCTREE",
    SEC_FEATURES: "FEATURES",
    SEC_SCALING: "SCALING",
    SEC_MODEL: "MODEL",
    SEC_META: "META",
}

_HEADER = struct.Struct("<4sHH6dBBQIB")
_SECTION_ENTRY = struct.Struct("<BQQI")

_I32_MIN = -(1 << 31)
_I32_MAX = (1 << 31) - 1


@dataclass
class DecodedContainer:
    """Everything recovered from a container."""

    cloud: SplatCloud
    leaf_indices: np.ndarray
    feature_symbols: np.ndarray
    scale_symbols: np.ndarray
    feature_deltas: np.ndarray
    scale_deltas: np.ndarray
    config: CodecConfig
    context_kind: str  # "static" | "neural"
    static_context: StaticContext | None
    weights: DecoderWeights | None
    meta: dict


# ---------------------------------------------------------------------------
# context -> per-channel symbol models


def _static_params(ctx: StaticContext, n_splats: int):
    """Broadcast per-channel triples to (n, channels) arrays."""

    def expand(qp: QuantParams):
        return {
            "mu": np.broadcast_to(qp.mu, (n_splats, qp.n_channels)),
            "sigma": np.broadcast_to(qp.sigma, (n_splats, qp.n_channels)),
            "delta": np.broadcast_to(qp.delta, (n_splats, qp.n_channels)),
        }

    return expand(ctx.features), expand(ctx.scales)


def _encode_stream(symbols: np.ndarray, params: dict, chunk_size: int,
                   min_bin_probability: float, shared_models,
                   workers: int = 1) -> bytes:
    """Range-encode a (n, channels) symbol matrix, chunked over splats.

    shared_models: per-channel (lo, hi, model) when the context is static,
    else None (models are built per splat from params).
    Escaped symbols are stored as raw little-endian i32 in coding order.
    Independent chunks may be coded by up to `workers` threads; output is
    assembled in chunk order either way.
    """
    n, n_ch = symbols.shape

    def encode_chunk(start: int):
        stop = min(start + chunk_size, n)
        enc = RangeEncoder()
        escapes = []
        for i in range(start, stop):
            for c in range(n_ch):
                if shared_models is not None:
                    lo, hi, model = shared_models[c]
                else:
                    lo, hi, model = build_channel_model(
                        float(params["mu"][i, c]),
                        float(params["sigma"][i, c]),
                        float(params["delta"][i, c]),
                        min_bin_probability,
                    )
                sym = int(symbols[i, c])
                if lo <= sym <= hi:
                    enc.encode(sym - lo, model)
                else:
                    enc.encode(len(model) - 1, model)  # escape
                    if not (_I32_MIN <= sym <= _I32_MAX):
                        raise LimitExceeded("escape symbol exceeds 32 bits")
                    escapes.append(sym)
        return enc.finish(), escapes

    starts = list(range(0, max(n, 1), chunk_size))
    if workers > 1 and len(starts) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(encode_chunk, starts))
    else:
        chunks = [encode_chunk(s) for s in starts]
    out = bytearray(struct.pack("<I", len(chunks)))
    for blob, escapes in chunks:
        out += struct.pack("<II", len(blob), len(escapes))
        out += blob
        out += struct.pack(f"<{len(escapes)}i", *escapes)
    return bytes(out)


def _decode_stream(payload: bytes, n: int, n_ch: int, chunk_size: int,
                   params: dict, min_bin_probability: float,
                   shared_models, section: str, workers: int = 1) -> np.ndarray:
    try:
        (n_chunks,) = struct.unpack_from("<I", payload, 0)
        pos = 4
        jobs = []
        row = 0
        for _ in range(n_chunks):
            blob_len, n_escapes = struct.unpack_from("<II", payload, pos)
            pos += 8
            blob = payload[pos : pos + blob_len]
            if len(blob) != blob_len:
                raise CorruptStream("chunk blob truncated", section=section)
            pos += blob_len
            escapes = list(struct.unpack_from(f"<{n_escapes}i", payload, pos))
            pos += 4 * n_escapes
            stop = min(row + chunk_size, n)
            jobs.append((blob, escapes, row, stop))
            row = stop
        if row != n:
            raise CorruptStream("chunk table does not cover all splats", section=section)
        if pos != len(payload):
            raise CorruptStream("trailing bytes in coded stream", section=section)
    except struct.error as exc:
        raise CorruptStream(f"coded stream truncated: {exc}", section=section) from exc

    symbols = np.zeros((n, n_ch), dtype=np.int64)

    def decode_chunk(job):
        blob, escapes, start, stop = job
        try:
            dec = RangeDecoder(blob)
            esc_iter = iter(escapes)
            for i in range(start, stop):
                for c in range(n_ch):
                    if shared_models is not None:
                        lo, hi, model = shared_models[c]
                    else:
                        lo, hi, model = build_channel_model(
                            float(params["mu"][i, c]),
                            float(params["sigma"][i, c]),
                            float(params["delta"][i, c]),
                            min_bin_probability,
                        )
                    idx = dec.decode(model)
                    if idx == len(model) - 1:
                        symbols[i, c] = next(esc_iter)
                    else:
                        symbols[i, c] = lo + idx
        except CorruptStream as exc:
            raise CorruptStream(str(exc), section=section) from exc
        except StopIteration as exc:
            raise CorruptStream("missing escape payload", section=section) from exc

    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(decode_chunk, jobs))
    else:
        for job in jobs:
            decode_chunk(job)
    return symbols


# ---------------------------------------------------------------------------
# MODEL section


def _pack_static_model(ctx: StaticContext, n_f: int) -> bytes:
    out = bytearray(struct.pack("<BB", 0, n_f))
    for qp in (ctx.features, ctx.scales):
        for arr in (qp.mu, qp.sigma, qp.delta):
            out += np.asarray(arr, dtype="<f8").tobytes()
    return bytes(out)


def _unpack_static_model(payload: bytes, n_f: int) -> StaticContext:
    kind, stored_nf = struct.unpack_from("<BB", payload, 0)
    if stored_nf != n_f:
        raise CorruptStream("MODEL n_f disagrees with header", section="MODEL")
    pos = 2

    def read_params(n_ch):
        nonlocal pos
        vals = []
        for _ in range(3):
            arr = np.frombuffer(payload, dtype="<f8", count=n_ch, offset=pos)
            pos += 8 * n_ch
            vals.append(arr.astype(np.float64))
        return QuantParams(*vals)

    feat = read_params(n_f)
    scal = read_params(3)
    if pos != len(payload):
        raise CorruptStream("trailing bytes in MODEL section", section="MODEL")
    return StaticContext(features=feat, scales=scal)


def serialize_weights(weights: DecoderWeights) -> bytes:
    """Weights blob: u32 manifest length + JSON manifest + raw tensors.

    MLP tensors are little-endian float32 row-major, in (o, c, r, s, h)
    order, W then b per layer.  Hash tables follow as bit-packed signs
    (bit 1 = +scale), 2D tables level-major with planes inside, then 3D.
    """
    manifest = {
        "n_f": weights.n_f,
        "mlp_h_layout": [[role, count] for role, count in weights.mlp_h_layout],
        "mlps": {},
        "hash": {
            "scales_2d": [list(lvl) for lvl in weights.hash_encoder.scales_2d],
            "scales_3d": list(weights.hash_encoder.scales_3d),
        },
    }
    data = bytearray()
    for name in ("mlp_o", "mlp_c", "mlp_r", "mlp_s", "mlp_h"):
        spec: MlpSpec = getattr(weights, name)
        manifest["mlps"][name] = {
            "activation": spec.output_activation,
            "layers": [list(w.shape) for w in spec.weights],
        }
        for w, b in zip(spec.weights, spec.biases):
            data += w.astype("<f4").tobytes()
            data += b.astype("<f4").tobytes()
    for lvl in weights.hash_encoder.tables_2d:
        for table in lvl:
            data += np.packbits((table.reshape(-1) > 0).astype(np.uint8)).tobytes()
    for table in weights.hash_encoder.tables_3d:
        data += np.packbits((table.reshape(-1) > 0).astype(np.uint8)).tobytes()
    mbytes = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode()
    return struct.pack("<I", len(mbytes)) + mbytes + bytes(data)


def deserialize_weights(blob: bytes) -> DecoderWeights:
    try:
        (mlen,) = struct.unpack_from("<I", blob, 0)
        manifest = json.loads(blob[4 : 4 + mlen].decode())
    except (struct.error, ValueError) as exc:
        raise NoModel(f"bad weights manifest: {exc}") from exc
    pos = 4 + mlen

    def read_f32(count):
        nonlocal pos
        if pos + 4 * count > len(blob):
            raise NoModel("weights blob truncated")
        arr = np.frombuffer(blob, dtype="<f4", count=count, offset=pos)
        pos += 4 * count
        return arr

    mlps = {}
    for name in ("mlp_o", "mlp_c", "mlp_r", "mlp_s", "mlp_h"):
        info = manifest["mlps"][name]
        ws, bs = [], []
        for out_dim, in_dim in info["layers"]:
            ws.append(read_f32(out_dim * in_dim).reshape(out_dim, in_dim))
            bs.append(read_f32(out_dim))
        mlps[name] = MlpSpec(tuple(ws), tuple(bs), info["activation"])

    def read_table(size):
        nonlocal pos
        nbits = size * FEATURES_PER_LEVEL
        nbytes = (nbits + 7) // 8
        if pos + nbytes > len(blob):
            raise NoModel("weights blob truncated")
        bits = np.unpackbits(
            np.frombuffer(blob, dtype=np.uint8, count=nbytes, offset=pos)
        )[:nbits]
        pos += nbytes
        return (bits.astype(np.int8) * 2 - 1).reshape(size, FEATURES_PER_LEVEL)

    tables_2d = tuple(
        tuple(read_table(TABLE_SIZE_2D) for _ in PLANES_2D) for _ in RESOLUTIONS_2D
    )
    tables_3d = tuple(read_table(TABLE_SIZE_3D) for _ in RESOLUTIONS_3D)
    if pos != len(blob):
        raise NoModel("trailing bytes in weights blob")
    encoder = HashEncoder(
        tables_2d,
        tables_3d,
        tuple(tuple(lvl) for lvl in manifest["hash"]["scales_2d"]),
        tuple(manifest["hash"]["scales_3d"]),
    )
    return DecoderWeights(
        n_f=manifest["n_f"],
        mlp_o=mlps["mlp_o"],
        mlp_c=mlps["mlp_c"],
        mlp_r=mlps["mlp_r"],
        mlp_s=mlps["mlp_s"],
        mlp_h=mlps["mlp_h"],
        hash_encoder=encoder,
        mlp_h_layout=tuple((r, c) for r, c in manifest["mlp_h_layout"]),
    )


# ---------------------------------------------------------------------------
# META section


def _pack_meta(meta: dict) -> bytes:
    out = bytearray(struct.pack("<I", len(meta)))
    for key in sorted(meta):
        k = key.encode()
        v = str(meta[key]).encode()
        out += struct.pack("<H", len(k)) + k + struct.pack("<I", len(v)) + v
    return bytes(out)


def _unpack_meta(payload: bytes) -> dict:
    try:
        (count,) = struct.unpack_from("<I", payload, 0)
        pos = 4
        meta = {}
        for _ in range(count):
            (klen,) = struct.unpack_from("<H", payload, pos)
            pos += 2
            key = payload[pos : pos + klen].decode()
            pos += klen
            (vlen,) = struct.unpack_from("<I", payload, pos)
            pos += 4
            meta[key] = payload[pos : pos + vlen].decode()
            pos += vlen
        return meta
    except (struct.error, UnicodeDecodeError) as exc:
        raise CorruptStream(f"bad META section: {exc}", section="META") from exc


# ---------------------------------------------------------------------------
# encode / decode


def merge_cloud(cloud: SplatCloud, depth: int):
    """Quantize and merge colliding splats (mean of f and s per leaf).

    Returns (octree stream, leaf indices ascending Morton, merged features,
    merged scales).
    """
    stream, _, merge_groups = build_octree(cloud, depth)
    leaf_indices = decode_octree(stream)
    n_leaves = len(merge_groups)
    features = np.empty((n_leaves, cloud.n_f))
    scales = np.empty((n_leaves, 3))
    for li, group in enumerate(merge_groups):
        features[li] = cloud.features[group].mean(axis=0)
        scales[li] = cloud.scales[group].mean(axis=0)
    return stream, leaf_indices, features, scales


def _context_params(kind: str, centers: np.ndarray, static_ctx, weights,
                    config: CodecConfig, bbox: BoundingBox):
    n = len(centers)
    if kind == "static":
        return _static_params(static_ctx, n)
    feat, scal = predict_context(
        centers, weights, bbox=bbox,
        sigma_floor=config.sigma_floor, delta_floor=config.delta_floor,
    )
    return feat, scal


def encode_container(cloud: SplatCloud, config: CodecConfig | None = None,
                     context: str = "static",
                     weights: DecoderWeights | None = None,
                     meta: dict | None = None, workers: int = 1) -> bytes:
    """Run the full encode pipeline and return the container bytes."""
    if config is None:
        config = CodecConfig(n_f=cloud.n_f)
    if len(cloud) == 0:
        raise EmptyCloud("nothing to encode")
    if cloud.n_f != config.n_f:
        raise LimitExceeded(
            f"cloud n_f {cloud.n_f} does not match config n_f {config.n_f}"
        )
    if context not in ("static", "neural"):
        raise LimitExceeded(f"unknown context kind {context!r}")
    if context == "neural" and weights is None:
        raise NoModel("neural context requires decoder weights")

    depth = config.recursion_depth
    bbox = tight_bounding_box(cloud)
    # Round-trip the bbox through its serialized form so encode-side contexts
    # see exactly the floats a decoder will read back.
    bbox = BoundingBox(
        np.frombuffer(np.asarray(bbox.min, dtype="<f8").tobytes(), dtype="<f8"),
        np.frombuffer(np.asarray(bbox.max, dtype="<f8").tobytes(), dtype="<f8"),
    )
    work = SplatCloud(cloud.xyz, cloud.features, cloud.scales, bbox=bbox)

    stream, leaf_indices, features, scales = merge_cloud(work, depth)
    centers = dequantize_indices(leaf_indices, bbox, depth)
    n = len(leaf_indices)

    # OCTREE section
    occ = stream.occupancy_bytes
    freqs = np.bincount(np.frombuffer(occ, dtype=np.uint8), minlength=256)
    table = huffman_build(freqs)
    packed, nbits = huffman_encode(occ, table)
    octree_payload = (
        bytes(bytearray(table.code_lengths))
        + struct.pack("<QQ", len(occ), nbits)
        + packed
    )

    # Context
    if context == "static":
        merged = SplatCloud(centers, features, scales, bbox=bbox)
        static_ctx = fit_static_context(
            merged, sigma_floor=config.sigma_floor, delta_floor=config.delta_floor
        )
        model_payload = _pack_static_model(static_ctx, config.n_f)
    else:
        static_ctx = None
        model_payload = struct.pack("<B", 1) + serialize_weights(weights)
    feat_params, scal_params = _context_params(
        context, centers, static_ctx, weights, config, bbox
    )

    # Quantize + entropy code
    feat_syms, _ = quantize(features, feat_params["delta"])
    scal_syms, _ = quantize(scales, scal_params["delta"])
    shared_f = shared_s = None
    if context == "static":
        shared_f = [
            build_channel_model(
                float(static_ctx.features.mu[c]), float(static_ctx.features.sigma[c]),
                float(static_ctx.features.delta[c]), config.min_bin_probability,
            )
            for c in range(config.n_f)
        ]
        shared_s = [
            build_channel_model(
                float(static_ctx.scales.mu[c]), float(static_ctx.scales.sigma[c]),
                float(static_ctx.scales.delta[c]), config.min_bin_probability,
            )
            for c in range(3)
        ]
    features_payload = _encode_stream(
        feat_syms, feat_params, config.chunk_size, config.min_bin_probability,
        shared_f, workers,
    )
    scaling_payload = _encode_stream(
        scal_syms, scal_params, config.chunk_size, config.min_bin_probability,
        shared_s, workers,
    )

    meta = dict(meta or {})
    meta.setdefault("leaf_count", str(n))
    meta.setdefault("child_order", "z<<2|y<<1|x, lsb first")
    meta_payload = _pack_meta(meta)

    sections = [
        (SEC_OCTREE, octree_payload),
        (SEC_FEATURES, features_payload),
        (SEC_SCALING, scaling_payload),
        (SEC_MODEL, model_payload),
        (SEC_META, meta_payload),
    ]
    if len(sections) > 255:
        raise LimitExceeded("section table overflow")

    flags = FLAG_NEURAL if context == "neural" else 0
    header_size = _HEADER.size + len(sections) * _SECTION_ENTRY.size
    out = bytearray(
        _HEADER.pack(
            MAGIC, VERSION, flags,
            bbox.min[0], bbox.min[1], bbox.min[2],
            bbox.max[0], bbox.max[1], bbox.max[2],
            depth, config.n_f, n, config.chunk_size, len(sections),
        )
    )
    offset = header_size
    for sec_id, payload in sections:
        out += _SECTION_ENTRY.pack(sec_id, offset, len(payload), zlib.crc32(payload))
        offset += len(payload)
    for _, payload in sections:
        out += payload
    return bytes(out)


def _parse_header(data: bytes):
    if len(data) < _HEADER.size:
        raise BadMagic("file too short for a container header")
    fields = _HEADER.unpack_from(data, 0)
    magic, version, flags = fields[0], fields[1], fields[2]
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version > VERSION:
        raise UnsupportedVersion(f"container version {version} not supported")
    bbox = BoundingBox(np.asarray(fields[3:6]), np.asarray(fields[6:9]))
    depth, n_f, splat_count, chunk_size, n_sections = fields[9:14]
    pos = _HEADER.size
    entries = []
    for _ in range(n_sections):
        if pos + _SECTION_ENTRY.size > len(data):
            raise CorruptStream("section table truncated")
        entries.append(_SECTION_ENTRY.unpack_from(data, pos))
        pos += _SECTION_ENTRY.size
    return flags, bbox, depth, n_f, splat_count, chunk_size, entries


def _read_sections(data: bytes, entries) -> dict:
    sections = {}
    for sec_id, offset, length, crc in entries:
        name = SECTION_NAMES.get(sec_id, f"#{sec_id}")
        if offset + length > len(data):
            raise CorruptStream(f"section {name} extends past end of file", section=name)
        payload = data[offset : offset + length]
        if zlib.crc32(payload) != crc:
            raise CrcMismatch(f"section {name} checksum mismatch", section=name)
        sections[sec_id] = payload
    return sections


def decode_container(data: bytes, workers: int = 1) -> DecodedContainer:
    """Parse, verify, and fully decode a container."""
    flags, bbox, depth, n_f, splat_count, chunk_size, entries = _parse_header(data)
    sections = _read_sections(data, entries)
    for required in (SEC_OCTREE, SEC_FEATURES, SEC_SCALING, SEC_MODEL):
        if required not in sections:
            raise CorruptStream(
                f"missing section {SECTION_NAMES[required]}",
                section=SECTION_NAMES[required],
            )
    config = CodecConfig(recursion_depth=depth, n_f=n_f, chunk_size=chunk_size)

    # OCTREE
    payload = sections[SEC_OCTREE]
    if len(payload) < 256 + 16:
        raise CorruptStream("OCTREE section too short", section="OCTREE")
    table = HuffmanTable(tuple(payload[:256]))
    raw_count, nbits = struct.unpack_from("<QQ", payload, 256)
    occ = huffman_decode(payload[256 + 16 :], table, raw_count, nbits)
    stream = OctreeStream(
        bbox=bbox, depth=depth, occupancy_bytes=occ, leaf_count=splat_count
    )
    leaf_indices = decode_octree(stream)
    centers = dequantize_indices(leaf_indices, bbox, depth)
    n = len(leaf_indices)

    # MODEL
    model_payload = sections[SEC_MODEL]
    if not model_payload:
        raise CorruptStream("empty MODEL section", section="MODEL")
    neural = bool(flags & FLAG_NEURAL)
    if neural != (model_payload[0] == 1):
        raise CorruptStream("MODEL kind disagrees with header flags", section="MODEL")
    if neural:
        weights = deserialize_weights(model_payload[1:])
        static_ctx = None
    else:
        weights = None
        static_ctx = _unpack_static_model(model_payload, n_f)

    feat_params, scal_params = _context_params(
        "neural" if neural else "static", centers, static_ctx, weights, config, bbox
    )
    shared_f = shared_s = None
    if not neural:
        shared_f = [
            build_channel_model(
                float(static_ctx.features.mu[c]), float(static_ctx.features.sigma[c]),
                float(static_ctx.features.delta[c]), config.min_bin_probability,
            )
            for c in range(n_f)
        ]
        shared_s = [
            build_channel_model(
                float(static_ctx.scales.mu[c]), float(static_ctx.scales.sigma[c]),
                float(static_ctx.scales.delta[c]), config.min_bin_probability,
            )
            for c in range(3)
        ]

    feat_syms = _decode_stream(
        sections[SEC_FEATURES], n, n_f, chunk_size, feat_params,
        config.min_bin_probability, shared_f, "FEATURES", workers,
    )
    scal_syms = _decode_stream(
        sections[SEC_SCALING], n, 3, chunk_size, scal_params,
        config.min_bin_probability, shared_s, "SCALING", workers,
    )

    feat_deltas = np.ascontiguousarray(feat_params["delta"], dtype=np.float64)
    scal_deltas = np.ascontiguousarray(scal_params["delta"], dtype=np.float64)
    features = feat_syms * feat_deltas
    scales = scal_syms * scal_deltas
    cloud = SplatCloud(centers, features, scales, bbox=bbox)

    meta = _unpack_meta(sections[SEC_META]) if SEC_META in sections else {}
    return DecodedContainer(
        cloud=cloud,
        leaf_indices=leaf_indices,
        feature_symbols=feat_syms,
        scale_symbols=scal_syms,
        feature_deltas=feat_deltas,
        scale_deltas=scal_deltas,
        config=config,
        context_kind="neural" if neural else "static",
        static_context=static_ctx,
        weights=weights,
        meta=meta,
    )


def size_breakdown(data: bytes) -> dict:
    """Per-component byte counts; values sum to the file length."""
    _, _, _, _, _, _, entries = _parse_header(data)
    sections = _read_sections(data, entries)
    sizes = {sec_id: len(payload) for sec_id, payload in sections.items()}
    core = (
        sizes.get(SEC_OCTREE, 0)
        + sizes.get(SEC_FEATURES, 0)
        + sizes.get(SEC_SCALING, 0)
        + sizes.get(SEC_MODEL, 0)
    )
    return {
        "total": len(data),
        "x": sizes.get(SEC_OCTREE, 0),
        "f": sizes.get(SEC_FEATURES, 0),
        "s": sizes.get(SEC_SCALING, 0),
        "mlps": sizes.get(SEC_MODEL, 0),
        "other": len(data) - core,  # header, section table, META
    }
