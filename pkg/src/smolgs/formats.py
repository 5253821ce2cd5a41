"""Splat-cloud file ingestion and export.

Supported inputs:
  * 3DGS binary-little-endian PLY (x/y/z, f_dc_*, opacity, scale_*, rot_*);
    the SH DC terms land in the first three feature channels, higher-order
    SH coefficients are dropped (lossy adapter).
  * native "SPLT": 16-byte header (magic, n_f, reserved) followed by
    little-endian f32 records [x, y, z, f[n_f], s[3]].
  * ASCII xyz: one "x y z" line per splat, zero features and scales.
"""

from __future__ import annotations

import struct

import numpy as np

from .core import SplatCloud
from .errors import CorruptStream, EmptyCloud, InvalidValue

SPLT_MAGIC = b"SPLT"
SPLT_HEADER = struct.Struct("<4sB11x")

_PLY_DTYPES = {
    "float": ("<f4", 4), "float32": ("<f4", 4),
    "double": ("<f8", 8), "float64": ("<f8", 8),
    "uchar": ("<u1", 1), "uint8": ("<u1", 1),
    "char": ("<i1", 1), "int8": ("<i1", 1),
    "short": ("<i2", 2), "int16": ("<i2", 2),
    "ushort": ("<u2", 2), "uint16": ("<u2", 2),
    "int": ("<i4", 4), "int32": ("<i4", 4),
    "uint": ("<u4", 4), "uint32": ("<u4", 4),
}


def write_splt(path, cloud: SplatCloud):
    """Write the native fixed-record format."""
    records = np.hstack([cloud.xyz, cloud.features, cloud.scales]).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(SPLT_HEADER.pack(SPLT_MAGIC, cloud.n_f))
        fh.write(records.tobytes())


def read_splt(path) -> SplatCloud:
    with open(path, "rb") as fh:
        header = fh.read(SPLT_HEADER.size)
        if len(header) < SPLT_HEADER.size:
            raise CorruptStream("SPLT file too short for header")
        magic, n_f = SPLT_HEADER.unpack(header)
        if magic != SPLT_MAGIC:
            raise CorruptStream(f"bad SPLT magic {magic!r}")
        body = fh.read()
    rec_len = 4 * (3 + n_f + 3)
    if len(body) % rec_len:
        raise CorruptStream("SPLT body is not a whole number of records")
    data = np.frombuffer(body, dtype="<f4").reshape(-1, 3 + n_f + 3).astype(np.float64)
    if data.shape[0] == 0:
        raise EmptyCloud("SPLT file holds no splats")
    return SplatCloud(data[:, :3], data[:, 3 : 3 + n_f], data[:, 3 + n_f :])


def read_ascii_xyz(path, n_f: int = 8) -> SplatCloud:
    """One x y z triple per non-empty line; features and scales are zero."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 3:
                raise InvalidValue(f"line {lineno}: expected 'x y z'")
            try:
                rows.append([float(parts[0]), float(parts[1]), float(parts[2])])
            except ValueError as exc:
                raise InvalidValue(f"line {lineno}: {exc}") from exc
    if not rows:
        raise EmptyCloud("no coordinates in ASCII file")
    xyz = np.asarray(rows, dtype=np.float64)
    return SplatCloud(xyz, np.zeros((len(rows), n_f)), np.zeros((len(rows), 3)))


def write_ascii_xyz(path, cloud: SplatCloud):
    with open(path, "w", encoding="utf-8") as fh:
        for x, y, z in cloud.xyz:
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")


def _parse_ply_header(fh):
    line = fh.readline().strip()
    if line != b"ply":
        raise CorruptStream("not a PLY file")
    fmt = None
    count = None
    props = []
    in_vertex = False
    while True:
        line = fh.readline()
        if not line:
            raise CorruptStream("unterminated PLY header")
        tokens = line.decode("ascii", errors="replace").split()
        if not tokens:
            continue
        if tokens[0] == "format":
            fmt = tokens[1]
        elif tokens[0] == "element":
            in_vertex = tokens[1] == "vertex"
            if in_vertex:
                count = int(tokens[2])
        elif tokens[0] == "property" and in_vertex:
            if tokens[1] == "list":
                raise CorruptStream("list properties unsupported in vertex element")
            props.append((tokens[2], tokens[1]))
        elif tokens[0] == "end_header":
            break
    if fmt != "binary_little_endian":
        raise CorruptStream(f"unsupported PLY format {fmt!r}")
    if count is None:
        raise CorruptStream("PLY has no vertex element")
    return count, props


def read_gaussian_ply(path, n_f: int = 8) -> SplatCloud:
    """Ingest a vanilla-3DGS PLY; drops higher-order SH coefficients."""
    with open(path, "rb") as fh:
        count, props = _parse_ply_header(fh)
        names = [name for name, _ in props]
        required = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
                    "opacity", "scale_0", "scale_1", "scale_2"]
        for req in required:
            if req not in names:
                raise CorruptStream(f"PLY vertex element missing property '{req}'")
        dtype = np.dtype([(name, _PLY_DTYPES[t][0]) for name, t in props])
        body = fh.read(dtype.itemsize * count)
        if len(body) < dtype.itemsize * count:
            raise CorruptStream("PLY body truncated")
        data = np.frombuffer(body, dtype=dtype)
    xyz = np.stack([data["x"], data["y"], data["z"]], axis=1).astype(np.float64)
    if n_f < 3:
        raise InvalidValue("PLY ingestion needs n_f >= 3 for the SH DC terms")
    features = np.zeros((count, n_f))
    for c in range(3):
        features[:, c] = data[f"f_dc_{c}"]
    scales = np.stack(
        [data["scale_0"], data["scale_1"], data["scale_2"]], axis=1
    ).astype(np.float64)
    return SplatCloud(xyz, features, scales)


def write_attribute_ply(path, xyz, colors, opacities, scalings, rotations):
    """Export flattened render attributes as a binary PLY snapshot."""
    n = len(xyz)
    fields = (
        ["x", "y", "z", "red", "green", "blue", "opacity"]
        + [f"scale_{i}" for i in range(3)]
        + [f"rot_{i}" for i in range(4)]
    )
    header = ["ply", "format binary_little_endian 1.0", f"element vertex {n}"]
    header += [f"property float {name}" for name in fields]
    header.append("end_header")
    records = np.hstack([
        np.asarray(xyz, dtype=np.float64),
        np.asarray(colors, dtype=np.float64),
        np.asarray(opacities, dtype=np.float64).reshape(-1, 1),
        np.asarray(scalings, dtype=np.float64),
        np.asarray(rotations, dtype=np.float64),
    ]).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(records.tobytes())


def detect_format(path) -> str:
    """Best-effort sniff: 'ply', 'splt', or 'ascii'."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == b"ply\n" or head.startswith(b"ply"):
        return "ply"
    if head == SPLT_MAGIC:
        return "splt"
    return "ascii"
