"""Inference-only neural attribute decoding.

Holds the forward passes of the five tiny MLPs (opacity, color, rotation,
scaling, context head), the binary multiresolution hash encoder over 2D
planes and 3D grids, and covariance assembly Sigma = R S S^T R^T.  There is
no training or autodiff here; weights arrive from a container's MODEL
section (or a seeded random initializer in tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateView, NoModel, OutOfBounds, ShapeError
from .quant import QuantParams

HIDDEN_DIM = 128
HASH_OUTPUT_DIM = 96
RESOLUTIONS_2D = (130, 258, 514, 1026)
RESOLUTIONS_3D = (18, 24, 33, 44, 59, 80, 108, 148, 201, 275, 376, 514)
TABLE_SIZE_2D = 1 << 15
TABLE_SIZE_3D = 1 << 13
FEATURES_PER_LEVEL = 4
PLANES_2D = ((0, 1), (1, 2), (0, 2))  # xy, yz, xz

_PRIMES = (1, 2654435761, 805459861)


@dataclass(frozen=True)
class MlpSpec:
    """Fully-connected net: ReLU hidden layers, configurable output activation."""

    weights: tuple  # per layer, (out_dim, in_dim) float arrays
    biases: tuple  # per layer, (out_dim,) float arrays
    output_activation: str  # "tanh" | "sigmoid" | "none"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("weights/biases layer counts differ or are empty")
        if self.output_activation not in ("tanh", "sigmoid", "none"):
            raise ShapeError(f"unknown activation {self.output_activation!r}")
        ws = tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
        bs = tuple(np.asarray(b, dtype=np.float64) for b in self.biases)
        for i, (w, b) in enumerate(zip(ws, bs)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ShapeError(f"layer {i}: weight {w.shape} / bias {b.shape} mismatch")
            if i > 0 and w.shape[1] != ws[i - 1].shape[0]:
                raise ShapeError(f"layer {i}: input dim does not chain")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]


def mlp_forward(spec: MlpSpec, x) -> np.ndarray:
    """Forward pass; accepts a vector or a (n, input_dim) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x.reshape(1, -1) if single else x
    if h.shape[-1] != spec.input_dim:
        raise ShapeError(f"input dim {h.shape[-1]} != expected {spec.input_dim}")
    last = len(spec.weights) - 1
    for i, (w, b) in enumerate(zip(spec.weights, spec.biases)):
        h = h @ w.T + b
        if i < last:
            np.maximum(h, 0.0, out=h)
    if spec.output_activation == "tanh":
        h = np.tanh(h)
    elif spec.output_activation == "sigmoid":
        h = 1.0 / (1.0 + np.exp(-h))
    return h[0] if single else h


@dataclass(frozen=True)
class HashEncoder:
    """Binary multiresolution hash encoder (2D tri-plane + 3D grids).

    Tables hold signs in {-1, +1}; the dequantized entry is sign * scale
    with one scale per table.  tables_2d is indexed [level][plane], tables_3d
    [level]; each table has shape (table_size, FEATURES_PER_LEVEL).
    """

    tables_2d: tuple  # 4 levels x 3 planes, int8 (TABLE_SIZE_2D, 4)
    tables_3d: tuple  # 12 levels, int8 (TABLE_SIZE_3D, 4)
    scales_2d: tuple  # 4 x 3 floats
    scales_3d: tuple  # 12 floats

    def __post_init__(self):
        if len(self.tables_2d) != len(RESOLUTIONS_2D) or any(
            len(lvl) != len(PLANES_2D) for lvl in self.tables_2d
        ):
            raise ShapeError("tables_2d must be 4 levels x 3 planes")
        if len(self.tables_3d) != len(RESOLUTIONS_3D):
            raise ShapeError("tables_3d must have 12 levels")


def _hash_nd(coords: np.ndarray, table_size: int) -> np.ndarray:
    """InstantNGP spatial hash: XOR of prime-multiplied integer coords."""
    h = np.zeros(coords.shape[:-1], dtype=np.uint64)
    for axis in range(coords.shape[-1]):
        h ^= coords[..., axis].astype(np.uint64) * np.uint64(_PRIMES[axis])
    return h & np.uint64(table_size - 1)


def _interp_level(pos: np.ndarray, table: np.ndarray, scale: float,
                  table_size: int) -> np.ndarray:
    """Multilinear interpolation of one level; pos is (n, d) in grid units."""
    n, d = pos.shape
    c0 = np.floor(pos).astype(np.int64)
    frac = pos - c0
    out = np.zeros((n, FEATURES_PER_LEVEL))
    for corner in range(1 << d):
        offs = np.array([(corner >> a) & 1 for a in range(d)], dtype=np.int64)
        weight = np.ones(n)
        for a in range(d):
            weight *= frac[:, a] if offs[a] else (1.0 - frac[:, a])
        idx = _hash_nd(c0 + offs[None, :], table_size)
        out += weight[:, None] * (table[idx].astype(np.float64) * scale)
    return out


def hash_encode(x, encoder: HashEncoder) -> np.ndarray:
    """Encode unit-cube coordinates to 96-dim descriptors.

    Accepts one 3-vector or an (n, 3) batch.  Output order: 2D levels
    ascending with planes (xy, yz, xz) inside each level, then 3D levels
    ascending; 4 features each.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x.reshape(1, 3) if single else x
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise OutOfBounds("hash encoder input must lie in the unit cube")
    parts = []
    for li, res in enumerate(RESOLUTIONS_2D):
        for pi, plane in enumerate(PLANES_2D):
            pos = pts[:, plane] * (res - 1)
            parts.append(
                _interp_level(pos, encoder.tables_2d[li][pi],
                              encoder.scales_2d[li][pi], TABLE_SIZE_2D)
            )
    for li, res in enumerate(RESOLUTIONS_3D):
        pos = pts * (res - 1)
        parts.append(
            _interp_level(pos, encoder.tables_3d[li], encoder.scales_3d[li],
                          TABLE_SIZE_3D)
        )
    out = np.concatenate(parts, axis=1)
    return out[0] if single else out


@dataclass(frozen=True)
class DecoderWeights:
    """Everything the inference path needs, as loaded from a container."""

    n_f: int
    mlp_o: MlpSpec
    mlp_c: MlpSpec
    mlp_r: MlpSpec
    mlp_s: MlpSpec
    mlp_h: MlpSpec
    hash_encoder: HashEncoder
    # Ordered (role, count) slices of the MLP_h output vector.
    mlp_h_layout: tuple = ()

    def __post_init__(self):
        layout = self.mlp_h_layout or default_mlp_h_layout(self.n_f)
        object.__setattr__(self, "mlp_h_layout", tuple(layout))
        if sum(c for _, c in self.mlp_h_layout) != self.mlp_h.output_dim:
            raise NoModel("MLP_h layout does not cover its output dimension")
        for spec, out_dim in ((self.mlp_o, 1), (self.mlp_c, 3),
                              (self.mlp_r, 4), (self.mlp_s, 3)):
            if spec.input_dim != self.n_f + 4 or spec.output_dim != out_dim:
                raise NoModel("attribute MLP dimensions do not match n_f")
        if self.mlp_h.input_dim != HASH_OUTPUT_DIM:
            raise NoModel("MLP_h input dim must match the hash encoder output")


def default_mlp_h_layout(n_f: int):
    """Feature mu/sigma/delta then scaling mu/sigma/delta."""
    return (
        ("f_mu", n_f), ("f_sigma", n_f), ("f_delta", n_f),
        ("s_mu", 3), ("s_sigma", 3), ("s_delta", 3),
    )


def view_concat(f, x, x_c) -> np.ndarray:
    """[f, unit view direction, view distance] of length n_f + 4."""
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    x = np.asarray(x, dtype=np.float64).reshape(3)
    x_c = np.asarray(x_c, dtype=np.float64).reshape(3)
    d = x_c - x
    dist = float(np.linalg.norm(d))
    if dist == 0.0:
        raise DegenerateView("camera center coincides with splat coordinate")
    return np.concatenate([f, d / dist, [dist]])


@dataclass(frozen=True)
class SplatAttributes:
    opacity: float
    color: np.ndarray
    rotation: np.ndarray  # unit quaternion (w, x, y, z)
    scaling: np.ndarray
    covariance: np.ndarray  # 3x3 symmetric PSD


def quaternion_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion in (w, x, y, z) convention."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def decode_attributes(f, s, x, x_c, weights: DecoderWeights) -> SplatAttributes:
    """Reconstruct render attributes of one splat for a given camera center."""
    if weights is None:
        raise NoModel("decoder weights are required")
    fv = view_concat(f, x, x_c)
    opacity = float(mlp_forward(weights.mlp_o, fv)[0])
    color = mlp_forward(weights.mlp_c, fv)
    raw_q = mlp_forward(weights.mlp_r, fv)
    norm = float(np.linalg.norm(raw_q))
    if norm < 1e-12:
        q = np.array([1.0, 0.0, 0.0, 0.0])
    else:
        q = raw_q / norm
    gate = 1.0 / (1.0 + np.exp(-mlp_forward(weights.mlp_s, fv)))
    s_star = np.asarray(s, dtype=np.float64) * gate
    rot = quaternion_to_matrix(q)
    rs = rot * s_star[None, :]  # R @ diag(s*)
    sigma = rs @ rs.T
    return SplatAttributes(
        opacity=opacity, color=color, rotation=q, scaling=s_star, covariance=sigma
    )


def _softplus(v: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, v)


def predict_context(x, weights: DecoderWeights, bbox=None,
                    sigma_floor: float = 1e-6, delta_floor: float = 1e-6):
    """Per-splat (mu, sigma, delta) for features and scaling from MLP_h.

    x is one 3-vector or an (n, 3) batch in scene units when bbox is given,
    otherwise already normalized to the unit cube.  sigma and delta heads go
    through softplus and are floored.  Returns a pair of QuantParams for a
    single point, or a pair of dicts of (n, channels) arrays for a batch.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x.reshape(-1, 3)
    if bbox is not None:
        pts = (pts - bbox.min[None, :]) / bbox.extent[None, :]
        pts = np.clip(pts, 0.0, 1.0)
    h = hash_encode(pts, weights.hash_encoder)
    out = mlp_forward(weights.mlp_h, h)
    slices = {}
    pos = 0
    for role, count in weights.mlp_h_layout:
        slices[role] = out[:, pos : pos + count]
        pos += count
    feat = {
        "mu": slices["f_mu"],
        "sigma": np.maximum(_softplus(slices["f_sigma"]), sigma_floor),
        "delta": np.maximum(_softplus(slices["f_delta"]), delta_floor),
    }
    scal = {
        "mu": slices["s_mu"],
        "sigma": np.maximum(_softplus(slices["s_sigma"]), sigma_floor),
        "delta": np.maximum(_softplus(slices["s_delta"]), delta_floor),
    }
    if single:
        return (
            QuantParams(feat["mu"][0], feat["sigma"][0], feat["delta"][0]),
            QuantParams(scal["mu"][0], scal["sigma"][0], scal["delta"][0]),
        )
    return feat, scal


def random_weights(seed: int, n_f: int = 8, weight_scale: float = 0.1) -> DecoderWeights:
    """Seeded random initialization (for tests and untrained pipelines).

    All tensors are drawn as float32 so serialization roundtrips exactly.
    """
    rng = np.random.default_rng(seed)

    def mlp(in_dim, out_dim, activation):
        dims = [in_dim, HIDDEN_DIM, HIDDEN_DIM, out_dim]
        ws, bs = [], []
        for a, b in zip(dims[:-1], dims[1:]):
            ws.append(rng.normal(0.0, weight_scale, (b, a)).astype(np.float32))
            bs.append(rng.normal(0.0, weight_scale, b).astype(np.float32))
        return MlpSpec(tuple(ws), tuple(bs), activation)

    tables_2d = tuple(
        tuple(
            (rng.integers(0, 2, (TABLE_SIZE_2D, FEATURES_PER_LEVEL)) * 2 - 1).astype(np.int8)
            for _ in PLANES_2D
        )
        for _ in RESOLUTIONS_2D
    )
    tables_3d = tuple(
        (rng.integers(0, 2, (TABLE_SIZE_3D, FEATURES_PER_LEVEL)) * 2 - 1).astype(np.int8)
        for _ in RESOLUTIONS_3D
    )
    scales_2d = tuple(
        tuple(float(np.float32(rng.uniform(0.01, 0.2))) for _ in PLANES_2D)
        for _ in RESOLUTIONS_2D
    )
    scales_3d = tuple(float(np.float32(rng.uniform(0.01, 0.2))) for _ in RESOLUTIONS_3D)

    return DecoderWeights(
        n_f=n_f,
        mlp_o=mlp(n_f + 4, 1, "tanh"),
        mlp_c=mlp(n_f + 4, 3, "sigmoid"),
        mlp_r=mlp(n_f + 4, 4, "none"),
        mlp_s=mlp(n_f + 4, 3, "none"),
        mlp_h=mlp(HASH_OUTPUT_DIM, 3 * n_f + 9, "none"),
        hash_encoder=HashEncoder(tables_2d, tables_3d, scales_2d, scales_3d),
    )
