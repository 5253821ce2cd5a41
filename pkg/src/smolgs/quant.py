"""Learned-step quantization of splat features and scaling controllers.

Values are quantized as symbol = round(v / delta) with per-channel step
sizes; a per-channel Gaussian (mu, sigma) turns each quantization bin into
a probability mass that both prices the stream (NLL rate report) and drives
the range coder via 16-bit frequency tables.

Coding bins have half-width delta/2 so they tile the real line and their
masses form a proper distribution; the wider +-delta integral is computed
separately for reporting only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import SplatCloud
from .errors import EmptyCloud, InvalidValue, ModelMismatch
from .range_coder import MAX_TOTAL, SymbolModel

# Widest symbol alphabet a single model may span (escape excluded).
MAX_MODEL_WIDTH = 4096
# Coverage of the symbol range around the predicted mean, in sigmas.
RANGE_SIGMAS = 12.0
ESCAPE_PAYLOAD_BITS = 32


@dataclass(frozen=True)
class QuantParams:
    """Per-channel Gaussian and step size: vectors mu, sigma, delta."""

    mu: np.ndarray
    sigma: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=np.float64))
        delta = np.atleast_1d(np.asarray(self.delta, dtype=np.float64))
        if not (mu.shape == sigma.shape == delta.shape):
            raise InvalidValue("mu/sigma/delta must have matching shapes")
        for arr in (mu, sigma, delta):
            if not np.all(np.isfinite(arr)):
                raise InvalidValue("quantization parameters must be finite")
        if np.any(sigma <= 0) or np.any(delta <= 0):
            raise InvalidValue("sigma and delta must be positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "delta", delta)

    @property
    def n_channels(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class StaticContext:
    """One QuantParams triple per channel, shared by all splats."""

    features: QuantParams
    scales: QuantParams


@dataclass(frozen=True)
class QuantizedBlock:
    """Integer symbols plus the step sizes that produced them."""

    symbols: np.ndarray  # (n, channels) int64
    deltas: np.ndarray  # (n, channels) float64
    channel_role: str  # "feature" | "scaling"

    def dequantize(self) -> np.ndarray:
        return self.symbols * self.deltas


def quantize(values, delta):
    """Round-half-to-even quantization: symbol = round(v / delta).

    Returns (symbols, reconstructed); |v - reconstructed| <= delta / 2.
    """
    values = np.asarray(values, dtype=np.float64)
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), values.shape)
    if not np.all(np.isfinite(values)):
        raise InvalidValue("cannot quantize non-finite values")
    if np.any(delta <= 0):
        raise InvalidValue("delta must be positive")
    symbols = np.rint(values / delta).astype(np.int64)
    return symbols, symbols * delta


def bin_probability(symbol, mu, sigma, delta, min_bin_probability=2.0 ** -16):
    """Probability mass of the coding bin [s*delta - delta/2, s*delta + delta/2]
    under N(mu, sigma^2), floored at min_bin_probability."""
    symbol = np.asarray(symbol, dtype=np.float64)
    center = symbol * delta
    hi = ndtr((center + 0.5 * delta - mu) / sigma)
    lo = ndtr((center - 0.5 * delta - mu) / sigma)
    return np.maximum(hi - lo, min_bin_probability)


def bin_probability_wide(symbol, mu, sigma, delta, min_bin_probability=2.0 ** -16):
    """Mass of the report-only wide bin [s*delta - delta, s*delta + delta]."""
    symbol = np.asarray(symbol, dtype=np.float64)
    center = symbol * delta
    hi = ndtr((center + delta - mu) / sigma)
    lo = ndtr((center - delta - mu) / sigma)
    return np.maximum(hi - lo, min_bin_probability)


def rate_report(blocks, contexts, min_bin_probability=2.0 ** -16):
    """Model code length of quantized blocks under their contexts.

    blocks/contexts are parallel lists; each context is a QuantParams whose
    vectors broadcast against the block's (n, channels) symbols (a single
    per-channel triple, or per-splat (n, channels) arrays).

    Returns dict with nll_bits_total (coding bins, base-2), nll_bits_per_splat,
    and wide_nll_total (wide +-delta bins, base-2).
    """
    total = 0.0
    wide_total = 0.0
    n_splats = 0
    for block, ctx in zip(blocks, contexts):
        if block.symbols.size == 0:
            continue
        p = bin_probability(
            block.symbols, ctx.mu, ctx.sigma, block.deltas, min_bin_probability
        )
        pw = bin_probability_wide(
            block.symbols, ctx.mu, ctx.sigma, block.deltas, min_bin_probability
        )
        total += float(np.sum(-np.log2(p)))
        wide_total += float(np.sum(-np.log2(pw)))
        n_splats += block.symbols.shape[0]
    return {
        "nll_bits_total": total,
        "nll_bits_per_splat": total / n_splats if n_splats else 0.0,
        "wide_nll_total": wide_total,
    }


def fit_static_context(cloud: SplatCloud, target_bins: int = 256,
                       sigma_floor: float = 1e-6, delta_floor: float = 1e-6) -> StaticContext:
    """Per-channel sample statistics as a shared quantization context.

    mu = mean, sigma = max(stddev, sigma_floor),
    delta = max((max - min) / target_bins, delta_floor).
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot fit a context to an empty cloud")

    def fit(values):
        mu = values.mean(axis=0)
        sigma = np.maximum(values.std(axis=0), sigma_floor)
        delta = np.maximum(
            (values.max(axis=0) - values.min(axis=0)) / target_bins, delta_floor
        )
        return QuantParams(mu, sigma, delta)

    return StaticContext(features=fit(cloud.features), scales=fit(cloud.scales))


def symbol_range(mu: float, sigma: float, delta: float,
                 max_width: int = MAX_MODEL_WIDTH) -> tuple[int, int]:
    """Symbol alphabet [lo, hi] covering mu/delta +- 12 sigma/delta,
    symmetrically clamped to max_width symbols."""
    center = mu / delta
    lo = int(np.floor(center - RANGE_SIGMAS * sigma / delta))
    hi = int(np.ceil(center + RANGE_SIGMAS * sigma / delta))
    if hi - lo + 1 > max_width:
        mid = int(np.rint(center))
        lo = mid - max_width // 2
        hi = lo + max_width - 1
    return lo, hi


def symbols_to_model(params_channel, symbol_lo: int, symbol_hi: int,
                     min_bin_probability: float = 2.0 ** -16) -> SymbolModel:
    """Discretize Gaussian bin masses into a 16-bit frequency table.

    The model alphabet is [0, n] where index i < n maps to symbol lo + i and
    index n is the escape symbol for out-of-range values.  Frequencies are
    each >= 1 and sum exactly to 2^16; the construction is pure integer
    arithmetic after a single probability evaluation, so identical inputs
    yield bit-identical models.
    """
    if isinstance(params_channel, QuantParams):
        mu = float(params_channel.mu[0])
        sigma = float(params_channel.sigma[0])
        delta = float(params_channel.delta[0])
    else:
        mu, sigma, delta = (float(v) for v in params_channel)
    if symbol_lo > symbol_hi:
        raise ModelMismatch("empty symbol range")
    syms = np.arange(symbol_lo, symbol_hi + 1, dtype=np.float64)
    p = bin_probability(syms, mu, sigma, delta, min_bin_probability)
    freqs = np.maximum(1, np.floor(p * (MAX_TOTAL - 2) + 0.5).astype(np.int64))
    total = int(freqs.sum())
    if total > MAX_TOTAL - 1:
        n = len(freqs)
        freqs = np.maximum(1, (freqs * (MAX_TOTAL - 1 - n)) // total)
        total = int(freqs.sum())
    escape = MAX_TOTAL - total
    return SymbolModel(freqs.tolist() + [escape])


def build_channel_model(mu: float, sigma: float, delta: float,
                        min_bin_probability: float = 2.0 ** -16):
    """Symbol range plus frequency model for one channel.

    Returns (lo, hi, SymbolModel); model index len-1 is the escape symbol.
    """
    lo, hi = symbol_range(mu, sigma, delta)
    model = symbols_to_model((mu, sigma, delta), lo, hi, min_bin_probability)
    return lo, hi, model
