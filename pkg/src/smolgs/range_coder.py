"""Byte-renormalizing range coder with carry propagation.

64-bit low register, 32-bit range register, byte-wise renormalization when
the range drops below 2^24, 5 flush bytes at the end.  Symbol statistics
come from immutable :class:`SymbolModel` frequency tables with 16-bit
totals; encoder and decoder must be driven by identical model sequences.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np

from .errors import CorruptStream, ModelMismatch

MAX_TOTAL = 1 << 16
_TOP = 1 << 32
_BOTTOM = 1 << 24


class SymbolModel:
    """Static frequency table over the integer alphabet [0, n)."""

    __slots__ = ("freqs", "cum", "total")

    def __init__(self, freqs):
        freqs = [int(f) for f in freqs]
        if not freqs or any(f < 1 for f in freqs):
            raise ModelMismatch("every symbol frequency must be >= 1")
        total = sum(freqs)
        if total > MAX_TOTAL:
            raise ModelMismatch(f"total frequency {total} exceeds {MAX_TOTAL}")
        cum = [0]
        for f in freqs:
            cum.append(cum[-1] + f)
        self.freqs = tuple(freqs)
        self.cum = tuple(cum)
        self.total = total

    def __len__(self):
        return len(self.freqs)

    def __eq__(self, other):
        return isinstance(other, SymbolModel) and self.freqs == other.freqs

    def __hash__(self):
        return hash(self.freqs)


class RangeEncoder:
    """LZMA-style carry-propagating range encoder."""

    def __init__(self):
        self.low = 0
        self.range = _TOP - 1
        self.cache = 0
        self.cache_size = 1
        self.out = bytearray()

    def _shift_low(self):
        if self.low < 0xFF000000 or self.low >= _TOP:
            carry = self.low >> 32
            self.out.append((self.cache + carry) & 0xFF)
            for _ in range(self.cache_size - 1):
                self.out.append((0xFF + carry) & 0xFF)
            self.cache = (self.low >> 24) & 0xFF
            self.cache_size = 0
        self.cache_size += 1
        self.low = (self.low << 8) & 0xFFFFFFFF

    def encode(self, symbol: int, model: SymbolModel):
        if not (0 <= symbol < len(model)):
            raise ModelMismatch(f"symbol {symbol} outside model alphabet")
        r = self.range // model.total
        self.low += r * model.cum[symbol]
        self.range = r * model.freqs[symbol]
        while self.range < _BOTTOM:
            self.range <<= 8
            self._shift_low()

    def finish(self) -> bytes:
        for _ in range(5):
            self._shift_low()
        return bytes(self.out)


class RangeDecoder:
    """Decoder matching :class:`RangeEncoder` byte for byte."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.range = _TOP - 1
        self.code = 0
        for _ in range(5):
            self.code = ((self.code << 8) | self._next_byte()) & 0xFFFFFFFFFF
        self.code &= 0xFFFFFFFF

    def _next_byte(self) -> int:
        if self.pos >= len(self.data):
            raise CorruptStream("range-coded stream truncated")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def decode(self, model: SymbolModel) -> int:
        r = self.range // model.total
        value = self.code // r
        if value >= model.total:
            value = model.total - 1
        symbol = bisect_right(model.cum, value) - 1
        self.code -= r * model.cum[symbol]
        self.range = r * model.freqs[symbol]
        while self.range < _BOTTOM:
            self.range <<= 8
            self.code = ((self.code << 8) | self._next_byte()) & 0xFFFFFFFF
        return symbol


def range_encode(symbols, models) -> bytes:
    """Encode a symbol sequence; models is one SymbolModel per position
    (or a single model reused for all positions)."""
    enc = RangeEncoder()
    if isinstance(models, SymbolModel):
        m = models
        for s in symbols:
            enc.encode(int(s), m)
    else:
        for s, m in zip(symbols, models, strict=True):
            enc.encode(int(s), m)
    return enc.finish()


def range_decode(data: bytes, models, count: int):
    """Decode `count` symbols coded with the identical model sequence."""
    dec = RangeDecoder(data)
    if isinstance(models, SymbolModel):
        m = models
        return [dec.decode(m) for _ in range(count)]
    out = []
    it = iter(models)
    for _ in range(count):
        out.append(dec.decode(next(it)))
    return out
