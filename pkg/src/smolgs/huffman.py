"""Canonical Huffman coding over the byte alphabet.

Only code lengths are transmitted; codes are reassigned canonically on both
sides (symbols sorted by (length, value), codes counted up MSB-first).
Construction tie-breaking is fixed so tables are platform-independent.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptStream, EmptyAlphabet, UnknownSymbol

MAX_CODE_LENGTH = 56  # decoder accumulates codes in a 64-bit word


@dataclass(frozen=True)
class HuffmanTable:
    """Canonical prefix code fully determined by per-symbol code lengths."""

    code_lengths: tuple  # 256 entries, 0 = symbol absent

    # Derived, cached on first use.
    _codes: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.code_lengths) != 256:
            raise ValueError("code_lengths must have 256 entries")
        present = [(l, s) for s, l in enumerate(self.code_lengths) if l > 0]
        if not present:
            raise EmptyAlphabet("no symbols in table")
        if any(l > MAX_CODE_LENGTH for l, _ in present):
            raise ValueError(f"code length exceeds {MAX_CODE_LENGTH}")
        kraft = sum(2.0 ** -l for l, _ in present)
        if kraft > 1.0 + 1e-12:
            raise ValueError("code lengths violate the Kraft inequality")
        code = 0
        prev_len = 0
        codes = {}
        for length, sym in sorted(present):
            code <<= length - prev_len
            codes[sym] = (code, length)
            code += 1
            prev_len = length
        object.__setattr__(self, "_codes", codes)

    @property
    def codes(self) -> dict:
        """Map symbol -> (code value, code length), MSB-first."""
        return self._codes


def huffman_build(frequencies) -> HuffmanTable:
    """Optimal prefix-code lengths for a 256-entry frequency table.

    Ties in the heap are broken by the smallest symbol contained in each
    node, making the lengths deterministic.  A single-symbol alphabet gets
    length 1.
    """
    freqs = list(frequencies)
    if len(freqs) != 256:
        raise ValueError("frequencies must have 256 entries")
    present = [(int(f), s) for s, f in enumerate(freqs) if f > 0]
    if not present:
        raise EmptyAlphabet("all frequencies are zero")
    lengths = [0] * 256
    if len(present) == 1:
        lengths[present[0][1]] = 1
        return HuffmanTable(tuple(lengths))
    # Heap of (weight, min contained symbol, member symbols).
    heap = [(w, s, [s]) for w, s in sorted(present, key=lambda t: t[1])]
    heapq.heapify(heap)
    while len(heap) > 1:
        w1, m1, syms1 = heapq.heappop(heap)
        w2, m2, syms2 = heapq.heappop(heap)
        for s in syms1:
            lengths[s] += 1
        for s in syms2:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, min(m1, m2), syms1 + syms2))
    if max(lengths) > MAX_CODE_LENGTH:
        raise ValueError(f"code length exceeds {MAX_CODE_LENGTH}")
    return HuffmanTable(tuple(lengths))


def huffman_encode(data: bytes, table: HuffmanTable) -> tuple[bytes, int]:
    """Encode bytes to an MSB-first bit sequence.

    Returns (packed bytes, bit count); the final byte is zero-padded.
    """
    codes = table.codes
    out = bytearray()
    acc = 0
    nbits = 0
    total = 0
    for sym in data:
        entry = codes.get(sym)
        if entry is None:
            raise UnknownSymbol(f"symbol {sym} has no code")
        code, length = entry
        acc = (acc << length) | code
        nbits += length
        total += length
        while nbits >= 8:
            nbits -= 8
            out.append((acc >> nbits) & 0xFF)
        acc &= (1 << nbits) - 1
    if nbits:
        out.append((acc << (8 - nbits)) & 0xFF)
    return bytes(out), total


def huffman_decode(bits: bytes, table: HuffmanTable, count: int, nbits: int | None = None) -> bytes:
    """Decode exactly `count` symbols from an MSB-first bit sequence."""
    if count == 0:
        return b""
    # Canonical decode: per-length first code and symbol offsets.
    by_length: dict[int, list[int]] = {}
    for sym, (_, length) in sorted(table.codes.items(), key=lambda kv: (kv[1][1], kv[0])):
        by_length.setdefault(length, []).append(sym)
    first_code: dict[int, int] = {}
    code = 0
    prev_len = 0
    for length in sorted(by_length):
        code <<= length - prev_len
        first_code[length] = code
        code += len(by_length[length])
        prev_len = length
    max_len = prev_len

    total_bits = len(bits) * 8 if nbits is None else nbits
    if nbits is not None and nbits > len(bits) * 8:
        raise CorruptStream("declared bit count exceeds available bytes")
    bit_arr = np.unpackbits(np.frombuffer(bits, dtype=np.uint8)).tolist()
    out = bytearray()
    pos = 0
    acc = 0
    length = 0
    while len(out) < count:
        if pos >= total_bits:
            raise CorruptStream("bit underrun while decoding")
        acc = (acc << 1) | bit_arr[pos]
        pos += 1
        length += 1
        syms = by_length.get(length)
        if syms is not None:
            offset = acc - first_code[length]
            if 0 <= offset < len(syms):
                out.append(syms[offset])
                acc = 0
                length = 0
                continue
        if length > max_len:
            raise CorruptStream("invalid code word")
    return bytes(out)
