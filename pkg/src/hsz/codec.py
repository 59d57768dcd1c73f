"""Fixed-rate blockwise bitstream encoding of decorrelated integers.

Each chunk of up to 32 values stores a 1-byte bitwidth, a sign bitmap, and
the magnitudes packed at that bitwidth; an all-zero chunk is a single zero
byte.  Chunk boundaries never cross the decorrelation/streaming segment
boundaries chosen by the compressor, so segments decode independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import _fallback
from .counters import decode_counters
from .errors import CorruptStreamError

CHUNK_CAP = 32

_INT32_MIN = -(2**31)


@dataclass(frozen=True)
class EncodedChunk:
    """Decoded form of one chunk: sign-magnitude at a fixed bitwidth."""

    count: int
    bitwidth: int
    negative: np.ndarray  # bool per element; empty when bitwidth == 0
    magnitudes: np.ndarray  # uint64 per element; empty when bitwidth == 0

    def byte_size(self) -> int:
        return _fallback.chunk_byte_size(self.count, self.bitwidth)

    def to_bytes(self) -> bytes:
        out = bytearray([self.bitwidth])
        if self.bitwidth > 0:
            out += _fallback.pack_signs(self.negative)
            out += _fallback.pack_bits(self.magnitudes, self.bitwidth)
        return bytes(out)


def encode_chunk(values) -> EncodedChunk:
    """Encode up to 32 signed 32-bit integers into one chunk."""
    values = np.asarray(values, dtype=np.int64)
    if not 1 <= values.size <= CHUNK_CAP:
        raise ValueError(f"chunk must hold 1..{CHUNK_CAP} values, got {values.size}")
    if np.any(values == _INT32_MIN):
        raise ValueError("value -2**31 has no sign-magnitude representation")
    mags = np.abs(values)
    bitwidth = int(mags.max()).bit_length()
    if bitwidth == 0:
        empty_b = np.zeros(0, dtype=bool)
        empty_m = np.zeros(0, dtype=np.uint64)
        return EncodedChunk(values.size, 0, empty_b, empty_m)
    return EncodedChunk(values.size, bitwidth, values < 0, mags.astype(np.uint64))


def decode_chunk(chunk: EncodedChunk) -> np.ndarray:
    """Exact inverse of :func:`encode_chunk`."""
    if chunk.bitwidth == 0:
        return np.zeros(chunk.count, dtype=np.int32)
    vals = chunk.magnitudes.astype(np.int64)
    np.negative(vals, where=chunk.negative, out=vals)
    return vals.astype(np.int32)


def chunk_from_bytes(buf, count: int) -> tuple[EncodedChunk, int]:
    """Parse one chunk of ``count`` elements; returns (chunk, bytes consumed)."""
    buf = memoryview(buf)
    if len(buf) < 1:
        raise CorruptStreamError("empty chunk")
    bitwidth = buf[0]
    if bitwidth > 32:
        raise CorruptStreamError(f"chunk bitwidth {bitwidth} exceeds 32")
    if bitwidth == 0:
        empty_b = np.zeros(0, dtype=bool)
        empty_m = np.zeros(0, dtype=np.uint64)
        return EncodedChunk(count, 0, empty_b, empty_m), 1
    sign_bytes = (count + 7) // 8
    mag_bytes = (count * bitwidth + 7) // 8
    total = 1 + sign_bytes + mag_bytes
    if len(buf) < total:
        raise CorruptStreamError("truncated chunk payload")
    negative = _fallback.unpack_signs(buf[1 : 1 + sign_bytes], count)
    mags = _fallback.unpack_bits(buf[1 + sign_bytes : total], count, bitwidth)
    if np.any(mags > 2**31 - 1):
        raise CorruptStreamError("chunk magnitude exceeds int32 range")
    if np.any(negative & (mags == 0)):
        raise CorruptStreamError("negative zero in chunk")
    return EncodedChunk(count, bitwidth, negative, mags), total


def spans_from_segments(segment_bounds: list[tuple[int, int]]) -> np.ndarray:
    """Split segments into consecutive chunks of at most CHUNK_CAP elements.

    Returns an (n_chunks, 2) int64 array of [start, end) stream positions.
    Chunks restart at every segment boundary.
    """
    spans = []
    for s, e in segment_bounds:
        for c in range(s, e, CHUNK_CAP):
            spans.append((c, min(c + CHUNK_CAP, e)))
    return np.asarray(spans, dtype=np.int64).reshape(-1, 2)


def encode_stream(values: np.ndarray, spans: np.ndarray) -> tuple[bytes, np.ndarray]:
    """Encode a full decorrelated stream; returns (payload, chunk offsets)."""
    return _kernels.encode_stream(values, spans[:, 0], spans[:, 1])


def decode_stream(
    payload: bytes, spans: np.ndarray, offsets: np.ndarray
) -> np.ndarray:
    """Decode a full payload back to int32 values in stream order."""
    values = _kernels.decode_stream(payload, spans[:, 0], spans[:, 1], offsets)
    decode_counters.chunks_decoded += len(spans)
    decode_counters.bytes_read += len(payload)
    return values


def decode_chunk_range(
    payload: bytes,
    spans: np.ndarray,
    offsets: np.ndarray,
    first: int,
    last: int,
) -> np.ndarray:
    """Decode chunks [first, last) only; returns their values contiguously."""
    sub = spans[first:last] - spans[first, 0]
    suboff = offsets[first:last] - offsets[first]
    lo = int(offsets[first])
    hi = int(offsets[last]) if last < len(offsets) else len(payload)
    values = _kernels.decode_stream(payload[lo:hi], sub[:, 0], sub[:, 1], suboff)
    decode_counters.chunks_decoded += last - first
    decode_counters.bytes_read += hi - lo
    return values
