"""Pure numpy bit-packing backend.

Chunk layout (byte-exact contract shared with the compiled backend):
byte 0 is the bitwidth b; when b > 0 it is followed by ceil(count/8) sign
bytes (bit j of byte j//8, LSB-first, set for negative elements) and then the
magnitudes packed LSB-first into a little-endian bit buffer, element j
occupying bits [j*b, (j+1)*b), zero-padded to a byte boundary.
"""

from __future__ import annotations

import numpy as np

from ..errors import CorruptStreamError

BACKEND = "python"

_INT32_MIN = -(2**31)
_MAG_MAX = 2**31 - 1


def pack_bits(mags: np.ndarray, bitwidth: int) -> bytes:
    """Pack unsigned magnitudes, ``bitwidth`` bits each, LSB-first."""
    if bitwidth == 0:
        return b""
    mags = np.asarray(mags, dtype=np.uint64)
    bits = ((mags[:, None] >> np.arange(bitwidth, dtype=np.uint64)) & 1).astype(
        np.uint8
    )
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def unpack_bits(buf, count: int, bitwidth: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns uint64 magnitudes."""
    if bitwidth == 0:
        return np.zeros(count, dtype=np.uint64)
    raw = np.frombuffer(buf, dtype=np.uint8)
    bits = np.unpackbits(raw, count=count * bitwidth, bitorder="little")
    weights = np.uint64(1) << np.arange(bitwidth, dtype=np.uint64)
    return bits.reshape(count, bitwidth).astype(np.uint64) @ weights


def pack_signs(negative: np.ndarray) -> bytes:
    return np.packbits(negative.astype(np.uint8), bitorder="little").tobytes()


def unpack_signs(buf, count: int) -> np.ndarray:
    raw = np.frombuffer(buf, dtype=np.uint8)
    return np.unpackbits(raw, count=count, bitorder="little").astype(bool)


def chunk_byte_size(count: int, bitwidth: int) -> int:
    if bitwidth == 0:
        return 1
    return 1 + (count + 7) // 8 + (count * bitwidth + 7) // 8


def encode_stream(values: np.ndarray, starts, ends):
    """Encode consecutive chunks of ``values``; returns (payload, offsets)."""
    values = np.asarray(values, dtype=np.int64)
    if np.any(values == _INT32_MIN):
        raise ValueError("value -2**31 has no sign-magnitude representation")
    out = bytearray()
    offsets = np.empty(len(starts), dtype=np.uint64)
    for i, (s, e) in enumerate(zip(starts, ends)):
        offsets[i] = len(out)
        seg = values[s:e]
        mags = np.abs(seg)
        max_mag = int(mags.max()) if seg.size else 0
        bitwidth = max_mag.bit_length()
        out.append(bitwidth)
        if bitwidth > 0:
            out += pack_signs(seg < 0)
            out += pack_bits(mags.astype(np.uint64), bitwidth)
    return bytes(out), offsets


def decode_stream(payload, starts, ends, offsets) -> np.ndarray:
    """Decode chunks back to int32 values in stream order."""
    payload = memoryview(payload)
    n = ends[-1] if len(ends) else 0
    values = np.zeros(int(n), dtype=np.int32)
    for i, (s, e) in enumerate(zip(starts, ends)):
        off = int(offsets[i])
        count = int(e - s)
        if off >= len(payload):
            raise CorruptStreamError("chunk offset past end of payload")
        bitwidth = payload[off]
        if bitwidth > 32:
            raise CorruptStreamError(f"chunk bitwidth {bitwidth} exceeds 32")
        if bitwidth == 0:
            continue
        sign_bytes = (count + 7) // 8
        mag_bytes = (count * bitwidth + 7) // 8
        end = off + 1 + sign_bytes + mag_bytes
        if end > len(payload):
            raise CorruptStreamError("truncated chunk payload")
        negative = unpack_signs(payload[off + 1 : off + 1 + sign_bytes], count)
        mags = unpack_bits(payload[off + 1 + sign_bytes : end], count, bitwidth)
        if np.any(mags > _MAG_MAX):
            raise CorruptStreamError("chunk magnitude exceeds int32 range")
        if np.any(negative & (mags == 0)):
            raise CorruptStreamError("negative zero in chunk")
        vals = mags.astype(np.int64)
        np.negative(vals, where=negative, out=vals)
        values[s:e] = vals
    return values
