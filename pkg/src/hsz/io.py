"""Raw scientific array files and the compressed container on disk.

Raw arrays are headerless packed little-endian float32 in row-major order.
The container layout (all little-endian): magic "HSZ1"; version u8 = 1;
kind u8; ndims u8; dims u64 x ndims; block_dims u32 x ndims; eps f64;
element count u64; metadata byte length u64 followed by i32 block means in
block order (length 0 for the HSZp family); chunk index byte length u64
followed by u64 byte offsets of each chunk into the payload; the chunk
payload to end of file.
"""

from __future__ import annotations

import struct

import numpy as np

from .compressors import CompressedStream, CompressorKind
from .errors import CorruptStreamError
from .grid import GridShape

MAGIC = b"HSZ1"
VERSION = 1


def read_raw(path, dims) -> np.ndarray:
    """Load a packed float32 array, validating length and finiteness."""
    shape = GridShape(tuple(dims))
    raw = np.fromfile(path, dtype="<f4")
    if raw.size != shape.total:
        raise ValueError(
            f"{path}: expected {4 * shape.total} bytes for dims {shape.dims}, "
            f"found {4 * raw.size}"
        )
    if not np.all(np.isfinite(raw)):
        raise ValueError(f"{path}: field contains NaN or Inf")
    return raw.reshape(shape.dims)


def write_raw(field: np.ndarray, path):
    np.asarray(field, dtype="<f4").tofile(path)


def stream_to_bytes(c: CompressedStream) -> bytes:
    nd = c.shape.ndims
    out = bytearray()
    out += MAGIC
    out += struct.pack("<BBB", VERSION, int(c.kind), nd)
    out += struct.pack(f"<{nd}Q", *c.shape.dims)
    out += struct.pack(f"<{nd}I", *c.block_dims)
    out += struct.pack("<dQ", c.eps, c.shape.total)
    meta = (
        b""
        if c.metadata is None
        else np.ascontiguousarray(c.metadata, dtype="<i4").tobytes()
    )
    out += struct.pack("<Q", len(meta)) + meta
    index = np.ascontiguousarray(c.chunk_offsets, dtype="<u8").tobytes()
    out += struct.pack("<Q", len(index)) + index
    out += c.payload
    return bytes(out)


def write_compressed(c: CompressedStream, path):
    with open(path, "wb") as fh:
        fh.write(stream_to_bytes(c))


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise CorruptStreamError("truncated container")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def stream_from_bytes(buf: bytes) -> CompressedStream:
    r = _Reader(buf)
    if r.take(4) != MAGIC:
        raise CorruptStreamError("bad magic; not an HSZ container")
    version, kind_code, nd = r.unpack("<BBB")
    if version != VERSION:
        raise CorruptStreamError(f"unsupported container version {version}")
    if not 1 <= nd <= 3:
        raise CorruptStreamError(f"invalid dimensionality {nd}")
    try:
        kind = CompressorKind(kind_code)
    except ValueError:
        raise CorruptStreamError(f"unknown compressor code {kind_code}") from None
    dims = r.unpack(f"<{nd}Q")
    block_dims = r.unpack(f"<{nd}I")
    eps, count = r.unpack("<dQ")
    shape = GridShape(dims)
    if count != shape.total:
        raise CorruptStreamError("element count disagrees with dims")
    if not eps > 0:
        raise CorruptStreamError(f"invalid eps {eps}")
    (meta_len,) = r.unpack("<Q")
    if meta_len % 4:
        raise CorruptStreamError("metadata section length not a multiple of 4")
    metadata = (
        None
        if meta_len == 0
        else np.frombuffer(r.take(meta_len), dtype="<i4").astype(np.int32)
    )
    (index_len,) = r.unpack("<Q")
    if index_len % 8:
        raise CorruptStreamError("chunk index length not a multiple of 8")
    offsets = np.frombuffer(r.take(index_len), dtype="<u8").astype(np.uint64)
    payload = bytes(r.buf[r.pos :])
    c = CompressedStream(
        kind=kind,
        shape=shape,
        block_dims=tuple(block_dims),
        eps=eps,
        metadata=metadata,
        chunk_offsets=offsets,
        payload=payload,
    )
    _validate_stream(c)
    return c


def _validate_stream(c: CompressedStream):
    if c.kind.is_block_mean:
        if c.metadata is None or len(c.metadata) != c.geometry.block_count:
            raise CorruptStreamError("block metadata count disagrees with geometry")
    elif c.metadata is not None:
        raise CorruptStreamError(f"{c.kind.cli_name} container carries metadata")
    if len(c.chunk_offsets) != len(c.spans):
        raise CorruptStreamError("chunk index count disagrees with geometry")


def read_compressed(path) -> CompressedStream:
    with open(path, "rb") as fh:
        return stream_from_bytes(fh.read())
