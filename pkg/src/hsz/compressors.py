"""The four compression pipelines and their inverse decorrelation primitives.

HSZP / HSZX treat the input as a flat 1D array; HSZP_ND / HSZX_ND keep the
multidimensional layout.  The HSZp family predicts each point from its
previous neighbor(s) (1D previous value, nd Lorenzo corner sum) with
out-of-domain neighbors taken as zero; the HSZx family subtracts a truncated
integer block mean, stored as per-block metadata.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import codec
from .errors import EpsTooSmallError, MissingContextError
from .grid import BlockGeometry, GridShape, canonical_order, partition
from .quant import ErrorBound, QuantizedField, quantize_field, resolve_eps

_PMAX = 2**31 - 1

DEFAULT_BLOCK_1D = 32
DEFAULT_BLOCK_ND = {2: (8, 8), 3: (8, 8, 8)}


class CompressorKind(enum.IntEnum):
    HSZP = 0
    HSZP_ND = 1
    HSZX = 2
    HSZX_ND = 3

    @property
    def is_nd(self) -> bool:
        return self in (CompressorKind.HSZP_ND, CompressorKind.HSZX_ND)

    @property
    def is_block_mean(self) -> bool:
        """True for the HSZx family (block-mean metadata present)."""
        return self in (CompressorKind.HSZX, CompressorKind.HSZX_ND)

    @property
    def cli_name(self) -> str:
        return self.name.lower().replace("_nd", "-nd")

    @classmethod
    def from_name(cls, name: str) -> "CompressorKind":
        key = name.strip().lower().replace("-", "_")
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown compressor {name!r}") from None


@dataclass
class DecorrelatedStream:
    """Decorrelated integers in canonical stream order plus block metadata."""

    values: np.ndarray  # int32, canonical order
    metadata: np.ndarray | None  # int32 per-block means (HSZx family only)
    geometry: BlockGeometry  # over the flattened shape for 1D kinds
    shape: GridShape  # original grid shape
    eps: float
    kind: CompressorKind

    def as_grid(self) -> np.ndarray:
        """Decorrelated values rearranged into grid (row-major) layout."""
        perm = stream_perm(self.kind, self.shape, self.geometry)
        out = np.empty(self.shape.total, dtype=np.int32)
        out[perm] = self.values
        return out.reshape(self.shape.dims)

    def metadata_grid(self) -> np.ndarray:
        """Per-point block mean, expanded to grid layout (HSZx family)."""
        if self.metadata is None:
            raise ValueError("stream has no block-mean metadata")
        sizes = self.geometry.block_sizes()
        per_point = np.repeat(self.metadata.astype(np.int64), sizes)
        perm = stream_perm(self.kind, self.shape, self.geometry)
        out = np.empty(self.shape.total, dtype=np.int64)
        out[perm] = per_point
        return out.reshape(self.shape.dims)


def effective_geometry(
    kind: CompressorKind, shape: GridShape, block_dims: tuple[int, ...]
) -> BlockGeometry:
    """Blocking actually used for streaming: flattened for 1D kinds."""
    if kind.is_nd:
        return partition(shape, block_dims)
    return partition(shape.flattened(), (block_dims[0],))


def stream_perm(
    kind: CompressorKind, shape: GridShape, geometry: BlockGeometry
) -> np.ndarray:
    """Canonical-order permutation: stream position -> flat row-major index."""
    if kind == CompressorKind.HSZX_ND:
        return canonical_order(shape, geometry, "block-contiguous")
    return canonical_order(shape, geometry, "global-row-major")


def segment_bounds(
    kind: CompressorKind, shape: GridShape, geometry: BlockGeometry
) -> list[tuple[int, int]]:
    """Stream segments at which encoding chunks restart.

    HSZx family: one segment per block.  HSZp-nd: one segment per axis-0
    row/plane (the streaming slab).  HSZp: one segment per 1D block.
    """
    if kind == CompressorKind.HSZP_ND:
        slab = int(np.prod(shape.dims[1:], dtype=np.int64))
        return [(i * slab, (i + 1) * slab) for i in range(shape.dims[0])]
    sizes = geometry.block_sizes()
    ends = np.cumsum(sizes)
    starts = ends - sizes
    return list(zip(starts.tolist(), ends.tolist()))


def block_int_mean(values) -> int:
    """Integer block mean with truncation toward zero (22/4 -> 5, -4/4 -> -1)."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        raise ValueError("empty block")
    total = int(values.sum())
    mean, rem = divmod(total, values.size)
    if total < 0 and rem != 0:
        mean += 1
    return int(mean)


def _block_means(sums: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Vectorized truncated-division block means."""
    means = sums // sizes
    means[(sums < 0) & (sums % sizes != 0)] += 1
    return means


def _check_residuals(p: np.ndarray) -> np.ndarray:
    if p.size and int(np.abs(p).max()) > _PMAX:
        raise EpsTooSmallError(
            "decorrelated residual overflows 32-bit range; increase the error bound"
        )
    return p.astype(np.int32)


def decorrelate_hszp(q: QuantizedField) -> DecorrelatedStream:
    """Previous-value prediction over the flattened array (q[-1] taken as 0)."""
    shape = q.shape
    flat = q.values.ravel().astype(np.int64)
    p = np.diff(flat, prepend=np.int64(0))
    geometry = partition(shape.flattened(), (min(DEFAULT_BLOCK_1D, shape.total),))
    return DecorrelatedStream(
        _check_residuals(p), None, geometry, shape, q.eps, CompressorKind.HSZP
    )


def decorrelate_lorenzo_nd(q: QuantizedField) -> DecorrelatedStream:
    """Multidimensional Lorenzo residuals with zero padding outside the grid."""
    shape = q.shape
    if shape.ndims < 2:
        raise ValueError("Lorenzo decorrelation requires 2D or 3D data")
    r = q.values.astype(np.int64)
    for ax in range(shape.ndims):
        r = np.diff(r, axis=ax, prepend=np.int64(0))
    geometry = partition(shape, _clip_block_dims(DEFAULT_BLOCK_ND[shape.ndims], shape))
    return DecorrelatedStream(
        _check_residuals(r.ravel()),
        None,
        geometry,
        shape,
        q.eps,
        CompressorKind.HSZP_ND,
    )


def decorrelate_hszx(
    q: QuantizedField, geometry: BlockGeometry, kind: CompressorKind
) -> DecorrelatedStream:
    """Subtract the truncated integer block mean inside every block."""
    shape = q.shape
    perm = stream_perm(kind, shape, geometry)
    stream = q.values.ravel().astype(np.int64)[perm]
    sizes = geometry.block_sizes()
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    sums = np.add.reduceat(stream, starts)
    means = _block_means(sums, sizes)
    p = stream - np.repeat(means, sizes)
    return DecorrelatedStream(
        _check_residuals(p),
        means.astype(np.int32),
        geometry,
        shape,
        q.eps,
        kind,
    )


def recorrelate(stream: DecorrelatedStream) -> QuantizedField:
    """Exact integer inverse of the decorrelation for the stream's kind."""
    shape = stream.shape
    if stream.values.size != shape.total:
        if stream.kind.is_block_mean:
            raise ValueError("stream length does not match grid size")
        raise MissingContextError(
            "partial prefix-predicted stream; predecessor context required"
        )
    kind = stream.kind
    if kind == CompressorKind.HSZP:
        q = np.cumsum(stream.values.astype(np.int64)).reshape(shape.dims)
    elif kind == CompressorKind.HSZP_ND:
        q = stream.values.astype(np.int64).reshape(shape.dims)
        for ax in range(shape.ndims):
            q = np.cumsum(q, axis=ax)
    else:
        sizes = stream.geometry.block_sizes()
        q_stream = stream.values.astype(np.int64) + np.repeat(
            stream.metadata.astype(np.int64), sizes
        )
        perm = stream_perm(kind, shape, stream.geometry)
        flat = np.empty(shape.total, dtype=np.int64)
        flat[perm] = q_stream
        q = flat.reshape(shape.dims)
    return QuantizedField(q.astype(np.int32), stream.eps)


def decorrelate(q: QuantizedField, kind: CompressorKind, geometry: BlockGeometry):
    if kind == CompressorKind.HSZP:
        ds = decorrelate_hszp(q)
    elif kind == CompressorKind.HSZP_ND:
        ds = decorrelate_lorenzo_nd(q)
    else:
        return decorrelate_hszx(q, geometry, kind)
    # The prefix-predicted paths pick a default geometry; keep the caller's.
    ds.geometry = geometry
    return ds


def _clip_block_dims(block_dims, shape: GridShape) -> tuple[int, ...]:
    return tuple(min(b, n) for b, n in zip(block_dims, shape.dims))


def resolve_block_dims(
    kind: CompressorKind, shape: GridShape, block_dims
) -> tuple[int, ...]:
    """Normalize user block dims to the stored per-axis form."""
    if kind.is_nd:
        if shape.ndims < 2:
            raise ValueError(f"{kind.cli_name} requires 2D or 3D data")
        if block_dims is None:
            block_dims = DEFAULT_BLOCK_ND[shape.ndims]
        block_dims = tuple(int(b) for b in np.atleast_1d(block_dims))
        if len(block_dims) != shape.ndims:
            raise ValueError(
                f"{kind.cli_name} needs {shape.ndims} block extents, got {len(block_dims)}"
            )
        return _clip_block_dims(block_dims, shape)
    if block_dims is None:
        size = DEFAULT_BLOCK_1D
    else:
        dims = tuple(int(b) for b in np.atleast_1d(block_dims))
        if len(dims) != 1:
            raise ValueError(f"{kind.cli_name} takes a single block size")
        size = dims[0]
    if size < 1:
        raise ValueError("block size must be >= 1")
    size = min(size, shape.total)
    return (size,) + (1,) * (shape.ndims - 1)


@dataclass
class CompressedStream:
    """Self-describing compressed container (in-memory form)."""

    kind: CompressorKind
    shape: GridShape
    block_dims: tuple[int, ...]  # per original axis; (S, 1, ...) for 1D kinds
    eps: float
    metadata: np.ndarray | None  # int32 block means, block order
    chunk_offsets: np.ndarray  # uint64 byte offset of each chunk in payload
    payload: bytes

    @cached_property
    def geometry(self) -> BlockGeometry:
        return effective_geometry(self.kind, self.shape, self.block_dims)

    @cached_property
    def spans(self) -> np.ndarray:
        return codec.spans_from_segments(
            segment_bounds(self.kind, self.shape, self.geometry)
        )

    @cached_property
    def perm(self) -> np.ndarray:
        return stream_perm(self.kind, self.shape, self.geometry)

    @property
    def metadata_bytes(self) -> int:
        return 0 if self.metadata is None else 4 * len(self.metadata)

    def byte_size(self) -> int:
        nd = self.shape.ndims
        header = 4 + 1 + 1 + 1 + 8 * nd + 4 * nd + 8 + 8
        index = 8 + 8 * len(self.chunk_offsets)
        return header + 8 + self.metadata_bytes + index + len(self.payload)

    def ratio(self) -> float:
        return 4.0 * self.shape.total / self.byte_size()


def compress(
    field: np.ndarray,
    kind: CompressorKind,
    bound: ErrorBound,
    block_dims=None,
) -> CompressedStream:
    """Quantize, partition, decorrelate, and encode a floating-point field."""
    field = np.asarray(field)
    if not np.all(np.isfinite(field)):
        raise ValueError("field contains NaN or Inf")
    shape = GridShape(field.shape)
    eps = resolve_eps(field, bound)
    qf = quantize_field(field, eps)
    block_dims = resolve_block_dims(kind, shape, block_dims)
    geometry = effective_geometry(kind, shape, block_dims)
    ds = decorrelate(qf, kind, geometry)
    spans = codec.spans_from_segments(segment_bounds(kind, shape, geometry))
    payload, offsets = codec.encode_stream(ds.values, spans)
    return CompressedStream(
        kind=kind,
        shape=shape,
        block_dims=block_dims,
        eps=eps,
        metadata=ds.metadata,
        chunk_offsets=offsets,
        payload=payload,
    )
