"""Multi-stage partial decompression and slab-wise streaming.

Stages: 1 metadata, 2 decorrelated integers, 3 quantized integers, 4 floats.
Slabs are bands along axis 0 (one row/plane for HSZP_ND, one block-row for
HSZX_ND, one 1D block for the flat kinds); chunk boundaries never cross slab
boundaries, so every slab decodes independently.  Prefix-predicted kinds
carry a running seed (the previous quantized row/plane/value) between slabs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import codec
from .compressors import (
    CompressedStream,
    CompressorKind,
    DecorrelatedStream,
    recorrelate,
)
from .counters import decode_counters
from .errors import UnsupportedStageError
from .quant import QuantizedField


class Stage(enum.IntEnum):
    META = 1
    DECORRELATED = 2
    QUANTIZED = 3
    FULL = 4

    @property
    def cli_name(self) -> str:
        return _STAGE_NAMES[self]

    @classmethod
    def from_name(cls, name: str) -> "Stage":
        for stage, label in _STAGE_NAMES.items():
            if label == name.strip().lower():
                return stage
        raise ValueError(f"unknown stage {name!r}")


_STAGE_NAMES = {
    Stage.META: "meta",
    Stage.DECORRELATED: "decorrelated",
    Stage.QUANTIZED: "quantized",
    Stage.FULL: "full",
}


def supported_stages(kind: CompressorKind) -> set[Stage]:
    stages = {Stage.DECORRELATED, Stage.QUANTIZED, Stage.FULL}
    if kind.is_block_mean:
        stages.add(Stage.META)
    return stages


def partial_decompress(c: CompressedStream, stage: Stage):
    """Decompress to the requested stage.

    Returns int32 metadata (1), a DecorrelatedStream (2), a QuantizedField
    (3), or a float64 grid array (4).
    """
    if stage not in supported_stages(c.kind):
        raise UnsupportedStageError(
            f"stage {stage.cli_name} is not supported by {c.kind.cli_name}"
        )
    if stage == Stage.META:
        decode_counters.bytes_read += c.metadata_bytes
        return np.array(c.metadata, copy=True)
    values = codec.decode_stream(c.payload, c.spans, c.chunk_offsets)
    decode_counters.bytes_read += c.metadata_bytes
    ds = DecorrelatedStream(
        values, c.metadata, c.geometry, c.shape, c.eps, c.kind
    )
    if stage == Stage.DECORRELATED:
        return ds
    qf = recorrelate(ds)
    decode_counters.recorrelated_elements += c.shape.total
    if stage == Stage.QUANTIZED:
        return qf
    decode_counters.dequantized_elements += c.shape.total
    return qf.values.astype(np.float64) * (2.0 * c.eps)


# ---------------------------------------------------------------------------
# Slab streaming


@dataclass
class SlabTracker:
    """Counts simultaneously live slab buffers (memory high-water proxy)."""

    live: int = 0
    high_water: int = 0

    def alloc(self):
        self.live += 1
        self.high_water = max(self.high_water, self.live)

    def free(self):
        self.live -= 1

    def reset(self):
        self.live = 0
        self.high_water = 0


slab_tracker = SlabTracker()


def slab_bounds(c: CompressedStream) -> list[tuple[int, int]]:
    """Per-slab [start, end) along axis 0 (flat positions for 1D kinds)."""
    if c.kind == CompressorKind.HSZP_ND:
        extent = 1
        n1 = c.shape.dims[0]
    elif c.kind == CompressorKind.HSZX_ND:
        extent = c.geometry.block_dims[0]
        n1 = c.shape.dims[0]
    else:
        extent = c.geometry.block_dims[0]
        n1 = c.shape.total
    return [(s, min(s + extent, n1)) for s in range(0, n1, extent)]


def _slab_stream_range(c: CompressedStream, lo: int, hi: int) -> tuple[int, int]:
    """Stream positions covered by slab rows [lo, hi)."""
    if c.kind.is_nd:
        stride = math.prod(c.shape.dims[1:])
        return lo * stride, hi * stride
    return lo, hi


def _slab_scatter_index(c: CompressedStream, lo: int, hi: int) -> np.ndarray:
    """Local flat index (within the slab) for each slab stream position."""
    tail = c.shape.dims[1:]
    stride = math.prod(tail)
    local = np.arange((hi - lo) * stride, dtype=np.int64).reshape((hi - lo,) + tail)
    geometry = c.geometry
    i0 = lo // geometry.block_dims[0]
    parts = []
    for bidx in np.ndindex(*geometry.block_grid[1:]):
        sl = geometry.block_slices((i0,) + tuple(bidx))
        local_sl = (slice(sl[0].start - lo, sl[0].stop - lo),) + sl[1:]
        parts.append(local[local_sl].ravel())
    return np.concatenate(parts)


def _decode_slab(c: CompressedStream, lo: int, hi: int) -> np.ndarray:
    s, e = _slab_stream_range(c, lo, hi)
    spans = c.spans
    first = int(np.searchsorted(spans[:, 0], s))
    last = int(np.searchsorted(spans[:, 0], e))
    return codec.decode_chunk_range(c.payload, spans, c.chunk_offsets, first, last)


def _slab_block_range(c: CompressedStream, lo: int, hi: int) -> tuple[int, int]:
    """Block ordinals covered by a slab (HSZx family; blocks are slab-local)."""
    geometry = c.geometry
    sizes = geometry.block_sizes()
    ends = np.cumsum(sizes)
    s, e = _slab_stream_range(c, lo, hi)
    first = int(np.searchsorted(ends, s, side="right"))
    last = int(np.searchsorted(ends, e, side="left")) + 1
    return first, min(last, len(sizes))


def slab_iter(c: CompressedStream, stage: Stage):
    """Yield per-slab views in axis-0 order.

    Stage 2 yields the slab's decorrelated values in stream order; stage 3
    yields quantized slabs shaped (rows, *tail_dims) (flat for 1D kinds);
    stage 4 yields the same shape in float64.  Concatenating all slabs equals
    whole-array partial decompression at the same stage.
    """
    if stage not in supported_stages(c.kind) or stage == Stage.META:
        raise UnsupportedStageError(
            f"stage {stage.cli_name} is not slab-iterable for {c.kind.cli_name}"
        )
    tail = c.shape.dims[1:] if c.kind.is_nd else ()
    carry = None  # previous q row/plane (HSZP_ND) or last q value (HSZP)
    for lo, hi in slab_bounds(c):
        p = _decode_slab(c, lo, hi)
        if stage == Stage.DECORRELATED:
            slab_tracker.alloc()
            yield p
            continue
        if c.kind == CompressorKind.HSZP:
            q = np.cumsum(p, dtype=np.int64)
            if carry is not None:
                q += carry
            carry = int(q[-1])
        elif c.kind == CompressorKind.HSZP_ND:
            q = p.astype(np.int64).reshape((hi - lo,) + tail)
            for ax in range(1, q.ndim):
                q = np.cumsum(q, axis=ax)
            if carry is not None:
                q += carry
            carry = q[-1]  # aliases the slab; never mutated
        else:
            first, last = _slab_block_range(c, lo, hi)
            sizes = c.geometry.block_sizes()[first:last]
            decode_counters.bytes_read += 4 * (last - first)
            q_stream = p.astype(np.int64) + np.repeat(
                c.metadata[first:last].astype(np.int64), sizes
            )
            if c.kind == CompressorKind.HSZX:
                q = q_stream
            else:
                q = np.empty((hi - lo) * math.prod(tail), dtype=np.int64)
                q[_slab_scatter_index(c, lo, hi)] = q_stream
                q = q.reshape((hi - lo,) + tail)
        decode_counters.recorrelated_elements += q.size
        if stage == Stage.QUANTIZED:
            slab_tracker.alloc()
            yield q.astype(np.int32)
        else:
            decode_counters.dequantized_elements += q.size
            slab_tracker.alloc()
            yield q.astype(np.float64) * (2.0 * c.eps)


def sliding_window(c: CompressedStream, stage: Stage):
    """Yield (index, prev, cur, nxt) slab triples, holding at most 3 slabs.

    Dropped slabs are released from the tracker as the window advances.
    """
    it = slab_iter(c, stage)
    window: list = []
    try:
        window.append(next(it))
    except StopIteration:
        return
    nxt = next(it, None)
    if nxt is not None:
        window.append(nxt)
    idx = 0
    while True:
        prev = window[idx - 1] if idx > 0 else None
        cur = window[idx] if idx < len(window) else None
        if cur is None:
            return
        nxt = window[idx + 1] if idx + 1 < len(window) else None
        yield idx, prev, cur, nxt
        if nxt is None:
            return
        if idx > 0:
            window[idx - 1] = None
            slab_tracker.free()
        fetched = next(it, None)
        if fetched is not None:
            window.append(fetched)
        idx += 1
