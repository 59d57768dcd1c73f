"""Finite-difference operators on intermediate representations.

Unit grid spacing; the 1/2 of the central difference is absorbed into the
2*eps dequantization scale, so integer stencils are scaled by eps
(derivatives) or 2*eps (Laplacian).  Stencil outputs are exactly 0 wherever
a neighbor would fall outside the domain, in every path, so results from
different stages compare bit-for-bit.

Axis convention: the x derivative differentiates along axis 0 (slowest),
y along axis 1, z along axis 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..compressors import CompressedStream, CompressorKind, DecorrelatedStream
from ..errors import UnsupportedStageError
from ..quant import QuantizedField
from ..stages import Stage, partial_decompress, sliding_window

AXIS_NAMES = ("dx", "dy", "dz")


@dataclass(frozen=True)
class DerivedField:
    op: str
    components: tuple[np.ndarray, ...]
    component_names: tuple[str, ...]


def _axis_central_diff(values: np.ndarray, axis: int) -> np.ndarray:
    """(v[i+1] - v[i-1]) along ``axis``; zero on the two boundary layers."""
    out = np.zeros(values.shape, dtype=values.dtype)
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    lo[axis] = slice(0, -2)
    hi[axis] = slice(2, None)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = values[tuple(hi)] - values[tuple(lo)]
    return out


def _laplacian_stencil(values: np.ndarray) -> np.ndarray:
    """Sum of neighbors minus 2*ndim*center; zero on all domain boundaries."""
    ndim = values.ndim
    interior = tuple(slice(1, -1) for _ in range(ndim))
    acc = (-2 * ndim) * values[interior]
    for axis in range(ndim):
        lo = [slice(1, -1)] * ndim
        hi = [slice(1, -1)] * ndim
        lo[axis] = slice(0, -2)
        hi[axis] = slice(2, None)
        acc = acc + values[tuple(lo)] + values[tuple(hi)]
    out = np.zeros(values.shape, dtype=acc.dtype)
    out[interior] = acc
    return out


# ---------------------------------------------------------------------------
# Quantized-index (stage 3) and float (stage 4) paths


def derivative_from_dq(q: QuantizedField) -> DerivedField:
    v = q.values.astype(np.int64)
    comps = tuple(
        _axis_central_diff(v, ax) * q.eps for ax in range(v.ndim)
    )
    return DerivedField("derivative", comps, AXIS_NAMES[: v.ndim])


def laplacian_from_dq(q: QuantizedField) -> DerivedField:
    v = q.values.astype(np.int64)
    if v.ndim < 2:
        raise ValueError("Laplacian requires 2D or 3D data")
    lap = _laplacian_stencil(v) * (2.0 * q.eps)
    return DerivedField("laplacian", (lap,), ("lap",))


def derivative_from_df(field: np.ndarray) -> DerivedField:
    v = np.asarray(field, dtype=np.float64)
    comps = tuple(_axis_central_diff(v, ax) / 2.0 for ax in range(v.ndim))
    return DerivedField("derivative", comps, AXIS_NAMES[: v.ndim])


def laplacian_from_df(field: np.ndarray) -> DerivedField:
    v = np.asarray(field, dtype=np.float64)
    if v.ndim < 2:
        raise ValueError("Laplacian requires 2D or 3D data")
    return DerivedField("laplacian", (_laplacian_stencil(v),), ("lap",))


# ---------------------------------------------------------------------------
# Decorrelated (stage 2) paths, multidimensional kinds only


def _require_nd_stream(stream: DecorrelatedStream):
    if not stream.kind.is_nd:
        raise UnsupportedStageError(
            f"{stream.kind.cli_name} does not support stencil operations on "
            "decorrelated data (no multidimensional layout)"
        )


def derivative_from_dp(stream: DecorrelatedStream) -> DerivedField:
    _require_nd_stream(stream)
    eps = stream.eps
    dims = stream.shape.dims
    if stream.kind == CompressorKind.HSZX_ND:
        p = stream.as_grid().astype(np.int64)
        mean = stream.metadata_grid()
        comps = tuple(
            (_axis_central_diff(p, ax) + _axis_central_diff(mean, ax)) * eps
            for ax in range(len(dims))
        )
        return DerivedField("derivative", comps, AXIS_NAMES[: len(dims)])
    p = stream.values.astype(np.int64).reshape(dims)
    comps = []
    for ax in range(len(dims)):
        # q[i+1] - q[i-1] along ax equals the prefix sum (over every other
        # axis) of the two residual layers at ax and ax+1.
        sel_mid = [slice(None)] * len(dims)
        sel_hi = [slice(None)] * len(dims)
        sel_mid[ax] = slice(1, -1)
        sel_hi[ax] = slice(2, None)
        pair = p[tuple(sel_mid)] + p[tuple(sel_hi)]
        for other in range(len(dims)):
            if other != ax:
                pair = np.cumsum(pair, axis=other)
        out = np.zeros(dims, dtype=np.int64)
        out[tuple(sel_mid)] = pair
        comps.append(out * eps)
    return DerivedField("derivative", tuple(comps), AXIS_NAMES[: len(dims)])


def laplacian_from_dp(stream: DecorrelatedStream) -> DerivedField:
    _require_nd_stream(stream)
    dims = stream.shape.dims
    scale = 2.0 * stream.eps
    if stream.kind == CompressorKind.HSZX_ND:
        p = stream.as_grid().astype(np.int64)
        mean = stream.metadata_grid()
        lap = (_laplacian_stencil(p) + _laplacian_stencil(mean)) * scale
        return DerivedField("laplacian", (lap,), ("lap",))
    p = stream.values.astype(np.int64).reshape(dims)
    ndim = len(dims)
    interior = tuple(slice(1, -1) for _ in range(ndim))
    acc = None
    for ax in range(ndim):
        # Prefix-summed residuals over the other axes give the first
        # difference q[.+1] - q[.] along ax; a second difference of that is
        # this axis' contribution to the Laplacian.
        pref = p
        for other in range(ndim):
            if other != ax:
                pref = np.cumsum(pref, axis=other)
        hi = [slice(1, -1)] * ndim
        lo = [slice(1, -1)] * ndim
        hi[ax] = slice(2, None)
        lo[ax] = slice(1, -1)
        contrib = pref[tuple(hi)] - pref[tuple(lo)]
        acc = contrib if acc is None else acc + contrib
    out = np.zeros(dims, dtype=np.int64)
    out[interior] = acc
    return DerivedField("laplacian", (out * scale,), ("lap",))


# ---------------------------------------------------------------------------
# Stage dispatch and multivariate operators


def _stage_view(c: CompressedStream, stage: Stage):
    if stage in (Stage.META,):
        raise UnsupportedStageError("stencil operations need stage >= decorrelated")
    return partial_decompress(c, stage)


def compute_field_op(c: CompressedStream, op: str, stage: Stage) -> DerivedField:
    """Derivative or Laplacian of one compressed field at the given stage."""
    view = _stage_view(c, stage)
    table = {
        ("derivative", Stage.DECORRELATED): derivative_from_dp,
        ("derivative", Stage.QUANTIZED): derivative_from_dq,
        ("derivative", Stage.FULL): derivative_from_df,
        ("laplacian", Stage.DECORRELATED): laplacian_from_dp,
        ("laplacian", Stage.QUANTIZED): laplacian_from_dq,
        ("laplacian", Stage.FULL): laplacian_from_df,
    }
    try:
        fn = table[(op, stage)]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    return fn(view)


def _component_derivatives(
    sources: tuple[CompressedStream, ...], stage: Stage
) -> list[DerivedField]:
    shapes = {c.shape.dims for c in sources}
    if len(shapes) != 1:
        raise ValueError(f"component shapes differ: {sorted(shapes)}")
    kinds = {c.kind for c in sources}
    if len(kinds) != 1:
        raise ValueError("all components must use the same compressor")
    ndims = len(next(iter(shapes)))
    if ndims != len(sources):
        raise ValueError(
            f"{ndims}D vector field needs {ndims} components, got {len(sources)}"
        )
    return [compute_field_op(c, "derivative", stage) for c in sources]


def divergence(sources: tuple[CompressedStream, ...], stage: Stage) -> DerivedField:
    """Sum of each component's derivative along its own axis."""
    derivs = _component_derivatives(sources, stage)
    out = derivs[0].components[0].copy()
    for ax in range(1, len(derivs)):
        out += derivs[ax].components[ax]
    return DerivedField("divergence", (out,), ("div",))


def curl(sources: tuple[CompressedStream, ...], stage: Stage) -> DerivedField:
    """2D scalar curl dy(u) - dx(v); 3D right-handed vector curl."""
    derivs = _component_derivatives(sources, stage)
    if len(derivs) == 2:
        u, v = derivs
        out = u.components[1] - v.components[0]
        return DerivedField("curl", (out,), ("curl",))
    u, v, w = derivs
    cx = w.components[1] - v.components[2]
    cy = u.components[2] - w.components[0]
    cz = v.components[0] - u.components[1]
    return DerivedField("curl", (cx, cy, cz), ("cx", "cy", "cz"))


# ---------------------------------------------------------------------------
# Out-of-core streaming


def streamed_derivative(c: CompressedStream) -> DerivedField:
    """Slab-streamed derivative from quantized slabs.

    Holds a window of at most three slabs; bit-identical to
    :func:`derivative_from_dq` on the whole array.
    """
    if not c.kind.is_nd:
        raise UnsupportedStageError("streamed derivative needs an nd compressor")
    dims = c.shape.dims
    eps = c.eps
    comps = [np.zeros(dims, dtype=np.float64) for _ in dims]
    row = 0
    for _, prev, cur, nxt in sliding_window(c, Stage.QUANTIZED):
        rows = cur.shape[0]
        parts = [cur.astype(np.int64)]
        top = 0
        if prev is not None:
            parts.insert(0, prev[-1:].astype(np.int64))
            top = 1
        if nxt is not None:
            parts.append(nxt[:1].astype(np.int64))
        ext = np.concatenate(parts, axis=0)
        d0 = _axis_central_diff(ext, 0)[top : top + rows]
        comps[0][row : row + rows] = d0 * eps
        for ax in range(1, len(dims)):
            comps[ax][row : row + rows] = (
                _axis_central_diff(cur.astype(np.int64), ax) * eps
            )
        row += rows
    return DerivedField("derivative", tuple(comps), AXIS_NAMES[: len(dims)])
