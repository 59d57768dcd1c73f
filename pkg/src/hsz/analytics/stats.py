"""Mean and standard deviation computed on intermediate representations.

All integer accumulation is exact: partial sums move to Python ints before
int64 could overflow, and the variance numerator is formed as the exact
integer sum(q^2)*N - sum(q)^2 before a single float square root and scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..compressors import CompressorKind, DecorrelatedStream
from ..errors import UnsupportedStageError
from ..quant import QuantizedField
from ..stages import Stage

_INT64_HEADROOM = 2**62


@dataclass(frozen=True)
class StatResult:
    value: float
    stage_used: Stage
    op: str


def _exact_sum(values: np.ndarray) -> int:
    """Exact integer sum, chunked so int64 accumulation cannot overflow."""
    v = np.ascontiguousarray(values, dtype=np.int64)
    if v.size == 0:
        return 0
    bound = int(np.abs(v).max())
    if bound == 0:
        return 0
    step = max(1, _INT64_HEADROOM // bound)
    return sum(int(v[i : i + step].sum()) for i in range(0, v.size, step))


def _exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    """Exact integer dot product with the same overflow chunking."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.size == 0:
        return 0
    bound = int(np.abs(a).max()) * int(np.abs(b).max())
    if bound == 0:
        return 0
    step = max(1, _INT64_HEADROOM // bound)
    return sum(
        int(np.dot(a[i : i + step], b[i : i + step]))
        for i in range(0, a.size, step)
    )


def _std_from_sums(s1: int, s2: int, n: int, eps: float) -> float:
    if n < 2:
        raise ValueError("standard deviation requires at least 2 points")
    num = s2 * n - s1 * s1  # exact; nonnegative by Cauchy-Schwarz
    return math.sqrt(num / (n * (n - 1))) * 2.0 * eps


# ---------------------------------------------------------------------------
# Mean


def mean_from_meta(metadata, block_sizes, eps: float) -> float:
    """Mean from per-block integer means: (1/N * sum(M_b*S_b)) * 2*eps."""
    metadata = np.asarray(metadata, dtype=np.int64)
    block_sizes = np.asarray(block_sizes, dtype=np.int64)
    if metadata.size == 0:
        raise ValueError("no block metadata")
    n = int(block_sizes.sum())
    total = _exact_dot(metadata, block_sizes)
    return total / n * (2.0 * eps)


def mean_from_dp(stream: DecorrelatedStream) -> float:
    """Mean from decorrelated values, without reconstructing the indices."""
    n = stream.shape.total
    p = stream.values.astype(np.int64)
    if stream.kind.is_block_mean:
        sizes = stream.geometry.block_sizes()
        total = _exact_sum(p) + _exact_dot(stream.metadata, sizes)
    elif stream.kind == CompressorKind.HSZP:
        # sum(q) telescopes to a remaining-count weighted sum of residuals.
        total = _exact_dot(p, np.arange(n, 0, -1, dtype=np.int64))
    else:
        total = _lorenzo_weighted_sum(p, stream.shape.dims)
    return total / n * (2.0 * eps_of(stream))


def _lorenzo_weighted_sum(p: np.ndarray, dims: tuple[int, ...]) -> int:
    """sum(q) from Lorenzo residuals via separable per-axis weights."""
    grid = p.reshape(dims)
    weights = [np.arange(n, 0, -1, dtype=np.int64) for n in dims]
    bound = grid.size and int(np.abs(grid).max())
    for w in weights:
        bound *= int(w[0])
    if bound < _INT64_HEADROOM:
        spec = {2: "i,j,ij->", 3: "i,j,k,ijk->"}[len(dims)]
        return int(np.einsum(spec, *weights, grid.astype(np.int64)))
    # Exact fallback: collapse one axis at a time in Python ints.
    total = 0
    for idx in np.ndindex(*dims[:-1]):
        row = int(np.dot(grid[idx].astype(np.int64), weights[-1]))
        for ax, i in enumerate(idx):
            row *= int(weights[ax][i])
        total += row
    return total


def mean_from_dq(q: QuantizedField) -> float:
    """Mean from quantization indices: (sum(q)/N) * 2*eps."""
    total = _exact_sum(q.values)
    return total / q.values.size * (2.0 * q.eps)


# ---------------------------------------------------------------------------
# Standard deviation


def std_from_dp(stream: DecorrelatedStream) -> float:
    """Standard deviation from decorrelated values."""
    n = stream.shape.total
    eps = eps_of(stream)
    p = stream.values.astype(np.int64)
    if stream.kind.is_block_mean:
        sizes = stream.geometry.block_sizes()
        weighted = _exact_dot(stream.metadata, sizes)
        # Integer mean, rounded half up on the exact quotient.
        mu = (2 * weighted + n) // (2 * n)
        dev = p + np.repeat(stream.metadata.astype(np.int64), sizes) - mu
        if n < 2:
            raise ValueError("standard deviation requires at least 2 points")
        return math.sqrt(_exact_dot(dev, dev) / (n - 1)) * 2.0 * eps
    if stream.kind == CompressorKind.HSZP:
        q = np.cumsum(p)
        s1 = _exact_sum(q)
        s2 = _exact_dot(q, q)
        return _std_from_sums(s1, s2, n, eps)
    return _lorenzo_prefix_std(p, stream.shape.dims, eps)


def _lorenzo_prefix_std(p: np.ndarray, dims: tuple[int, ...], eps: float) -> float:
    """Prefix-sum accumulation of sum(q) and sum(q^2) over Lorenzo residuals.

    A running buffer holds the reconstructed previous row (2D) or plane (3D);
    each new slab of residuals is prefix-summed and added in place.
    """
    grid = p.reshape(dims)
    col_sum = np.zeros(dims[1:], dtype=np.int64)
    s1 = 0
    s2 = 0
    for i in range(dims[0]):
        pref = grid[i].astype(np.int64)
        pref = np.cumsum(pref, axis=0) if pref.ndim else pref
        if pref.ndim == 2:
            pref = np.cumsum(pref, axis=1)
        col_sum += pref
        s1 += _exact_sum(col_sum)
        s2 += _exact_dot(col_sum.ravel(), col_sum.ravel())
    return _std_from_sums(s1, s2, int(np.prod(dims)), eps)


def std_from_dq(q: QuantizedField) -> float:
    """Standard deviation from quantization indices."""
    v = q.values.ravel()
    s1 = _exact_sum(v)
    s2 = _exact_dot(v, v)
    return _std_from_sums(s1, s2, v.size, q.eps)


def mean_from_df(field: np.ndarray) -> float:
    return float(np.mean(np.asarray(field, dtype=np.float64)))


def std_from_df(field: np.ndarray) -> float:
    field = np.asarray(field, dtype=np.float64)
    if field.size < 2:
        raise ValueError("standard deviation requires at least 2 points")
    return float(np.std(field, ddof=1))


def eps_of(stream: DecorrelatedStream) -> float:
    return float(stream.eps)


# ---------------------------------------------------------------------------
# Stage dispatch


def compute_stat(c, op: str, stage: Stage) -> StatResult:
    """Run mean/std at the given stage of a compressed stream."""
    from ..stages import partial_decompress

    if op not in ("mean", "std"):
        raise ValueError(f"unknown statistic {op!r}")
    if op == "std" and stage == Stage.META:
        raise UnsupportedStageError("standard deviation needs stage >= decorrelated")
    view = partial_decompress(c, stage)
    if stage == Stage.META:
        value = mean_from_meta(view, c.geometry.block_sizes(), c.eps)
    elif stage == Stage.DECORRELATED:
        value = mean_from_dp(view) if op == "mean" else std_from_dp(view)
    elif stage == Stage.QUANTIZED:
        value = mean_from_dq(view) if op == "mean" else std_from_dq(view)
    else:
        value = mean_from_df(view) if op == "mean" else std_from_df(view)
    return StatResult(value, stage, op)
