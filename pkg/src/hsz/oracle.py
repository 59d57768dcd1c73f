"""Naive reference implementations used only by tests.

Everything here operates on fully decompressed floats with textbook
formulas and shares no code with the homomorphic paths: statistics are
two-pass, and stencils are evaluated with shifted copies and an explicit
validity mask (entries whose stencil leaves the domain are 0).
"""

from __future__ import annotations

import numpy as np


def oracle_stats(field: np.ndarray) -> tuple[float, float]:
    """Two-pass mean and sample standard deviation."""
    d = np.asarray(field, dtype=np.float64).ravel()
    if d.size < 2:
        raise ValueError("need at least 2 points")
    mu = d.sum() / d.size
    var = ((d - mu) ** 2).sum() / (d.size - 1)
    return float(mu), float(np.sqrt(var))


def _shift(d: np.ndarray, axis: int, step: int) -> np.ndarray:
    """d shifted so result[i] = d[i+step] along axis, zero-filled."""
    out = np.zeros_like(d)
    src = [slice(None)] * d.ndim
    dst = [slice(None)] * d.ndim
    if step > 0:
        src[axis] = slice(step, None)
        dst[axis] = slice(0, -step)
    else:
        src[axis] = slice(0, step)
        dst[axis] = slice(-step, None)
    out[tuple(dst)] = d[tuple(src)]
    return out


def _interior_mask(shape: tuple[int, ...], axes) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    for ax in axes:
        edge = [slice(None)] * len(shape)
        edge[ax] = 0
        mask[tuple(edge)] = False
        edge[ax] = -1
        mask[tuple(edge)] = False
    return mask


def oracle_derivative(field: np.ndarray, axis: int) -> np.ndarray:
    """(d[i+1] - d[i-1]) / 2 along one axis, 0 where the stencil exits."""
    d = np.asarray(field, dtype=np.float64)
    out = (_shift(d, axis, 1) - _shift(d, axis, -1)) / 2.0
    out[~_interior_mask(d.shape, [axis])] = 0.0
    return out


def oracle_laplacian(field: np.ndarray) -> np.ndarray:
    """Sum of axis second differences, 0 on every domain boundary."""
    d = np.asarray(field, dtype=np.float64)
    acc = np.zeros_like(d)
    for ax in range(d.ndim):
        acc += _shift(d, ax, 1) + _shift(d, ax, -1)
    acc -= 2 * d.ndim * d
    acc[~_interior_mask(d.shape, range(d.ndim))] = 0.0
    return acc


def oracle_divergence(components: list[np.ndarray]) -> np.ndarray:
    out = oracle_derivative(components[0], 0)
    for ax in range(1, len(components)):
        out = out + oracle_derivative(components[ax], ax)
    return out


def oracle_curl(components: list[np.ndarray]) -> list[np.ndarray]:
    """2D scalar curl dy(u) - dx(v); 3D right-handed curl components."""
    if len(components) == 2:
        u, v = components
        return [oracle_derivative(u, 1) - oracle_derivative(v, 0)]
    u, v, w = components
    return [
        oracle_derivative(w, 1) - oracle_derivative(v, 2),
        oracle_derivative(u, 2) - oracle_derivative(w, 0),
        oracle_derivative(v, 0) - oracle_derivative(u, 1),
    ]
