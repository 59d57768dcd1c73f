"""Dimension bookkeeping, linearization, and block/slab partitioning.

All arrays are row-major (last axis fastest).  Blocks tile the grid exactly;
edge blocks are shrunk rather than padded so that blockwise statistics stay
honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_NDIMS = 3


@dataclass(frozen=True)
class GridShape:
    """Shape of a 1-3 dimensional field."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not 1 <= len(dims) <= MAX_NDIMS:
            raise ValueError(f"1 to {MAX_NDIMS} dimensions required, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValueError(f"all extents must be >= 1, got {dims}")

    @property
    def ndims(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def flattened(self) -> "GridShape":
        return GridShape((self.total,))


@dataclass(frozen=True)
class BlockGeometry:
    """Uniform blocking of a grid; edge blocks may be smaller."""

    shape: GridShape
    block_dims: tuple[int, ...]
    block_grid: tuple[int, ...]

    @property
    def block_count(self) -> int:
        return math.prod(self.block_grid)

    def iter_blocks(self):
        """Yield block indices in row-major block order."""
        return np.ndindex(*self.block_grid)

    def block_slices(self, bidx: tuple[int, ...]) -> tuple[slice, ...]:
        return tuple(
            slice(b * bd, min((b + 1) * bd, n))
            for b, bd, n in zip(bidx, self.block_dims, self.shape.dims)
        )

    def block_shape(self, bidx: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(
            min((b + 1) * bd, n) - b * bd
            for b, bd, n in zip(bidx, self.block_dims, self.shape.dims)
        )

    def block_sizes(self) -> np.ndarray:
        """Element count of every block, in row-major block order."""
        per_axis = [
            np.minimum((np.arange(g) + 1) * bd, n) - np.arange(g) * bd
            for g, bd, n in zip(self.block_grid, self.block_dims, self.shape.dims)
        ]
        sizes = per_axis[0]
        for ax in per_axis[1:]:
            sizes = np.multiply.outer(sizes, ax)
        return sizes.ravel().astype(np.int64)


@dataclass(frozen=True)
class SlabIndex:
    """Ordinal of an axis-0 band of rows (2D) or planes (3D)."""

    ordinal: int
    extent: int

    def row_range(self, n1: int) -> tuple[int, int]:
        start = self.ordinal * self.extent
        if not 0 <= start < n1:
            raise ValueError(f"slab ordinal {self.ordinal} out of range")
        return start, min(start + self.extent, n1)


def partition(shape: GridShape, block_dims: tuple[int, ...]) -> BlockGeometry:
    """Tile ``shape`` with uniform blocks of ``block_dims`` extents."""
    block_dims = tuple(int(b) for b in block_dims)
    if len(block_dims) != shape.ndims:
        raise ValueError(
            f"block_dims has {len(block_dims)} axes, grid has {shape.ndims}"
        )
    for b, n in zip(block_dims, shape.dims):
        if b < 1:
            raise ValueError(f"block extent must be >= 1, got {b}")
        if b > n:
            raise ValueError(f"block extent {b} exceeds grid extent {n}")
    block_grid = tuple(-(-n // b) for n, b in zip(shape.dims, block_dims))
    return BlockGeometry(shape, block_dims, block_grid)


def canonical_order(
    shape: GridShape, geometry: BlockGeometry, mode: str
) -> np.ndarray:
    """Permutation mapping stream position -> flat row-major index.

    ``global-row-major`` is the identity; ``block-contiguous`` lists blocks in
    row-major block order with row-major elements inside each block.
    """
    if mode == "global-row-major":
        return np.arange(shape.total, dtype=np.int64)
    if mode != "block-contiguous":
        raise ValueError(f"unknown canonical order mode {mode!r}")
    flat = np.arange(shape.total, dtype=np.int64).reshape(shape.dims)
    parts = [flat[geometry.block_slices(b)].ravel() for b in geometry.iter_blocks()]
    return np.concatenate(parts)


def invert_order(perm: np.ndarray) -> np.ndarray:
    """Inverse permutation: flat row-major index -> stream position."""
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=np.int64)
    return inv


def slab_row_bounds(n1: int, extent: int) -> list[tuple[int, int]]:
    """Axis-0 slab boundaries [(start, end), ...] covering all n1 rows."""
    if extent < 1:
        raise ValueError("slab extent must be >= 1")
    return [(s, min(s + extent, n1)) for s in range(0, n1, extent)]
