import numpy as np
import pytest

from hsz.grid import (
    BlockGeometry,
    GridShape,
    canonical_order,
    invert_order,
    partition,
    slab_row_bounds,
)


def test_shape_basics():
    s = GridShape((4, 6))
    assert s.ndims == 2
    assert s.total == 24
    assert s.flattened().dims == (24,)


@pytest.mark.parametrize("dims", [(), (1, 2, 3, 4), (0,), (3, -1)])
def test_shape_rejects_bad_dims(dims):
    with pytest.raises(ValueError):
        GridShape(dims)


def test_partition_edge_blocks_shrink():
    geo = partition(GridShape((5, 7)), (2, 3))
    assert geo.block_grid == (3, 3)
    assert geo.block_count == 9
    # Bottom-right block is 1x1.
    assert geo.block_shape((2, 2)) == (1, 1)
    sizes = geo.block_sizes()
    assert sizes.sum() == 35
    # Row-major block order: last block is the corner.
    assert sizes[-1] == 1
    expected = [
        geo.block_shape(b) for b in geo.iter_blocks()
    ]
    assert sizes.tolist() == [int(np.prod(s)) for s in expected]


def test_partition_validates_block_dims():
    with pytest.raises(ValueError):
        partition(GridShape((4, 4)), (2,))
    with pytest.raises(ValueError):
        partition(GridShape((4, 4)), (0, 2))
    with pytest.raises(ValueError):
        partition(GridShape((4, 4)), (5, 2))


def test_canonical_order_global_is_identity():
    shape = GridShape((3, 5))
    geo = partition(shape, (2, 2))
    perm = canonical_order(shape, geo, "global-row-major")
    assert np.array_equal(perm, np.arange(15))


def test_canonical_order_block_contiguous_2x2():
    shape = GridShape((2, 4))
    geo = partition(shape, (2, 2))
    perm = canonical_order(shape, geo, "block-contiguous")
    # Block 0 covers columns 0-1 of both rows, block 1 columns 2-3.
    assert perm.tolist() == [0, 1, 4, 5, 2, 3, 6, 7]


def test_order_inversion_round_trip():
    shape = GridShape((5, 6, 7))
    geo = partition(shape, (2, 3, 4))
    perm = canonical_order(shape, geo, "block-contiguous")
    inv = invert_order(perm)
    assert np.array_equal(perm[inv], np.arange(shape.total))
    data = np.arange(shape.total)
    assert np.array_equal(data[perm][inv], data)


def test_slab_row_bounds_cover_all_rows():
    bounds = slab_row_bounds(10, 4)
    assert bounds == [(0, 4), (4, 8), (8, 10)]
    with pytest.raises(ValueError):
        slab_row_bounds(10, 0)


def test_block_slices_match_sizes():
    geo = partition(GridShape((6, 5, 4)), (4, 2, 3))
    for bidx in geo.iter_blocks():
        sl = geo.block_slices(bidx)
        shape = tuple(s.stop - s.start for s in sl)
        assert shape == geo.block_shape(bidx)
