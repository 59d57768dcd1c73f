import numpy as np
import pytest

from conftest import random_field
from hsz.compressors import CompressorKind, compress, recorrelate
from hsz.errors import UnsupportedStageError
from hsz.quant import ErrorBound, dequantize
from hsz.stages import (
    Stage,
    partial_decompress,
    slab_bounds,
    slab_iter,
    sliding_window,
    slab_tracker,
    supported_stages,
)

ALL_KINDS = list(CompressorKind)


def _compress_random(rng, kind, dims=(12, 10), eps=0.01):
    field = random_field(rng, dims)
    return field, compress(field, kind, ErrorBound("abs", eps))


def test_stage_names_round_trip():
    for stage in Stage:
        assert Stage.from_name(stage.cli_name) is stage
    with pytest.raises(ValueError):
        Stage.from_name("half")


def test_metadata_stage_only_for_block_mean_kinds(rng):
    _, c = _compress_random(rng, CompressorKind.HSZP_ND)
    assert Stage.META not in supported_stages(c.kind)
    with pytest.raises(UnsupportedStageError):
        partial_decompress(c, Stage.META)
    _, cx = _compress_random(rng, CompressorKind.HSZX_ND)
    meta = partial_decompress(cx, Stage.META)
    assert meta.dtype == np.int32
    assert len(meta) == cx.geometry.block_count


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("dims", [(64,), (12, 10), (6, 7, 8)])
def test_stage_composition(rng, kind, dims):
    if kind.is_nd and len(dims) < 2:
        pytest.skip("nd compressor needs 2D+")
    field, c = _compress_random(rng, kind, dims)
    ds = partial_decompress(c, Stage.DECORRELATED)
    qf = partial_decompress(c, Stage.QUANTIZED)
    full = partial_decompress(c, Stage.FULL)
    # Stage 3 equals recorrelated stage 2, integer exact.
    assert np.array_equal(recorrelate(ds).values, qf.values)
    # Stage 4 equals dequantized stage 3, bit exact.
    assert np.array_equal(full, dequantize(qf.values, c.eps))
    assert full.shape == dims
    assert np.abs(full - field).max() <= c.eps * (1 + 1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_slab_concatenation_matches_full(rng, kind):
    dims = (20, 9) if kind.is_nd else (150,)
    field, c = _compress_random(rng, kind, dims)
    for stage in (Stage.QUANTIZED, Stage.FULL):
        whole = partial_decompress(c, stage)
        if stage == Stage.QUANTIZED:
            whole = whole.values
        slabs = list(slab_iter(c, stage))
        joined = np.concatenate([np.atleast_1d(s) for s in slabs], axis=0)
        assert np.array_equal(joined.reshape(whole.shape), whole)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_slab_decorrelated_concatenation(rng, kind):
    dims = (16, 6) if kind.is_nd else (100,)
    _, c = _compress_random(rng, kind, dims)
    joined = np.concatenate(list(slab_iter(c, Stage.DECORRELATED)))
    assert np.array_equal(joined, partial_decompress(c, Stage.DECORRELATED).values)


def test_slab_bounds_shapes(rng):
    _, c = _compress_random(rng, CompressorKind.HSZX_ND, dims=(20, 9))
    bounds = slab_bounds(c)
    # Block rows of 8, last one short.
    assert bounds == [(0, 8), (8, 16), (16, 20)]
    _, cp = _compress_random(rng, CompressorKind.HSZP_ND, dims=(5, 4))
    assert slab_bounds(cp) == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]


def test_sliding_window_holds_three_slabs(rng):
    _, c = _compress_random(rng, CompressorKind.HSZP_ND, dims=(24, 8))
    slab_tracker.reset()
    seen = 0
    for idx, prev, cur, nxt in sliding_window(c, Stage.QUANTIZED):
        assert cur is not None
        if idx > 0:
            assert prev is not None
        seen += 1
    assert seen == 24
    assert slab_tracker.high_water <= 3


def test_sliding_window_single_slab(rng):
    _, c = _compress_random(rng, CompressorKind.HSZX_ND, dims=(6, 6))
    triples = list(sliding_window(c, Stage.QUANTIZED))
    assert len(triples) == 1
    idx, prev, cur, nxt = triples[0]
    assert prev is None and nxt is None
    assert cur.shape == (6, 6)


def test_full_stage_error_bound_is_float64(rng):
    field, c = _compress_random(rng, CompressorKind.HSZP, dims=(64,), eps=0.05)
    out = partial_decompress(c, Stage.FULL)
    assert out.dtype == np.float64
