import numpy as np
import pytest

from conftest import random_field
from hsz.analytics import fields
from hsz.compressors import CompressorKind, compress
from hsz.errors import UnsupportedStageError
from hsz.oracle import (
    oracle_curl,
    oracle_derivative,
    oracle_divergence,
    oracle_laplacian,
)
from hsz.quant import ErrorBound
from hsz.stages import Stage, partial_decompress

ND_KINDS = [CompressorKind.HSZP_ND, CompressorKind.HSZX_ND]
ALL_KINDS = list(CompressorKind)


def _max_rel(a, b):
    scale = max(np.abs(b).max(), 1e-12)
    return np.abs(a - b).max() / scale


@pytest.mark.parametrize("dims", [(15, 11), (6, 7, 8)])
@pytest.mark.parametrize("kind", ALL_KINDS)
def test_quantized_stage_derivative_matches_oracle(rng, kind, dims):
    field = random_field(rng, dims)
    c = compress(field, kind, ErrorBound("abs", 0.01))
    full = partial_decompress(c, Stage.FULL)
    derived = fields.compute_field_op(c, "derivative", Stage.QUANTIZED)
    for ax, comp in enumerate(derived.components):
        assert _max_rel(comp, oracle_derivative(full, ax)) < 1e-12
    lap = fields.compute_field_op(c, "laplacian", Stage.QUANTIZED)
    assert _max_rel(lap.components[0], oracle_laplacian(full)) < 1e-12


@pytest.mark.parametrize("dims", [(15, 11), (6, 7, 8)])
@pytest.mark.parametrize("kind", ND_KINDS)
def test_decorrelated_stage_matches_quantized_bitwise(rng, kind, dims):
    field = random_field(rng, dims)
    c = compress(field, kind, ErrorBound("abs", 0.01))
    for op in ("derivative", "laplacian"):
        from_dp = fields.compute_field_op(c, op, Stage.DECORRELATED)
        from_dq = fields.compute_field_op(c, op, Stage.QUANTIZED)
        for a, b in zip(from_dp.components, from_dq.components):
            assert np.array_equal(a, b)


def test_flat_kind_has_no_decorrelated_stencils(rng):
    field = random_field(rng, (10, 10))
    c = compress(field, CompressorKind.HSZX, ErrorBound("abs", 0.01))
    with pytest.raises(UnsupportedStageError):
        fields.compute_field_op(c, "derivative", Stage.DECORRELATED)
    with pytest.raises(UnsupportedStageError):
        fields.compute_field_op(c, "derivative", Stage.META)


def test_boundary_values_are_zero(rng):
    field = random_field(rng, (9, 8))
    c = compress(field, CompressorKind.HSZP_ND, ErrorBound("abs", 0.01))
    d = fields.compute_field_op(c, "derivative", Stage.DECORRELATED)
    dx, dy = d.components
    assert np.all(dx[0] == 0) and np.all(dx[-1] == 0)
    assert np.all(dy[:, 0] == 0) and np.all(dy[:, -1] == 0)
    lap = fields.compute_field_op(c, "laplacian", Stage.DECORRELATED).components[0]
    assert np.all(lap[0] == 0) and np.all(lap[:, -1] == 0)


def test_laplacian_rejects_1d(rng):
    field = random_field(rng, (50,))
    c = compress(field, CompressorKind.HSZP, ErrorBound("abs", 0.01))
    with pytest.raises(ValueError):
        fields.compute_field_op(c, "laplacian", Stage.QUANTIZED)


def _vector_sources(rng, dims, kind, builder=None):
    comps = []
    for ax in range(len(dims)):
        f = builder(ax, dims) if builder else random_field(rng, dims)
        comps.append(compress(f, kind, ErrorBound("abs", 0.005)))
    return tuple(comps)


@pytest.mark.parametrize("dims", [(12, 13), (6, 7, 8)])
@pytest.mark.parametrize("kind", ND_KINDS)
def test_divergence_and_curl_match_oracle(rng, kind, dims):
    sources = _vector_sources(rng, dims, kind)
    fulls = [partial_decompress(c, Stage.FULL) for c in sources]
    for stage in (Stage.DECORRELATED, Stage.QUANTIZED):
        div = fields.divergence(sources, stage).components[0]
        assert _max_rel(div, oracle_divergence(fulls)) < 1e-12
        got = fields.curl(sources, stage)
        want = oracle_curl(fulls)
        for a, b in zip(got.components, want):
            assert _max_rel(a, b) < 1e-12


def test_curl_sign_convention_rigid_rotation():
    # u = -y, v = x rotates counterclockwise in (x, y); its scalar curl is
    # dy(u) - dx(v) = -2 under this axis convention.
    n = 16
    i = np.arange(n, dtype=np.float32)
    u = np.tile(-i, (n, 1))  # -y, varying along axis 1
    v = np.tile(i[:, None], (1, n))  # x, varying along axis 0
    cu = compress(u, CompressorKind.HSZP_ND, ErrorBound("abs", 0.01))
    cv = compress(v, CompressorKind.HSZP_ND, ErrorBound("abs", 0.01))
    curl = fields.curl((cu, cv), Stage.QUANTIZED).components[0]
    interior = curl[1:-1, 1:-1]
    np.testing.assert_allclose(interior, -2.0, atol=0.05)


def test_vector_ops_validate_components(rng):
    a = compress(random_field(rng, (8, 8)), CompressorKind.HSZP_ND, ErrorBound("abs", 0.01))
    b = compress(random_field(rng, (8, 9)), CompressorKind.HSZP_ND, ErrorBound("abs", 0.01))
    with pytest.raises(ValueError):
        fields.divergence((a, b), Stage.QUANTIZED)
    with pytest.raises(ValueError):
        fields.curl((a,), Stage.QUANTIZED)
    mixed = compress(random_field(rng, (8, 8)), CompressorKind.HSZX_ND, ErrorBound("abs", 0.01))
    with pytest.raises(ValueError):
        fields.divergence((a, mixed), Stage.QUANTIZED)


def test_streamed_derivative_bit_identical(rng):
    field = random_field(rng, (40, 17))
    for kind in ND_KINDS:
        c = compress(field, kind, ErrorBound("abs", 0.01))
        streamed = fields.streamed_derivative(c)
        whole = fields.derivative_from_dq(partial_decompress(c, Stage.QUANTIZED))
        for a, b in zip(streamed.components, whole.components):
            assert np.array_equal(a, b)
