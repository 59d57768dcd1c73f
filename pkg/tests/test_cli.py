import numpy as np
import pytest
from click.testing import CliRunner

from conftest import random_field
from hsz.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _write_field(path, field):
    np.asarray(field, dtype="<f4").tofile(path)


def _all_output(result):
    try:
        return result.output + result.stderr
    except ValueError:
        return result.output


def _kv(output):
    pairs = {}
    for line in output.strip().splitlines():
        if "=" in line:
            k, _, v = line.partition("=")
            pairs[k] = v
    return pairs


def _compress_example(runner, tmp_path, example_field, extra=()):
    raw = tmp_path / "y.f32"
    out = tmp_path / "y.hsz"
    _write_field(raw, example_field)
    result = runner.invoke(
        main,
        [
            "compress",
            "--input", str(raw),
            "--dims", "2,4",
            "--compressor", "hszx-nd",
            "--error", "abs:0.1",
            "--block", "2,2",
            "--output", str(out),
            *extra,
        ],
    )
    return result, out


def test_compress_reports_ratio_and_eps(runner, tmp_path, example_field):
    result, out = _compress_example(runner, tmp_path, example_field)
    assert result.exit_code == 0, result.output
    pairs = _kv(result.output)
    assert pairs["eps"] == "0.1"
    assert float(pairs["ratio"]) > 0
    assert out.exists()


def test_decompress_stages(runner, tmp_path, example_field):
    _, out = _compress_example(runner, tmp_path, example_field)
    meta = tmp_path / "m.i32"
    r = runner.invoke(
        main, ["decompress", "--input", str(out), "--stage", "meta", "--output", str(meta)]
    )
    assert r.exit_code == 0, r.output
    assert np.fromfile(meta, dtype="<i4").tolist() == [5, -1]

    dec = tmp_path / "p.i32"
    r = runner.invoke(
        main,
        ["decompress", "--input", str(out), "--stage", "decorrelated", "--output", str(dec)],
    )
    assert r.exit_code == 0
    assert np.fromfile(dec, dtype="<i4").tolist() == [1, 3, 8, -10, -10, -11, 11, 10]

    quant = tmp_path / "q.i32"
    r = runner.invoke(
        main,
        ["decompress", "--input", str(out), "--stage", "quantized", "--output", str(quant)],
    )
    assert r.exit_code == 0
    # Canonical (block-contiguous) order of [[6,8,-11,-12],[13,-5,10,9]].
    assert np.fromfile(quant, dtype="<i4").tolist() == [6, 8, 13, -5, -11, -12, 10, 9]

    full = tmp_path / "d.f32"
    r = runner.invoke(
        main, ["decompress", "--input", str(out), "--stage", "full", "--output", str(full)]
    )
    assert r.exit_code == 0
    got = np.fromfile(full, dtype="<f4").reshape(2, 4)
    assert np.abs(got - example_field).max() <= 0.1 + 1e-6


def test_analyze_scalar_ops(runner, tmp_path, example_field):
    _, out = _compress_example(runner, tmp_path, example_field)
    r = runner.invoke(main, ["analyze", "--op", "std", "--input", str(out), "--stage", "decorrelated"])
    assert r.exit_code == 0, r.output
    assert _kv(r.output)["std"] == "2"
    r = runner.invoke(main, ["analyze", "--op", "mean", "--input", str(out), "--stage", "auto"])
    assert r.exit_code == 0
    # Auto resolves to the metadata stage for a block-mean compressor:
    # (5*4 - 1*4)/8 * 0.2 prints as the shortest round-trip form.
    assert _kv(r.output)["mean"] == "0.4"


def test_compress_relative_bound_prints_resolved_eps(
    runner, tmp_path, example_field
):
    raw = tmp_path / "y.f32"
    out = tmp_path / "y.hsz"
    _write_field(raw, example_field)
    r = runner.invoke(
        main,
        ["compress", "--input", str(raw), "--dims", "2,4", "--compressor",
         "hszx-nd", "--error", "rel:0.02", "--block", "2,2", "--output", str(out)],
    )
    assert r.exit_code == 0, r.output
    # Value range is 5.0, so 2% relative resolves to 0.1 absolute.
    assert _kv(r.output)["eps"] == "0.1"


def test_analyze_field_op_writes_components(runner, tmp_path, rng):
    raw = tmp_path / "f.f32"
    out = tmp_path / "f.hsz"
    _write_field(raw, random_field(rng, (16, 12)))
    runner.invoke(
        main,
        ["compress", "--input", str(raw), "--dims", "16,12", "--compressor",
         "hszp-nd", "--error", "abs:0.01", "--output", str(out)],
    )
    prefix = tmp_path / "deriv"
    r = runner.invoke(
        main,
        ["analyze", "--op", "derivative", "--input", str(out), "--output", str(prefix)],
    )
    assert r.exit_code == 0, r.output
    dx = np.fromfile(f"{prefix}.dx.f32", dtype="<f4")
    dy = np.fromfile(f"{prefix}.dy.f32", dtype="<f4")
    assert dx.size == dy.size == 16 * 12


def test_analyze_divergence(runner, tmp_path, rng):
    paths = []
    for name in ("u", "v"):
        raw = tmp_path / f"{name}.f32"
        out = tmp_path / f"{name}.hsz"
        _write_field(raw, random_field(rng, (10, 10)))
        runner.invoke(
            main,
            ["compress", "--input", str(raw), "--dims", "10,10", "--compressor",
             "hszx-nd", "--error", "abs:0.01", "--output", str(out)],
        )
        paths.append(str(out))
    prefix = tmp_path / "field"
    r = runner.invoke(
        main,
        ["analyze", "--op", "divergence", "--u", paths[0], "--v", paths[1],
         "--output", str(prefix)],
    )
    assert r.exit_code == 0, r.output
    assert (tmp_path / "field.div.f32").exists()


def test_analyze_unsupported_combination_prints_matrix(runner, tmp_path, rng):
    raw = tmp_path / "f.f32"
    out = tmp_path / "f.hsz"
    _write_field(raw, random_field(rng, (64,)))
    runner.invoke(
        main,
        ["compress", "--input", str(raw), "--dims", "64", "--compressor",
         "hszp", "--error", "abs:0.01", "--output", str(out)],
    )
    r = runner.invoke(
        main,
        ["analyze", "--op", "derivative", "--input", str(out), "--stage", "decorrelated"],
    )
    assert r.exit_code == 1
    assert "applicability" in _all_output(r)


def test_info(runner, tmp_path, example_field):
    _, out = _compress_example(runner, tmp_path, example_field)
    r = runner.invoke(main, ["info", "--input", str(out)])
    assert r.exit_code == 0, r.output
    pairs = _kv(r.output)
    assert pairs["kind"] == "hszx-nd"
    assert pairs["dims"] == "2,4"
    assert pairs["block"] == "2,2"
    assert pairs["n"] == "8"
    assert pairs["metadata"] == "2"


def test_usage_errors_exit_two(runner, tmp_path):
    r = runner.invoke(main, ["compress", "--input", "/nonexistent", "--dims", "4",
                             "--compressor", "hszp", "--error", "abs:0.1",
                             "--output", str(tmp_path / "x")])
    assert r.exit_code == 2
    raw = tmp_path / "r.f32"
    _write_field(raw, np.zeros(4, dtype=np.float32))
    r = runner.invoke(main, ["compress", "--input", str(raw), "--dims", "4",
                             "--compressor", "hszp", "--error", "oops",
                             "--output", str(tmp_path / "x")])
    assert r.exit_code == 2
    r = runner.invoke(main, ["analyze", "--op", "curl", "--u", str(raw)])
    assert r.exit_code == 2


def test_processing_errors_exit_one(runner, tmp_path):
    bad = tmp_path / "bad.hsz"
    bad.write_bytes(b"not a container")
    r = runner.invoke(main, ["info", "--input", str(bad)])
    assert r.exit_code == 1
    assert "error:" in _all_output(r)
