"""Command-line front end: compress, decompress, analyze, info.

Output is line-oriented ``key=value`` for scripting.  Exit codes: 0 success,
1 processing error, 2 usage error.
"""

from __future__ import annotations

import sys
from functools import wraps

import click
import numpy as np

from . import io as hsz_io
from .analytics import fields as afields
from .analytics import stats as astats
from .compressors import CompressorKind, compress
from .errors import HszError
from .quant import ErrorBound
from .stages import Stage, partial_decompress, supported_stages

SCALAR_OPS = ("mean", "std")
FIELD_OPS = ("derivative", "laplacian")
VECTOR_OPS = ("divergence", "curl")


def _parse_dims(ctx, param, value):
    if value is None:
        return None
    try:
        dims = tuple(int(part) for part in value.split(","))
        if not 1 <= len(dims) <= 3 or any(d < 1 for d in dims):
            raise ValueError
        return dims
    except ValueError:
        raise click.BadParameter(f"expected d1[,d2[,d3]] of positive ints, got {value!r}")


def _parse_error(ctx, param, value):
    try:
        return ErrorBound.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _parse_kind(ctx, param, value):
    try:
        return CompressorKind.from_name(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _handle_errors(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (HszError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Error-bounded lossy compression with homomorphic analytics."""


@main.command("compress")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--dims", required=True, callback=_parse_dims)
@click.option("--compressor", "kind", required=True, callback=_parse_kind)
@click.option("--error", "bound", required=True, callback=_parse_error)
@click.option("--block", callback=_parse_dims, default=None)
@click.option("--output", "output_path", required=True, type=click.Path())
@_handle_errors
def cmd_compress(input_path, dims, kind, bound, block, output_path):
    """Compress a raw float32 array into an HSZ container."""
    field = hsz_io.read_raw(input_path, dims)
    c = compress(field, kind, bound, block)
    hsz_io.write_compressed(c, output_path)
    click.echo(f"ratio={4.0 * c.shape.total / c.byte_size()}")
    click.echo(f"eps={c.eps}")


@main.command("decompress")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option(
    "--stage",
    required=True,
    type=click.Choice(["meta", "decorrelated", "quantized", "full"]),
)
@click.option("--output", "output_path", required=True, type=click.Path())
@_handle_errors
def cmd_decompress(input_path, stage, output_path):
    """Partially decompress a container to one of the four stages.

    meta and decorrelated/quantized write little-endian int32 (metadata in
    block order, values in canonical stream order); full writes row-major
    little-endian float32.
    """
    c = hsz_io.read_compressed(input_path)
    view = partial_decompress(c, Stage.from_name(stage))
    if stage == "meta":
        np.ascontiguousarray(view, dtype="<i4").tofile(output_path)
    elif stage == "decorrelated":
        np.ascontiguousarray(view.values, dtype="<i4").tofile(output_path)
    elif stage == "quantized":
        stream_order = view.values.ravel()[c.perm]
        np.ascontiguousarray(stream_order, dtype="<i4").tofile(output_path)
    else:
        hsz_io.write_raw(view, output_path)


def _fmt_scalar(value: float) -> str:
    """Shortest round-trip decimal form; integral values drop the '.0'."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _op_stages(op: str, kind: CompressorKind, ndims: int) -> set[Stage]:
    """Stages at which an operation is available for a compressor."""
    if op == "mean":
        return supported_stages(kind)
    if op == "std":
        return {Stage.DECORRELATED, Stage.QUANTIZED, Stage.FULL}
    if op in FIELD_OPS + VECTOR_OPS:
        if op != "derivative" and ndims < 2:
            return set()
        stages = {Stage.QUANTIZED, Stage.FULL}
        if kind.is_nd:
            stages.add(Stage.DECORRELATED)
        return stages
    raise click.UsageError(f"unknown operation {op!r}")


def _auto_stage(op: str, kind: CompressorKind) -> Stage:
    if op == "mean" and kind.is_block_mean:
        return Stage.META
    if op in FIELD_OPS + VECTOR_OPS and kind.is_nd:
        return Stage.DECORRELATED
    return Stage.QUANTIZED


def _applicability_matrix(ndims: int) -> str:
    lines = ["op/stage applicability:"]
    for op in SCALAR_OPS + FIELD_OPS + VECTOR_OPS:
        cells = []
        for kind in CompressorKind:
            stages = sorted(s.cli_name for s in _op_stages(op, kind, ndims))
            cells.append(f"{kind.cli_name}={','.join(stages) or '-'}")
        lines.append(f"  {op}: {'  '.join(cells)}")
    return "\n".join(lines)


@main.command("analyze")
@click.option("--op", required=True, type=click.Choice(SCALAR_OPS + FIELD_OPS + VECTOR_OPS))
@click.option(
    "--stage",
    default="auto",
    type=click.Choice(["auto", "meta", "decorrelated", "quantized", "full"]),
)
@click.option("--input", "input_path", type=click.Path(exists=True))
@click.option("--u", "u_path", type=click.Path(exists=True))
@click.option("--v", "v_path", type=click.Path(exists=True))
@click.option("--w", "w_path", type=click.Path(exists=True))
@click.option("--output", "output_prefix", default=None)
@_handle_errors
def cmd_analyze(op, stage, input_path, u_path, v_path, w_path, output_prefix):
    """Run a homomorphic analytical operation on compressed data."""
    if op in VECTOR_OPS:
        if input_path is not None:
            raise click.UsageError(f"--op {op} takes --u/--v[/--w], not --input")
        if u_path is None or v_path is None:
            raise click.UsageError(f"--op {op} requires --u and --v")
        paths = [u_path, v_path] + ([w_path] if w_path else [])
        sources = tuple(hsz_io.read_compressed(p) for p in paths)
        primary = sources[0]
    else:
        if input_path is None:
            raise click.UsageError(f"--op {op} requires --input")
        primary = hsz_io.read_compressed(input_path)
        sources = (primary,)
    ndims = primary.shape.ndims
    kind = primary.kind
    allowed = _op_stages(op, kind, ndims)
    resolved = _auto_stage(op, kind) if stage == "auto" else Stage.from_name(stage)
    if resolved not in allowed:
        click.echo(
            f"error: {op} at stage {resolved.cli_name} is unsupported for "
            f"{kind.cli_name} ({ndims}D)",
            err=True,
        )
        click.echo(_applicability_matrix(ndims), err=True)
        sys.exit(1)

    if op in SCALAR_OPS:
        result = astats.compute_stat(primary, op, resolved)
        click.echo(f"{op}={_fmt_scalar(result.value)}")
        return
    if output_prefix is None:
        raise click.UsageError(f"--op {op} requires --output <prefix>")
    if op in FIELD_OPS:
        derived = afields.compute_field_op(primary, op, resolved)
    elif op == "divergence":
        derived = afields.divergence(sources, resolved)
    else:
        derived = afields.curl(sources, resolved)
    for name, comp in zip(derived.component_names, derived.components):
        path = f"{output_prefix}.{name}.f32"
        hsz_io.write_raw(comp, path)
        click.echo(f"wrote={path}")


@main.command("info")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@_handle_errors
def cmd_info(input_path):
    """Print container header fields and sizes."""
    c = hsz_io.read_compressed(input_path)
    click.echo(f"kind={c.kind.cli_name}")
    click.echo(f"dims={','.join(str(d) for d in c.shape.dims)}")
    click.echo(f"block={','.join(str(b) for b in c.block_dims)}")
    click.echo(f"eps={c.eps}")
    click.echo(f"n={c.shape.total}")
    click.echo(f"chunks={len(c.chunk_offsets)}")
    click.echo(f"metadata={0 if c.metadata is None else len(c.metadata)}")
    click.echo(f"bytes={c.byte_size()}")
    click.echo(f"ratio={4.0 * c.shape.total / c.byte_size()}")


if __name__ == "__main__":
    main()
