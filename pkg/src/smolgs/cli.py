"""Command-line interface: encode / decode / stats / materialize / fixture.

Exit codes: 0 success, 1 input parse error, 2 I/O error, 3 configuration
error.  SMOLGS_THREADS caps the chunk-coding worker count (0 or unset =
auto, currently one worker per CPU up to the chunk count).
"""

from __future__ import annotations

import json
import os
import sys
import time
import zipfile

import click
import numpy as np

from . import container as cont
from .core import CodecConfig, SplatCloud
from .errors import (
    BadMagic,
    ConfigError,
    CorruptStream,
    CrcMismatch,
    EmptyCloud,
    InvalidValue,
    NoModel,
    SmolgsError,
    UnsupportedVersion,
)
from .fixtures import make_fixture
from .formats import (
    detect_format,
    read_ascii_xyz,
    read_gaussian_ply,
    read_splt,
    write_ascii_xyz,
    write_attribute_ply,
    write_splt,
)
from .neural import decode_attributes
from .stats import stats_report

EXIT_PARSE = 1
EXIT_IO = 2
EXIT_CONFIG = 3

_PARSE_ERRORS = (
    BadMagic, UnsupportedVersion, CorruptStream, CrcMismatch, InvalidValue,
    EmptyCloud,
)
_CONFIG_ERRORS = (ConfigError, NoModel)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def worker_count() -> int:
    """Worker cap from SMOLGS_THREADS (0 = auto)."""
    raw = os.environ.get("SMOLGS_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"SMOLGS_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigError("SMOLGS_THREADS must be >= 0")
    return value if value > 0 else (os.cpu_count() or 1)


def _load_cloud(path: str, n_f: int) -> SplatCloud:
    fmt = detect_format(path)
    if fmt == "ply":
        return read_gaussian_ply(path, n_f=n_f)
    if fmt == "splt":
        cloud = read_splt(path)
        if cloud.n_f != n_f:
            raise ConfigError(
                f"input file has n_f={cloud.n_f}, requested n_f={n_f}"
            )
        return cloud
    return read_ascii_xyz(path, n_f=n_f)


def _write_zip(path: str, data: bytes):
    """Mirror the container sections into a zip archive."""
    _, _, _, _, _, _, entries = cont._parse_header(data)
    sections = cont._read_sections(data, entries)
    header_end = min(offset for _, offset, _, _ in entries) if entries else len(data)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("HEADER.bin", data[:header_end])
        for sec_id in sorted(sections):
            name = cont.SECTION_NAMES.get(sec_id, f"SECTION_{sec_id}")
            zf.writestr(f"{name}.bin", sections[sec_id])


@click.group()
def main():
    """Compression codec for 3D Gaussian-splat scenes."""


@main.command("encode")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--recursion", "-r", default=16, show_default=True, type=int)
@click.option("--nf", default=8, show_default=True, type=int)
@click.option("--context", default="static", show_default=True,
              type=click.Choice(["static", "neural"]))
@click.option("--weights", "weights_path", default=None, type=click.Path(),
              help="Container whose MODEL section supplies decoder weights, "
                   "or an integer seed prefixed 'seed:' for random weights.")
@click.option("--chunk", default=65536, show_default=True, type=int)
@click.option("--zip", "zip_out", is_flag=True,
              help="Also write OUTPUT.zip holding the same sections.")
def cmd_encode(input_path, output_path, recursion, nf, context, weights_path,
               chunk, zip_out):
    """Compress a splat file into a container."""
    try:
        config = CodecConfig(recursion_depth=recursion, n_f=nf, chunk_size=chunk)
        weights = None
        if context == "neural":
            if weights_path is None:
                raise ConfigError("--context neural requires --weights")
            if weights_path.startswith("seed:"):
                from .neural import random_weights

                weights = random_weights(int(weights_path[5:]), n_f=nf)
            else:
                with open(weights_path, "rb") as fh:
                    prev = cont.decode_container(fh.read())
                if prev.weights is None:
                    raise NoModel(f"{weights_path} has no neural MODEL section")
                weights = prev.weights
        workers = worker_count()
    except _CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))

    try:
        cloud = _load_cloud(input_path, nf)
    except _PARSE_ERRORS as exc:
        _fail(EXIT_PARSE, str(exc))
    except _CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))

    try:
        t0 = time.perf_counter()
        data = cont.encode_container(
            cloud, config, context=context, weights=weights, workers=workers
        )
        elapsed = time.perf_counter() - t0
        with open(output_path, "wb") as fh:
            fh.write(data)
        if zip_out:
            _write_zip(output_path + ".zip", data)
    except SmolgsError as exc:
        _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))

    sizes = cont.size_breakdown(data)
    # leaf count travels in META; avoid re-decoding just for the summary
    meta_leaves = None
    try:
        decoded_entries = cont._parse_header(data)[6]
        sections = cont._read_sections(data, decoded_entries)
        meta = cont._unpack_meta(sections[cont.SEC_META])
        meta_leaves = meta.get("leaf_count")
    except SmolgsError:
        pass
    bps = 8.0 * sizes["total"] / max(len(cloud), 1)
    click.echo(
        f"encoded {len(cloud)} splats -> {meta_leaves or '?'} leaves, "
        f"{sizes['total']} bytes ({bps:.2f} bits/splat: "
        f"x={sizes['x']} f={sizes['f']} s={sizes['s']} mlps={sizes['mlps']} "
        f"other={sizes['other']}), {elapsed:.3f}s"
    )


@main.command("decode")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--format", "out_format", default="native", show_default=True,
              type=click.Choice(["native", "ascii"]))
def cmd_decode(input_path, output_path, out_format):
    """Decompress a container back to a (quantized) splat file."""
    try:
        with open(input_path, "rb") as fh:
            data = fh.read()
        decoded = cont.decode_container(data, workers=worker_count())
    except _PARSE_ERRORS as exc:
        _fail(EXIT_PARSE, str(exc))
    except _CONFIG_ERRORS as exc:
        _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    try:
        if out_format == "native":
            write_splt(output_path, decoded.cloud)
        else:
            write_ascii_xyz(output_path, decoded.cloud)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"decoded {len(decoded.cloud)} splats ({decoded.context_kind} context)")


@main.command("stats")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def cmd_stats(input_path, as_json):
    """Report size breakdown, octree sparsity, and rate estimates."""
    try:
        with open(input_path, "rb") as fh:
            data = fh.read()
        report = stats_report(data)
    except _PARSE_ERRORS as exc:
        _fail(EXIT_PARSE, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    if as_json:
        click.echo(json.dumps(report, indent=2, sort_keys=True))
        return
    sizes = report["sizes"]
    click.echo(f"splats: {report['splat_count']}  R={report['recursion_depth']}  "
               f"n_f={report['n_f']}  context={report['context']}")
    click.echo("section sizes (bytes):")
    for key in ("total", "x", "f", "s", "mlps", "other"):
        click.echo(f"  {key:6s} {sizes[key]}")
    click.echo(f"bits/splat: {report['bits_per_splat']:.2f} "
               f"(coordinates: {report['coordinate_bits_per_splat']:.2f})")
    click.echo("occupancy popcount histogram per level (counts for popcount 1..8):")
    for level, hist in enumerate(report["popcount_histogram_per_level"]):
        click.echo(f"  level {level:2d}: {hist[1:]}")
    click.echo("top byte values:")
    for item in report["byte_value_top20"]:
        click.echo(f"  0x{item['value']:02X}: {item['count']}")
    click.echo(f"NLL estimate (coding bins): {report['nll_bits_total']:.1f} bits")
    click.echo(f"NLL estimate (wide bins):   {report['wide_nll_bits_total']:.1f} bits")
    click.echo(f"actual coded feature+scaling bits: {report['actual_feature_scaling_bits']}")


@main.command("materialize")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--camera", required=True, help="Camera center as X,Y,Z")
@click.option("--output", "output_path", required=True, type=click.Path())
def cmd_materialize(input_path, camera, output_path):
    """Decode per-splat render attributes at a camera and export a PLY."""
    try:
        cam = np.array([float(v) for v in camera.split(",")])
        if cam.shape != (3,):
            raise ValueError("camera must be three comma-separated numbers")
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    try:
        with open(input_path, "rb") as fh:
            data = fh.read()
        decoded = cont.decode_container(data)
    except _PARSE_ERRORS as exc:
        _fail(EXIT_PARSE, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    if decoded.weights is None:
        _fail(EXIT_CONFIG, "no neural model in this container")
    cloud = decoded.cloud
    colors = np.empty((len(cloud), 3))
    opacities = np.empty(len(cloud))
    scalings = np.empty((len(cloud), 3))
    rotations = np.empty((len(cloud), 4))
    for i in range(len(cloud)):
        attrs = decode_attributes(
            cloud.features[i], cloud.scales[i], cloud.xyz[i], cam, decoded.weights
        )
        colors[i] = attrs.color
        opacities[i] = max(0.0, attrs.opacity)
        scalings[i] = attrs.scaling
        rotations[i] = attrs.rotation
    try:
        write_attribute_ply(output_path, cloud.xyz, colors, opacities,
                            scalings, rotations)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"materialized {len(cloud)} splats at camera {camera}")


@main.command("fixture")
@click.option("--kind", required=True, type=str,
              help="sphere | cube | gaussian-mixture")
@click.option("--count", required=True, type=int)
@click.option("--nf", default=8, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--output", "output_path", required=True, type=click.Path())
def cmd_fixture(kind, count, nf, seed, output_path):
    """Write a deterministic synthetic cloud in the native format."""
    try:
        cloud = make_fixture(kind, count, n_f=nf, seed=seed)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    try:
        write_splt(output_path, cloud)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"wrote {count} {kind} splats to {output_path}")


if __name__ == "__main__":
    main()
