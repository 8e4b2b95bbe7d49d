"""Command-line interface.

Exit codes: 0 success, 2 I/O error (unreadable/corrupt files), 3 model error
(shape or contract violations).
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import analysis, bench, lutio
from .bundle import load_weight_bundle, save_weight_bundle
from .errors import (
    BundleFormatError,
    BundleVersionError,
    ImageIOError,
    LutFileError,
    SepLutError,
    TruncatedDataError,
)
from .generators import is_monotone_lut1d
from .imgio import load_png, save_png
from .interp import apply_lut1d, apply_lut3d_tetrahedral, apply_lut3d_trilinear
from .pipeline import enhance
from .quant import equivalent_parameter_count, quantize_bundle

EXIT_IO = 2
EXIT_MODEL = 3

_IO_ERRORS = (
    OSError,
    ImageIOError,
    LutFileError,
    BundleFormatError,
    BundleVersionError,
    TruncatedDataError,
)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _IO_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)
        except (SepLutError, ValueError, TypeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MODEL)

    return wrapper


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@click.group()
def main():
    """Image-adaptive 1D+3D LUT color transform engine."""


@main.command("enhance")
@click.argument("input_png", type=click.Path())
@click.option("--weights", "-w", required=True, type=click.Path(), help=".sepw bundle.")
@click.option("--output", "-o", required=True, type=click.Path(), help="Output PNG (8-bit).")
@click.option("--fixed-point", is_flag=True, help="Integer-only LUT application.")
@click.option(
    "--interpolator",
    type=click.Choice(["trilinear", "tetrahedral"]),
    default="trilinear",
    show_default=True,
)
@click.option("--dump-luts", is_flag=True, help="Write generated LUTs next to the output.")
@click.option("--dump-intermediate", is_flag=True, help="Write the 1D-stage image.")
@click.option("--threads", default=1, show_default=True, help="Kernel worker threads.")
@_handle_errors
def enhance_cmd(
    input_png, weights, output, fixed_point, interpolator, dump_luts, dump_intermediate, threads
):
    """Enhance INPUT_PNG with an adaptive 1D+3D LUT cascade."""
    if fixed_point and interpolator == "tetrahedral":
        raise click.UsageError("--fixed-point implements trilinear interpolation only")
    bundle = load_weight_bundle(weights)
    image = load_png(input_png)
    result = enhance(
        image,
        bundle,
        interpolator=interpolator,
        fixed_point=fixed_point,
        threads=threads,
        want_intermediate=dump_intermediate,
    )
    if not is_monotone_lut1d(result.lut1d):
        click.echo("warning: generated 1D LUT is not monotone", err=True)
    save_png(result.output, output)
    if dump_luts:
        out = Path(output)
        lutio.write_lut1d(result.lut1d, out.with_suffix(".lut1d.txt"))
        lutio.write_cube(result.lut3d, out.with_suffix(".cube"))
    if dump_intermediate:
        save_png(result.intermediate, Path(output).with_suffix(".intermediate.png"))


@main.command("apply-lut")
@click.argument("input_png", type=click.Path())
@click.option("--output", "-o", required=True, type=click.Path())
@click.option("--lut1d", "lut1d_path", type=click.Path(), help="1D LUT text file.")
@click.option("--lut3d", "lut3d_path", type=click.Path(), help=".cube 3D LUT file.")
@click.option(
    "--interpolator",
    type=click.Choice(["trilinear", "tetrahedral"]),
    default="trilinear",
    show_default=True,
)
@_handle_errors
def apply_lut_cmd(input_png, output, lut1d_path, lut3d_path, interpolator):
    """Apply LUT files in 1D-then-3D order; a missing stage is skipped."""
    if not lut1d_path and not lut3d_path:
        raise click.UsageError("provide --lut1d and/or --lut3d")
    image = load_png(input_png).to_float()
    if lut1d_path:
        image = apply_lut1d(lutio.read_lut1d(lut1d_path), image)
    if lut3d_path:
        lut3d = lutio.read_cube(lut3d_path)
        if interpolator == "tetrahedral":
            image = apply_lut3d_tetrahedral(lut3d, image)
        else:
            image = apply_lut3d_trilinear(lut3d, image)
    save_png(image, output)


@main.command("analyze")
@click.argument("input_png", type=click.Path())
@click.option("--reference", type=click.Path(), help="Histogram chi-square reference image.")
@click.option("--lut-size", "s_t", default=9, show_default=True, help="3D lattice size S_t.")
@click.option("--out", type=click.Path(), help="Write the JSON report here instead of stdout.")
@_handle_errors
def analyze_cmd(input_png, reference, s_t, out):
    """Report cell utilization and histogram statistics as JSON."""
    image = load_png(input_png)
    report = analysis.AnalysisReport(
        cell_utilization=analysis.cell_utilization(image.to_float(), s_t),
        hist_variance=analysis.image_histogram_variances(image),
    )
    if reference:
        ref = load_png(reference)
        report.chi_square = float(
            sum(
                analysis.chi_square_distance(
                    analysis.histogram(image.data[c]), analysis.histogram(ref.data[c])
                )
                for c in range(3)
            )
            / 3.0
        )
    _emit_json(report.to_dict(), out)


@main.command("metrics")
@click.argument("pred_png", type=click.Path())
@click.argument("gt_png", type=click.Path())
@click.option("--out", type=click.Path())
@_handle_errors
def metrics_cmd(pred_png, gt_png, out):
    """PSNR / SSIM / delta-E between two images, as JSON."""
    pred = load_png(pred_png)
    gt = load_png(gt_png)
    report = analysis.AnalysisReport(
        psnr=analysis.psnr(pred, gt),
        ssim=analysis.ssim(pred, gt),
        delta_e=analysis.delta_e_ab(pred, gt),
    )
    _emit_json(report.to_dict(), out)


@main.command("bench")
@click.option(
    "--resolution",
    type=click.Choice(sorted(bench.RESOLUTIONS)),
    default="480p",
    show_default=True,
)
@click.option("--iterations", default=100, show_default=True)
@click.option(
    "--mode",
    type=click.Choice(["float", "fixed", "both"]),
    default="float",
    show_default=True,
)
@click.option(
    "--stage",
    type=click.Choice(["full", "luts_only"]),
    default="full",
    show_default=True,
)
@click.option("--weights", type=click.Path(), help="Bundle to use (default: seeded random).")
@click.option("--seed", default=2024, show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--out", type=click.Path())
@_handle_errors
def bench_cmd(resolution, iterations, mode, stage, weights, seed, threads, out):
    """Time the pipeline on seeded synthetic images (compute only)."""
    bundle = load_weight_bundle(weights) if weights else None
    kwargs = dict(bundle=bundle, seed=seed, threads=threads)
    if mode == "both":
        report = bench.run_bench_pair(resolution, iterations, stage, **kwargs)
    else:
        report = bench.run_bench(resolution, iterations, mode, stage, **kwargs)
    _emit_json(report, out)


@main.command("quantize")
@click.argument("weights_in", type=click.Path())
@click.argument("weights_out", type=click.Path())
@_handle_errors
def quantize_cmd(weights_in, weights_out):
    """Quantize generator weights to 8-bit and report the footprint change."""
    bundle = load_weight_bundle(weights_in)
    original = bundle.parameter_count()
    quantized = quantize_bundle(bundle)
    save_weight_bundle(quantized, weights_out)
    equivalent = equivalent_parameter_count(quantized)
    click.echo(f"parameters: {original}")
    click.echo(f"equivalent parameters: {equivalent:.2f}")
    click.echo(f"reduction: {(1.0 - equivalent / original) * 100.0:.2f}%")


if __name__ == "__main__":
    main()
