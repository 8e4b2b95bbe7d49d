"""Wall-time benchmark harness for the enhancement pipeline.

Measures compute only: image decode/encode is excluded, inputs are seeded
random rasters synthesized in memory.
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from .backbone import forward
from .core import ImageBuffer, WeightBundle
from .generators import generate_lut1d, generate_lut3d, make_random_bundle
from .interp import apply_cascade
from .pipeline import enhance
from .quant import apply_cascade_fixed, quantize_lut1d, quantize_lut3d

RESOLUTIONS = {
    "480p": (640, 480),
    "720p": (1280, 720),
    "4k": (3840, 2160),
    "8k": (7680, 4320),
}

DEFAULT_WARMUP = 3


def synth_image(width: int, height: int, seed: int) -> ImageBuffer:
    """Seeded uniform-random uint8 raster for cross-run comparability."""
    rng = np.random.default_rng(seed)
    return ImageBuffer(rng.integers(0, 256, size=(3, height, width), dtype=np.uint8))


def _time(fn, iterations: int, warmup: int) -> list[float]:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(iterations):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1000.0)
    return samples


def _summary(samples: list[float]) -> dict:
    ordered = sorted(samples)
    p95 = ordered[min(len(ordered) - 1, int(np.ceil(0.95 * len(ordered))) - 1)]
    return {
        "samples_ms": samples,
        "mean_ms": statistics.fmean(samples),
        "median_ms": statistics.median(samples),
        "p95_ms": p95,
        "min_ms": ordered[0],
        "max_ms": ordered[-1],
    }


def run_bench(
    resolution: str,
    iterations: int,
    mode: str = "float",
    stage: str = "full",
    *,
    bundle: WeightBundle | None = None,
    seed: int = 2024,
    interpolator: str = "trilinear",
    threads: int = 1,
    warmup: int = DEFAULT_WARMUP,
) -> dict:
    """Time one pipeline configuration and return a JSON-ready report."""
    if resolution not in RESOLUTIONS:
        raise ValueError(f"unknown resolution {resolution!r}; use one of {list(RESOLUTIONS)}")
    if mode not in ("float", "fixed"):
        raise ValueError(f"unknown mode {mode!r}")
    if stage not in ("full", "luts_only"):
        raise ValueError(f"unknown stage {stage!r}")
    width, height = RESOLUTIONS[resolution]
    if bundle is None:
        bundle = make_random_bundle(m=6, s_o=9, s_t=9, k=3, seed=seed)
    image = synth_image(width, height, seed)

    if stage == "full":
        if mode == "float":
            def fn():
                enhance(
                    image, bundle, interpolator=interpolator, threads=threads
                ).output.to_uint8()
        else:
            def fn():
                enhance(image, bundle, fixed_point=True, threads=threads)
    else:
        context = forward(image.to_float(), bundle)
        lut1d = generate_lut1d(context, bundle)
        lut3d = generate_lut3d(context, bundle)
        if mode == "float":
            def fn():
                apply_cascade(
                    lut1d, lut3d, image.to_float(), interpolator=interpolator, threads=threads
                ).to_uint8()
        else:
            q1, q3 = quantize_lut1d(lut1d), quantize_lut3d(lut3d)
            u8 = image.to_uint8()

            def fn():
                apply_cascade_fixed(q1, q3, u8, threads=threads)

    samples = _time(fn, iterations, warmup)
    report = {
        "resolution": resolution,
        "width": width,
        "height": height,
        "iterations": iterations,
        "warmup": warmup,
        "mode": mode,
        "stage": stage,
        "interpolator": interpolator if mode == "float" else "trilinear",
        "threads": threads,
        "seed": seed,
        "note": "compute only; image decode/encode excluded",
    }
    report.update(_summary(samples))
    return report


def run_bench_pair(resolution: str, iterations: int, stage: str = "full", **kwargs) -> dict:
    """Benchmark float and fixed modes back to back and report the ratio."""
    float_report = run_bench(resolution, iterations, "float", stage, **kwargs)
    fixed_report = run_bench(resolution, iterations, "fixed", stage, **kwargs)
    return {
        "float": float_report,
        "fixed": fixed_report,
        "speedup_fixed_over_float": float_report["median_ms"] / fixed_report["median_ms"],
    }
