"""End-to-end enhancement: backbone -> LUT generators -> cascade."""

from __future__ import annotations

from dataclasses import dataclass

from .backbone import forward
from .core import ContextVector, ImageBuffer, Lut1D, Lut3D, WeightBundle
from .generators import generate_lut1d, generate_lut3d
from .interp import apply_cascade, apply_lut1d
from .quant import apply_cascade_fixed, quantize_lut1d, quantize_lut3d


@dataclass
class EnhanceResult:
    output: ImageBuffer  # float in float mode, uint8 in fixed-point mode
    lut1d: Lut1D
    lut3d: Lut3D
    context: ContextVector
    intermediate: ImageBuffer | None = None


def enhance(
    image: ImageBuffer,
    bundle: WeightBundle,
    *,
    interpolator: str = "trilinear",
    fixed_point: bool = False,
    threads: int = 1,
    want_intermediate: bool = False,
) -> EnhanceResult:
    """Run the full pipeline on one image.

    The backbone always consumes the float-normalized image; fixed_point
    affects only LUT application, which then runs on quantized LUTs and the
    8-bit image.
    """
    bundle.validate()
    float_img = image.to_float()
    context = forward(float_img, bundle)
    lut1d = generate_lut1d(context, bundle)
    lut3d = generate_lut3d(context, bundle)

    intermediate = apply_lut1d(lut1d, float_img) if want_intermediate else None

    if fixed_point:
        if interpolator != "trilinear":
            raise ValueError("the fixed-point path implements trilinear interpolation only")
        output = apply_cascade_fixed(
            quantize_lut1d(lut1d), quantize_lut3d(lut3d), image.to_uint8(), threads=threads
        )
    else:
        output = apply_cascade(
            lut1d, lut3d, float_img, interpolator=interpolator, threads=threads
        )
    return EnhanceResult(
        output=output,
        lut1d=lut1d,
        lut3d=lut3d,
        context=context,
        intermediate=intermediate,
    )
