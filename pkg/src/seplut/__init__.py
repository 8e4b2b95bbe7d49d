"""seplut: image-adaptive 1D+3D LUT color transform engine."""

from .core import (
    ContextVector,
    ImageBuffer,
    Lut1D,
    Lut3D,
    WeightBundle,
    identity_lut1d,
    identity_lut3d,
)
from .bundle import load_weight_bundle, save_weight_bundle
from .interp import (
    apply_cascade,
    apply_lut1d,
    apply_lut3d_tetrahedral,
    apply_lut3d_trilinear,
)
from .backbone import forward, resize_bilinear_256
from .generators import (
    extract_basis_luts,
    generate_lut1d,
    generate_lut3d,
    make_identity_bundle,
    make_random_bundle,
)
from .quant import (
    QuantizedTensor,
    apply_cascade_fixed,
    equivalent_parameter_count,
    quantize_bundle,
    quantize_lut1d,
    quantize_lut3d,
)
from .pipeline import EnhanceResult, enhance

__version__ = "0.1.0"

__all__ = [
    "ContextVector",
    "EnhanceResult",
    "ImageBuffer",
    "Lut1D",
    "Lut3D",
    "QuantizedTensor",
    "WeightBundle",
    "apply_cascade",
    "apply_cascade_fixed",
    "apply_lut1d",
    "apply_lut3d_tetrahedral",
    "apply_lut3d_trilinear",
    "enhance",
    "equivalent_parameter_count",
    "extract_basis_luts",
    "forward",
    "generate_lut1d",
    "generate_lut3d",
    "identity_lut1d",
    "identity_lut3d",
    "load_weight_bundle",
    "make_identity_bundle",
    "make_random_bundle",
    "quantize_bundle",
    "quantize_lut1d",
    "quantize_lut3d",
    "resize_bilinear_256",
    "save_weight_bundle",
]
