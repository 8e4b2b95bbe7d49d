"""sepw-converter: trained-checkpoint to .sepw bundle conversion."""

from .convert import ConversionError, ConvertConfig, convert, load_name_map
from .sepw import read_manifest, write_sepw
from .shapes import BUNDLE_TENSOR_NAMES, expected_shapes

__version__ = "0.1.0"

__all__ = [
    "BUNDLE_TENSOR_NAMES",
    "ConversionError",
    "ConvertConfig",
    "convert",
    "expected_shapes",
    "load_name_map",
    "read_manifest",
    "write_sepw",
]
