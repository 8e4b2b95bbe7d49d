"""Exception hierarchy for the seplut engine."""


class SepLutError(Exception):
    """Base class for all engine errors."""


class InvalidSizeError(SepLutError, ValueError):
    """A LUT size parameter is below the minimum of 2."""


class ShapeMismatchError(SepLutError, ValueError):
    """A tensor, buffer, or LUT does not match its contracted shape."""


class BundleFormatError(SepLutError, ValueError):
    """A .sepw container is malformed (bad magic, bad manifest, bad dtype)."""


class BundleVersionError(SepLutError, ValueError):
    """A .sepw container declares an unsupported version."""


class TruncatedDataError(SepLutError, ValueError):
    """A .sepw container is shorter than its manifest promises."""


class LutFileError(SepLutError, ValueError):
    """A .cube or 1D LUT text file cannot be parsed."""


class ImageIOError(SepLutError, ValueError):
    """An image file cannot be read or written as a 3-channel raster."""
