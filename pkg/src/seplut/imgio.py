"""PNG image I/O: 8-bit and 16-bit, three channels only.

OpenCV handles the codec work; channel order and layout are converted at the
boundary (files are interleaved BGR, buffers are planar RGB).
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .core import ImageBuffer
from .errors import ImageIOError


def load_png(path: str | Path) -> ImageBuffer:
    """Read a 3-channel PNG as uint8 or uint16 planar RGB."""
    path = Path(path)
    if not path.is_file():
        raise ImageIOError(f"{path}: no such file")
    arr = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise ImageIOError(f"{path}: not a readable image")
    if arr.ndim != 3 or arr.shape[2] != 3:
        shape = arr.shape if arr.ndim != 2 else (arr.shape[0], arr.shape[1], 1)
        raise ImageIOError(
            f"{path}: expected a 3-channel image, got {shape[2]} channel(s)"
        )
    if arr.dtype not in (np.uint8, np.uint16):
        raise ImageIOError(f"{path}: unsupported sample depth {arr.dtype}")
    rgb = arr[:, :, ::-1]
    return ImageBuffer.from_interleaved(rgb)


def save_png(image: ImageBuffer, path: str | Path) -> None:
    """Write a buffer as PNG; float buffers are rounded to 8-bit first."""
    if image.is_float:
        image = image.to_uint8()
    bgr = image.to_interleaved()[:, :, ::-1]
    if not cv2.imwrite(str(path), np.ascontiguousarray(bgr)):
        raise ImageIOError(f"{path}: PNG encode failed")
