import numpy as np
import pytest

from seplut.core import ImageBuffer


def random_float_image(height: int, width: int, seed: int) -> ImageBuffer:
    rng = np.random.default_rng(seed)
    return ImageBuffer(rng.random((3, height, width), dtype=np.float32))


def random_uint8_image(height: int, width: int, seed: int) -> ImageBuffer:
    rng = np.random.default_rng(seed)
    return ImageBuffer(rng.integers(0, 256, size=(3, height, width), dtype=np.uint8))


def edge_heavy_pixels(n: int, seed: int, size: int) -> np.ndarray:
    """(3, n) float32 samples mixing uniforms, exact lattice points, and edges."""
    rng = np.random.default_rng(seed)
    cols = [rng.random((3, n // 2))]
    lattice = rng.integers(0, size, size=(3, n // 4)) / (size - 1)
    cols.append(lattice)
    edges = rng.choice([0.0, 1.0, 0.5, 1.0 / 255.0, 254.0 / 255.0], size=(3, n - n // 2 - n // 4))
    cols.append(edges)
    return np.concatenate(cols, axis=1).astype(np.float32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
