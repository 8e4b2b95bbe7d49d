"""Measurement toolkit: cell utilization, histogram statistics, histogram
equalization, and the PSNR / SSIM / delta-E quality metrics.

Histograms use 256 bins over 8-bit-discretized values (floats are rounded to
8-bit first) and are normalized to sum to 1 so statistics are resolution
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.ndimage import correlate1d

from .core import DEPTH_MAX, FLOAT_DTYPE, ImageBuffer, Lut1D, round_half_away
from .errors import InvalidSizeError, ShapeMismatchError

HIST_BINS = 256

# SSIM: 11x11 Gaussian window, sigma 1.5, K1/K2 literature defaults
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# sRGB -> XYZ (D65); the reference white is the image of (1, 1, 1)
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_WHITE = _SRGB_TO_XYZ.sum(axis=1)


def cell_utilization(image: ImageBuffer, s_t: int) -> float:
    """Fraction of the (S_t-1)^3 interpolation cells hit by at least one pixel."""
    if s_t < 2:
        raise InvalidSizeError(f"S_t must be >= 2, got {s_t}")
    if not image.is_float:
        raise TypeError(f"cell utilization expects a float image, got {image.dtype}")
    n = s_t - 1
    rgb = image.data.reshape(3, -1).astype(np.float64)
    idx = np.minimum((np.clip(rgb, 0.0, 1.0) * n).astype(np.int64), n - 1)
    flat = (idx[0] * n + idx[1]) * n + idx[2]
    return float(np.unique(flat).size) / float(n**3)


def channel_levels(values: np.ndarray, bins: int = HIST_BINS) -> np.ndarray:
    """Discretize one channel to integer levels in [0, bins-1]."""
    values = np.asarray(values)
    if values.dtype == np.uint8:
        levels = values.astype(np.int64) if bins == 256 else round_half_away(
            values.astype(np.float64) * (bins - 1) / 255.0
        ).astype(np.int64)
    elif values.dtype == np.uint16:
        levels = round_half_away(
            values.astype(np.float64) * (bins - 1) / 65535.0
        ).astype(np.int64)
    else:
        levels = round_half_away(
            np.clip(values.astype(np.float64), 0.0, 1.0) * (bins - 1)
        ).astype(np.int64)
    return levels


def histogram(values: np.ndarray, bins: int = HIST_BINS) -> np.ndarray:
    """Normalized histogram of one channel; bin masses sum to 1."""
    levels = channel_levels(values, bins).reshape(-1)
    counts = np.bincount(levels, minlength=bins).astype(np.float64)
    return counts / counts.sum()


def histogram_variance(hist: np.ndarray) -> float:
    """Population variance of the bin masses; 0 for a perfectly flat histogram."""
    return float(np.var(np.asarray(hist, dtype=np.float64)))


def image_histogram_variances(image: ImageBuffer) -> list[float]:
    return [histogram_variance(histogram(image.data[c])) for c in range(3)]


def chi_square_distance(hist_a: np.ndarray, hist_b: np.ndarray) -> float:
    """Sum of (x-y)^2/(x+y) over bins with combined mass > 0."""
    a = np.asarray(hist_a, dtype=np.float64)
    b = np.asarray(hist_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"histogram shapes differ: {a.shape} vs {b.shape}")
    s = a + b
    mask = s > 0
    d = a - b
    return float(np.sum(d[mask] ** 2 / s[mask]))


def histogram_equalize(image: ImageBuffer) -> ImageBuffer:
    """Classic per-channel equalization of an 8-bit image.

    v -> round((cdf(v) - cdf_min) / (N - cdf_min) * 255) with cdf_min the
    smallest non-zero CDF value; a constant channel maps to all zeros.
    """
    if image.dtype != np.uint8:
        raise TypeError(f"histogram equalization expects uint8, got {image.dtype}")
    out = np.empty_like(image.data)
    n = image.height * image.width
    for c in range(3):
        counts = np.bincount(image.data[c].reshape(-1), minlength=256)
        cdf = np.cumsum(counts)
        cdf_min = int(cdf[counts > 0][0])
        denom = n - cdf_min
        if denom == 0:
            mapping = np.zeros(256, dtype=np.uint8)
        else:
            mapping = round_half_away(
                (cdf - cdf_min).astype(np.float64) / denom * 255.0
            )
            mapping = np.clip(mapping, 0, 255).astype(np.uint8)
        out[c] = mapping[image.data[c]]
    return ImageBuffer(out)


def equalization_lut1d(image: ImageBuffer, s_o: int) -> Lut1D:
    """Contrast-flattening 1D LUT sampled from the image's own per-channel CDF.

    Applying it through linear interpolation approximates equalization on
    continuous-valued images.
    """
    if s_o < 2:
        raise InvalidSizeError(f"S_o must be >= 2, got {s_o}")
    float_img = image.to_float()
    values = np.empty((3, s_o), dtype=np.float64)
    grid = np.arange(s_o, dtype=np.float64) / (s_o - 1)
    for c in range(3):
        hist = histogram(float_img.data[c])
        cdf = np.cumsum(hist)
        nz = np.nonzero(hist)[0]
        cdf_min = float(cdf[nz[0]]) if nz.size else 0.0
        denom = 1.0 - cdf_min
        curve = (cdf - cdf_min) / denom if denom > 0 else np.zeros(256)
        # sample the CDF curve at the LUT's lattice positions
        values[c] = np.interp(grid * 255.0, np.arange(256), np.clip(curve, 0.0, 1.0))
    return Lut1D(values.astype(FLOAT_DTYPE))


def _as_float_pair(a: ImageBuffer, b: ImageBuffer) -> tuple[np.ndarray, np.ndarray, float]:
    if a.data.shape != b.data.shape:
        raise ShapeMismatchError(f"image shapes differ: {a.data.shape} vs {b.data.shape}")
    if a.dtype != b.dtype:
        raise TypeError(f"image depths differ: {a.dtype} vs {b.dtype}")
    peak = 1.0 if a.is_float else DEPTH_MAX[a.dtype]
    return a.data.astype(np.float64), b.data.astype(np.float64), peak


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """10*log10(MAX^2/MSE) over all channels; +inf for identical images."""
    x, y, peak = _as_float_pair(a, b)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _gaussian_kernel_1d(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size, dtype=np.float64) - half
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def _window_mean(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    y = correlate1d(x, kernel, axis=0, mode="constant")
    y = correlate1d(y, kernel, axis=1, mode="constant")
    half = kernel.size // 2
    return y[half:-half, half:-half]


def ssim(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean structural similarity, 11x11 Gaussian window, averaged over channels."""
    x, y, peak = _as_float_pair(a, b)
    if a.height < SSIM_WINDOW or a.width < SSIM_WINDOW:
        raise ValueError(f"images must be at least {SSIM_WINDOW}px on each side for SSIM")
    kernel = _gaussian_kernel_1d(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2
    scores = []
    for c in range(3):
        mx = _window_mean(x[c], kernel)
        my = _window_mean(y[c], kernel)
        mxx = _window_mean(x[c] * x[c], kernel)
        myy = _window_mean(y[c] * y[c], kernel)
        mxy = _window_mean(x[c] * y[c], kernel)
        vx = mxx - mx * mx
        vy = myy - my * my
        cov = mxy - mx * my
        num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
        den = (mx * mx + my * my + c1) * (vx + vy + c2)
        scores.append(float(np.mean(num / den)))
    return float(np.mean(scores))


def _srgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """(3, N) normalized sRGB -> (3, N) CIELAB, D65 white."""
    linear = np.where(
        rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4
    )
    xyz = _SRGB_TO_XYZ @ linear
    t = xyz / _WHITE[:, None]
    delta = 6.0 / 29.0
    f = np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta**2) + 4.0 / 29.0)
    lab = np.empty_like(xyz)
    lab[0] = 116.0 * f[1] - 16.0
    lab[1] = 500.0 * (f[0] - f[1])
    lab[2] = 200.0 * (f[1] - f[2])
    return lab


def delta_e_ab(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean per-pixel Euclidean distance in CIELAB (CIE 1976)."""
    x, y, peak = _as_float_pair(a, b)
    lab_a = _srgb_to_lab(x.reshape(3, -1) / peak)
    lab_b = _srgb_to_lab(y.reshape(3, -1) / peak)
    return float(np.mean(np.sqrt(np.sum((lab_a - lab_b) ** 2, axis=0))))


@dataclass
class AnalysisReport:
    """JSON-serializable bag of the analysis statistics."""

    cell_utilization: float | None = None
    hist_variance: list[float] | None = None
    chi_square: float | None = None
    psnr: float | None = None
    ssim: float | None = None
    delta_e: float | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}
