"""Fixed-function forward pass of the context-analysis CNN.

Pipeline: bilinear resize to 256x256 (half-pixel centers), five 3x3
stride-2 conv blocks with LeakyReLU, instance normalization after the first
four blocks, 4x4/stride-4 average pooling, channel-major flatten to a
32m-dimensional context vector. Dropout is an inference no-op.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FLOAT_DTYPE, ContextVector, ImageBuffer, WeightBundle
from .errors import ShapeMismatchError

RESIZE_TARGET = 256
IN_EPS = 1e-5

#: Conv output widths as multiples of m, and the post-resize spatial trace.
BLOCK_WIDTH_FACTORS = (1, 2, 4, 8, 8)
SPATIAL_TRACE = (128, 64, 32, 16, 8)


@dataclass
class BackboneConfig:
    m: int
    leaky_slope: float = 0.2
    in_eps: float = IN_EPS

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.in_eps <= 0:
            raise ValueError(f"in_eps must be positive, got {self.in_eps}")


def resize_bilinear_256(image: ImageBuffer, target: int = RESIZE_TARGET) -> ImageBuffer:
    """Bilinear resample to target x target using half-pixel source centers."""
    if not image.is_float:
        image = image.to_float()
    h, w = image.height, image.width
    if h < 1 or w < 1:
        raise ValueError("cannot resize an empty image")
    if h == target and w == target:
        return image

    def axis_coords(src_len: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        src = (np.arange(target, dtype=np.float64) + 0.5) * (src_len / target) - 0.5
        src = np.clip(src, 0.0, src_len - 1)
        i0 = np.floor(src).astype(np.int64)
        i1 = np.minimum(i0 + 1, src_len - 1)
        return i0, i1, src - i0

    y0, y1, fy = axis_coords(h)
    x0, x1, fx = axis_coords(w)
    data = image.data.astype(np.float64)
    top = (1.0 - fx) * data[:, y0][:, :, x0] + fx * data[:, y0][:, :, x1]
    bot = (1.0 - fx) * data[:, y1][:, :, x0] + fx * data[:, y1][:, :, x1]
    out = (1.0 - fy)[None, :, None] * top + fy[None, :, None] * bot
    return ImageBuffer(np.clip(out, 0.0, 1.0).astype(FLOAT_DTYPE))


def conv3x3_stride2(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Cross-correlation, padding 1, stride 2: (Ci,H,W) -> (Co,ceil(H/2),ceil(W/2))."""
    ci, h, w = x.shape
    co = weight.shape[0]
    if weight.shape != (co, ci, 3, 3):
        raise ShapeMismatchError(
            f"conv weight shape {weight.shape} does not match input channels {ci}"
        )
    padded = np.pad(x, ((0, 0), (1, 1), (1, 1)))
    windows = np.lib.stride_tricks.sliding_window_view(padded, (3, 3), axis=(1, 2))
    windows = windows[:, ::2, ::2]  # stride 2
    ho, wo = windows.shape[1], windows.shape[2]
    cols = windows.transpose(1, 2, 0, 3, 4).reshape(ho * wo, ci * 9)
    out = cols @ weight.reshape(co, ci * 9).T + bias
    return np.ascontiguousarray(out.reshape(ho, wo, co).transpose(2, 0, 1))


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x >= 0, x, np.float32(slope) * x)


def instance_norm(
    x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float = IN_EPS
) -> np.ndarray:
    """Per-channel spatial standardization with affine rescaling.

    Population variance (divide by H*W); a zero-variance channel comes out as
    beta because the centered numerator is identically zero. Statistics are
    taken in float64 so constant channels center exactly.
    """
    x64 = x.astype(np.float64)
    mean = x64.mean(axis=(1, 2), keepdims=True)
    var = x64.var(axis=(1, 2), keepdims=True)
    y = (x64 - mean) / np.sqrt(var + eps)
    out = gamma[:, None, None] * y + beta[:, None, None]
    return out.astype(FLOAT_DTYPE)


def avg_pool_4x4(x: np.ndarray) -> np.ndarray:
    """Non-overlapping 4x4 window average: (C,8,8) -> (C,2,2)."""
    c, h, w = x.shape
    if h % 4 or w % 4:
        raise ShapeMismatchError(f"pooling expects dims divisible by 4, got {x.shape}")
    return x.reshape(c, h // 4, 4, w // 4, 4).mean(axis=(2, 4))


def forward(
    image: ImageBuffer, bundle: WeightBundle, config: BackboneConfig | None = None
) -> ContextVector:
    """Run the CNN on a float image and return the context vector of length 32m."""
    if config is None:
        config = BackboneConfig(m=bundle.m, leaky_slope=bundle.leaky_slope)
    m = config.m
    x = resize_bilinear_256(image.to_float()).data.astype(FLOAT_DTYPE)

    for i, factor in enumerate(BLOCK_WIDTH_FACTORS, start=1):
        w = bundle.tensor(f"backbone.conv{i}.weight").astype(FLOAT_DTYPE)
        b = bundle.tensor(f"backbone.conv{i}.bias").astype(FLOAT_DTYPE)
        x = leaky_relu(conv3x3_stride2(x, w, b), config.leaky_slope)
        if i <= 4:
            gamma = bundle.tensor(f"backbone.in{i}.gamma").astype(FLOAT_DTYPE)
            beta = bundle.tensor(f"backbone.in{i}.beta").astype(FLOAT_DTYPE)
            x = instance_norm(x, gamma, beta, config.in_eps)
        expect = (factor * m, SPATIAL_TRACE[i - 1], SPATIAL_TRACE[i - 1])
        if x.shape != expect:
            raise ShapeMismatchError(
                f"block {i}: expected activation shape {expect}, got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise ValueError(f"non-finite activation after block {i}; weights corrupted?")

    # dropout would sit here; identity at inference
    pooled = avg_pool_4x4(x)
    e = pooled.reshape(-1)  # channel-major (c, y, x)
    if e.shape[0] != 32 * m:
        raise ShapeMismatchError(f"context vector length {e.shape[0]} != 32*m = {32 * m}")
    return ContextVector(e)
