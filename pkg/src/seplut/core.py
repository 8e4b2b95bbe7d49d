"""Domain types: image buffers, lookup tables, context vectors, weight bundles.

All types are treated as immutable after construction; sharing across threads
for reading is safe, mutation requires exclusive access.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSizeError, ShapeMismatchError

FLOAT_DTYPE = np.float32

#: Peak value per integer depth, used for normalization and metrics.
DEPTH_MAX = {np.dtype(np.uint8): 255.0, np.dtype(np.uint16): 65535.0}


def round_half_away(x: np.ndarray | float) -> np.ndarray | float:
    """Round to nearest with halves away from zero (the engine-wide rule)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


class ImageBuffer:
    """Planar 3-channel raster, shape (3, height, width).

    Depth is one of float32 normalized to [0, 1], uint8, or uint16. The data
    array is channel-major: ``data[c, y, x]``.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        data = np.asarray(data)
        if data.ndim != 3 or data.shape[0] != 3:
            raise ShapeMismatchError(
                f"image data must have shape (3, H, W), got {data.shape}"
            )
        if data.dtype == np.float64:
            data = data.astype(FLOAT_DTYPE)
        if data.dtype == FLOAT_DTYPE:
            lo, hi = float(data.min(initial=0.0)), float(data.max(initial=0.0))
            if lo < 0.0 or hi > 1.0:
                raise ValueError(
                    f"float image values must lie in [0, 1], got [{lo}, {hi}]"
                )
        elif data.dtype not in (np.uint8, np.uint16):
            raise TypeError(f"unsupported image dtype {data.dtype}")
        self.data = data

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_float(self) -> bool:
        return self.data.dtype == FLOAT_DTYPE

    @classmethod
    def from_interleaved(cls, hwc: np.ndarray) -> "ImageBuffer":
        """Build from an interleaved (H, W, 3) array; layout converted here."""
        hwc = np.asarray(hwc)
        if hwc.ndim != 3 or hwc.shape[2] != 3:
            raise ShapeMismatchError(
                f"interleaved data must have shape (H, W, 3), got {hwc.shape}"
            )
        return cls(np.ascontiguousarray(hwc.transpose(2, 0, 1)))

    def to_interleaved(self) -> np.ndarray:
        return np.ascontiguousarray(self.data.transpose(1, 2, 0))

    def to_float(self) -> "ImageBuffer":
        """Normalized float copy; integer depths divide by their peak value."""
        if self.is_float:
            return self
        peak = DEPTH_MAX[self.data.dtype]
        return ImageBuffer((self.data / peak).astype(FLOAT_DTYPE))

    def to_uint8(self) -> "ImageBuffer":
        return self._to_int(np.uint8)

    def to_uint16(self) -> "ImageBuffer":
        return self._to_int(np.uint16)

    def _to_int(self, dtype) -> "ImageBuffer":
        if self.data.dtype == dtype:
            return self
        peak = DEPTH_MAX[np.dtype(dtype)]
        f = self.to_float().data.astype(np.float64)
        # round half away from zero; values are non-negative after clamping
        q = np.floor(np.clip(f, 0.0, 1.0) * peak + 0.5)
        return ImageBuffer(q.astype(dtype))

    def crop(self, y0: int, y1: int, x0: int, x1: int) -> "ImageBuffer":
        return ImageBuffer(np.ascontiguousarray(self.data[:, y0:y1, x0:x1]))


@dataclass
class Lut1D:
    """Per-channel 1D lookup table, values shape (3, size)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2 or self.values.shape[0] != 3:
            raise ShapeMismatchError(
                f"1D LUT values must have shape (3, S), got {self.values.shape}"
            )
        if self.values.shape[1] < 2:
            raise InvalidSizeError(f"1D LUT size must be >= 2, got {self.values.shape[1]}")
        if self.values.dtype == np.float64:
            self.values = self.values.astype(FLOAT_DTYPE)
        if self.values.dtype == FLOAT_DTYPE:
            lo, hi = float(self.values.min()), float(self.values.max())
            if lo < 0.0 or hi > 1.0:
                raise ValueError(f"float 1D LUT entries must lie in [0, 1], got [{lo}, {hi}]")
        elif self.values.dtype != np.uint8:
            raise TypeError(f"unsupported 1D LUT dtype {self.values.dtype}")

    @property
    def size(self) -> int:
        return self.values.shape[1]

    @property
    def is_quantized(self) -> bool:
        return self.values.dtype == np.uint8


@dataclass
class Lut3D:
    """3D lookup table, values shape (3, S, S, S) indexed [c][i_r][i_g][i_b].

    Float entries are not range-restricted (the generator has no output
    activation); clamping happens at application or quantization time.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        s = self.values.shape
        if self.values.ndim != 4 or s[0] != 3 or not (s[1] == s[2] == s[3]):
            raise ShapeMismatchError(
                f"3D LUT values must have shape (3, S, S, S), got {s}"
            )
        if s[1] < 2:
            raise InvalidSizeError(f"3D LUT size must be >= 2, got {s[1]}")
        if self.values.dtype == np.float64:
            self.values = self.values.astype(FLOAT_DTYPE)
        elif self.values.dtype not in (FLOAT_DTYPE, np.uint8):
            raise TypeError(f"unsupported 3D LUT dtype {self.values.dtype}")

    @property
    def size(self) -> int:
        return self.values.shape[1]

    @property
    def is_quantized(self) -> bool:
        return self.values.dtype == np.uint8


@dataclass
class ContextVector:
    """Global image embedding of length 32*m produced by the backbone."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=FLOAT_DTYPE).reshape(-1)

    def __len__(self) -> int:
        return self.values.shape[0]


def identity_lut1d(s_o: int) -> Lut1D:
    """Identity ramp: values[c][i] == i/(s_o-1)."""
    if s_o < 2:
        raise InvalidSizeError(f"1D LUT size must be >= 2, got {s_o}")
    ramp = (np.arange(s_o, dtype=np.float64) / (s_o - 1)).astype(FLOAT_DTYPE)
    return Lut1D(np.tile(ramp, (3, 1)))


def identity_lut3d(s_t: int) -> Lut3D:
    """Per-axis identity ramps: channel c ramps along its own axis."""
    if s_t < 2:
        raise InvalidSizeError(f"3D LUT size must be >= 2, got {s_t}")
    ramp = (np.arange(s_t, dtype=np.float64) / (s_t - 1)).astype(FLOAT_DTYPE)
    values = np.empty((3, s_t, s_t, s_t), dtype=FLOAT_DTYPE)
    values[0] = ramp[:, None, None]
    values[1] = ramp[None, :, None]
    values[2] = ramp[None, None, :]
    return Lut3D(values)


#: Bundle tensor names, in canonical serialization order.
TENSOR_NAMES = (
    "backbone.conv1.weight", "backbone.conv1.bias",
    "backbone.conv2.weight", "backbone.conv2.bias",
    "backbone.conv3.weight", "backbone.conv3.bias",
    "backbone.conv4.weight", "backbone.conv4.bias",
    "backbone.conv5.weight", "backbone.conv5.bias",
    "backbone.in1.gamma", "backbone.in1.beta",
    "backbone.in2.gamma", "backbone.in2.beta",
    "backbone.in3.gamma", "backbone.in3.beta",
    "backbone.in4.gamma", "backbone.in4.beta",
    "gen1d.fc.weight", "gen1d.fc.bias",
    "gen3d.fc1.weight", "gen3d.fc1.bias",
    "gen3d.fc2.weight", "gen3d.fc2.bias",
)


def expected_tensor_shapes(m: int, s_o: int, s_t: int, k: int) -> dict[str, tuple[int, ...]]:
    """Tensor shapes fully determined by the (m, S_o, S_t, K) hyper-parameters."""
    widths = [m, 2 * m, 4 * m, 8 * m, 8 * m]
    shapes: dict[str, tuple[int, ...]] = {}
    c_in = 3
    for i, c_out in enumerate(widths, start=1):
        shapes[f"backbone.conv{i}.weight"] = (c_out, c_in, 3, 3)
        shapes[f"backbone.conv{i}.bias"] = (c_out,)
        c_in = c_out
    for i, c in enumerate(widths[:4], start=1):
        shapes[f"backbone.in{i}.gamma"] = (c,)
        shapes[f"backbone.in{i}.beta"] = (c,)
    e = 32 * m
    shapes["gen1d.fc.weight"] = (3 * s_o, e)
    shapes["gen1d.fc.bias"] = (3 * s_o,)
    shapes["gen3d.fc1.weight"] = (k, e)
    shapes["gen3d.fc1.bias"] = (k,)
    shapes["gen3d.fc2.weight"] = (3 * s_t ** 3, k)
    shapes["gen3d.fc2.bias"] = (3 * s_t ** 3,)
    return shapes


@dataclass
class WeightBundle:
    """All learned parameters plus the (m, S_o, S_t, K) hyper-parameters.

    ``tensors`` maps the canonical names to float32 arrays or quantized
    tensors (any object exposing ``.data``/``.shape`` and ``dequantize()``).
    """

    m: int
    s_o: int
    s_t: int
    k: int
    leaky_slope: float = 0.2
    tensors: dict = field(default_factory=dict)
    backbone_kind: str = "cnn"  # reserved; only "cnn" is implemented

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"channel multiplier m must be >= 1, got {self.m}")
        if self.s_o < 2 or self.s_t < 2:
            raise InvalidSizeError(
                f"LUT sizes must be >= 2, got S_o={self.s_o}, S_t={self.s_t}"
            )
        if self.k < 1:
            raise ValueError(f"factorization rank K must be >= 1, got {self.k}")

    def expected_shapes(self) -> dict[str, tuple[int, ...]]:
        return expected_tensor_shapes(self.m, self.s_o, self.s_t, self.k)

    def validate(self) -> None:
        """Reject any missing, extra, or wrongly shaped tensor."""
        expected = self.expected_shapes()
        missing = sorted(set(expected) - set(self.tensors))
        if missing:
            raise ShapeMismatchError(f"missing tensors: {', '.join(missing)}")
        extra = sorted(set(self.tensors) - set(expected))
        if extra:
            raise ShapeMismatchError(f"unexpected tensors: {', '.join(extra)}")
        for name, shape in expected.items():
            got = tuple(self.tensors[name].shape)
            if got != shape:
                raise ShapeMismatchError(
                    f"tensor {name}: expected shape {shape}, got {got}"
                )

    def tensor(self, name: str) -> np.ndarray:
        """Float32 view of a tensor, dequantizing 8-bit storage on the fly."""
        t = self.tensors[name]
        if hasattr(t, "dequantize"):
            return t.dequantize()
        return t

    def is_quantized(self, name: str) -> bool:
        return hasattr(self.tensors[name], "dequantize")

    def parameter_count(self) -> int:
        """Total number of stored elements across every tensor."""
        return sum(int(np.prod(t.shape)) for t in self.tensors.values())

    def parameter_breakdown(self) -> dict[str, int]:
        """Element counts under the accounting conventions the engine reports.

        ``all``: every weight, bias, and norm affine parameter.
        ``no_final_lut_bias``: everything except the last 3D-generator bias.
        ``weights_only``: conv and FC weight matrices only.
        """
        sizes = {name: int(np.prod(t.shape)) for name, t in self.tensors.items()}
        total = sum(sizes.values())
        weights_only = sum(v for n, v in sizes.items() if n.endswith(".weight"))
        return {
            "all": total,
            "no_final_lut_bias": total - sizes.get("gen3d.fc2.bias", 0),
            "weights_only": weights_only,
            "backbone": sum(v for n, v in sizes.items() if n.startswith("backbone.")),
            "generators": sum(v for n, v in sizes.items() if not n.startswith("backbone.")),
        }
