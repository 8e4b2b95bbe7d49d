"""Weight-bundle container I/O (.sepw files).

Layout: magic ``SEPW``, u32 little-endian version (=1), u64 little-endian
manifest byte length, a UTF-8 JSON manifest, then raw little-endian tensor
payloads. Manifest offsets are relative to the start of the payload section
(the byte following the manifest). Float tensors are ``<f4`` in C order of
the declared shape; quantized tensors are raw bytes with per-tensor
``scale``/``zero_point`` in their manifest entry.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import TENSOR_NAMES, WeightBundle
from .errors import BundleFormatError, BundleVersionError, ShapeMismatchError, TruncatedDataError
from .quant import QuantizedTensor

MAGIC = b"SEPW"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def save_weight_bundle(bundle: WeightBundle, path: str | Path) -> None:
    """Serialize a validated bundle; round-trips bit-exactly."""
    bundle.validate()
    entries = []
    payload = bytearray()
    order = [n for n in TENSOR_NAMES if n in bundle.tensors]
    for name in order:
        t = bundle.tensors[name]
        entry = {"name": name, "shape": list(t.shape), "offset": len(payload)}
        if isinstance(t, QuantizedTensor) or hasattr(t, "dequantize"):
            entry["dtype"] = "u8"
            entry["scale"] = float(t.scale)
            if t.zero_point:
                entry["zero_point"] = int(t.zero_point)
            payload += np.ascontiguousarray(t.data, dtype=np.uint8).tobytes()
        else:
            entry["dtype"] = "f32"
            payload += np.ascontiguousarray(t, dtype="<f4").tobytes()
        entries.append(entry)
    manifest = {
        "m": bundle.m,
        "S_o": bundle.s_o,
        "S_t": bundle.s_t,
        "K": bundle.k,
        "leaky_slope": bundle.leaky_slope,
        "backbone": bundle.backbone_kind,
        "tensors": entries,
    }
    blob = json.dumps(manifest).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, len(blob)))
        f.write(blob)
        f.write(payload)


def load_weight_bundle(path: str | Path) -> WeightBundle:
    """Parse and validate a .sepw container."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedDataError(f"{path}: file shorter than the fixed header")
    magic, version, manifest_len = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BundleFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise BundleVersionError(f"{path}: unsupported version {version}")
    if len(raw) < _HEADER.size + manifest_len:
        raise TruncatedDataError(f"{path}: manifest extends past end of file")
    try:
        manifest = json.loads(raw[_HEADER.size : _HEADER.size + manifest_len])
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleFormatError(f"{path}: manifest is not valid JSON: {exc}") from exc
    for key in ("m", "S_o", "S_t", "K", "leaky_slope", "tensors"):
        if key not in manifest:
            raise BundleFormatError(f"{path}: manifest missing key {key!r}")

    data_start = _HEADER.size + manifest_len
    tensors = {}
    for entry in manifest["tensors"]:
        name = entry.get("name", "<unnamed>")
        shape = tuple(int(v) for v in entry.get("shape", ()))
        dtype = entry.get("dtype")
        if not shape or "offset" not in entry:
            raise BundleFormatError(f"{path}: tensor {name} entry missing shape or offset")
        count = int(np.prod(shape, dtype=np.int64))
        nbytes = count * (4 if dtype == "f32" else 1)
        lo = data_start + int(entry["offset"])
        if lo < data_start or lo + nbytes > len(raw):
            raise TruncatedDataError(f"{path}: tensor {name} payload is truncated")
        buf = raw[lo : lo + nbytes]
        if dtype == "f32":
            tensors[name] = np.frombuffer(buf, dtype="<f4").reshape(shape).copy()
        elif dtype == "u8":
            tensors[name] = QuantizedTensor(
                np.frombuffer(buf, dtype=np.uint8).reshape(shape).copy(),
                scale=float(entry.get("scale", 0.0)),
                zero_point=int(entry.get("zero_point", 0)),
            )
        else:
            raise BundleFormatError(f"{path}: tensor {name} has unknown dtype {dtype!r}")

    try:
        bundle = WeightBundle(
            m=int(manifest["m"]),
            s_o=int(manifest["S_o"]),
            s_t=int(manifest["S_t"]),
            k=int(manifest["K"]),
            leaky_slope=float(manifest["leaky_slope"]),
            tensors=tensors,
            backbone_kind=str(manifest.get("backbone", "cnn")),
        )
    except ValueError as exc:
        raise BundleFormatError(f"{path}: bad hyper-parameters: {exc}") from exc
    try:
        bundle.validate()
    except ShapeMismatchError as exc:
        raise ShapeMismatchError(f"{path}: {exc}") from exc
    return bundle
