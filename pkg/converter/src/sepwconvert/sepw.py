"""Minimal .sepw container writer and manifest reader.

Container layout: magic ``SEPW``, u32 little-endian version (=1), u64
little-endian manifest byte length, UTF-8 JSON manifest, then raw tensor
payloads at offsets relative to the end of the manifest. This converter
emits float32 tensors only, little-endian, C order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .shapes import BUNDLE_TENSOR_NAMES

MAGIC = b"SEPW"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


def write_sepw(
    tensors: dict[str, np.ndarray],
    m: int,
    s_o: int,
    s_t: int,
    k: int,
    leaky_slope: float,
    path: str | Path,
) -> None:
    entries = []
    payload = bytearray()
    for name in BUNDLE_TENSOR_NAMES:
        arr = np.ascontiguousarray(tensors[name], dtype="<f4")
        entries.append(
            {
                "name": name,
                "dtype": "f32",
                "shape": list(arr.shape),
                "offset": len(payload),
            }
        )
        payload += arr.tobytes()
    manifest = {
        "m": m,
        "S_o": s_o,
        "S_t": s_t,
        "K": k,
        "leaky_slope": leaky_slope,
        "backbone": "cnn",
        "tensors": entries,
    }
    blob = json.dumps(manifest).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, len(blob)))
        f.write(blob)
        f.write(payload)


def read_manifest(path: str | Path) -> dict:
    """Parse the JSON manifest of an existing .sepw file."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: not a .sepw file (too short)")
    magic, version, manifest_len = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    return json.loads(raw[_HEADER.size : _HEADER.size + manifest_len])
