"""Checkpoint to .sepw conversion.

Checkpoints are flat-tensor NumPy archives (``.npz``): a mapping from tensor
name to array. When the training code uses different names, a JSON name map
``{"checkpoint key": "bundle key", ...}`` translates them; keys absent from
the map are assumed to already use bundle names.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .sepw import write_sepw
from .shapes import expected_shapes


class ConversionError(ValueError):
    """Checkpoint cannot be converted; the message names the offender."""


@dataclass
class ConvertConfig:
    m: int
    s_o: int
    s_t: int
    k: int
    leaky_slope: float = 0.2


def load_name_map(path: str | Path) -> dict[str, str]:
    mapping = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(mapping, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
    ):
        raise ConversionError(f"{path}: name map must be a JSON object of strings")
    return mapping


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise ConversionError(f"{path}: no such file")
    try:
        archive = np.load(path, allow_pickle=False)
    except (ValueError, OSError) as exc:
        raise ConversionError(f"{path}: unknown checkpoint layout ({exc})") from exc
    if not hasattr(archive, "files"):
        raise ConversionError(f"{path}: unknown checkpoint layout (expected an .npz archive)")
    return {name: archive[name] for name in archive.files}


def convert(
    checkpoint_path: str | Path,
    config: ConvertConfig,
    out_path: str | Path,
    name_map: dict[str, str] | None = None,
) -> dict[str, tuple[int, ...]]:
    """Validate and re-serialize a checkpoint; returns the emitted shapes.

    Float32 tensors survive bitwise; wider floats are cast down to float32.
    """
    raw = load_checkpoint(checkpoint_path)
    name_map = name_map or {}

    renamed: dict[str, np.ndarray] = {}
    for key, value in raw.items():
        target = name_map.get(key, key)
        if target in renamed:
            raise ConversionError(f"duplicate tensor after renaming: {target}")
        renamed[target] = value

    shapes = expected_shapes(config.m, config.s_o, config.s_t, config.k)
    missing = sorted(set(shapes) - set(renamed))
    if missing:
        raise ConversionError(f"missing tensor: {missing[0]} (of {len(missing)} missing)")
    unknown = sorted(set(renamed) - set(shapes))
    if unknown:
        raise ConversionError(
            f"unknown tensor: {unknown[0]} (of {len(unknown)} unmapped); "
            "extend the name map or drop it from the checkpoint"
        )

    tensors: dict[str, np.ndarray] = {}
    for name, want in shapes.items():
        arr = renamed[name]
        if not np.issubdtype(arr.dtype, np.floating):
            raise ConversionError(f"tensor {name}: expected float data, got {arr.dtype}")
        if tuple(arr.shape) != want:
            raise ConversionError(
                f"tensor {name}: shape mismatch, expected {want}, got {tuple(arr.shape)}"
            )
        if not np.all(np.isfinite(arr)):
            raise ConversionError(f"tensor {name}: contains non-finite values")
        tensors[name] = arr.astype(np.float32, copy=False)

    write_sepw(
        tensors, config.m, config.s_o, config.s_t, config.k, config.leaky_slope, out_path
    )
    return {name: tuple(t.shape) for name, t in tensors.items()}
