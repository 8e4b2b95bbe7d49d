"""LUT text-file formats.

3D LUTs use the Iridas/Adobe .cube format: a ``LUT_3D_SIZE N`` header and
N^3 ``r g b`` lines with the red index varying fastest. 1D LUTs use a
``SEPLUT1D S`` header followed by S ``r g b`` lines. Values are printed with
6 decimals; writer and reader round-trip bit-identically at that precision.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import FLOAT_DTYPE, Lut1D, Lut3D
from .errors import LutFileError


def write_cube(lut: Lut3D, path: str | Path, title: str | None = None) -> None:
    if lut.is_quantized:
        lut = Lut3D(lut.values.astype(np.float64) / 255.0)
    s = lut.size
    lines = []
    if title:
        lines.append(f'TITLE "{title}"')
    lines.append(f"LUT_3D_SIZE {s}")
    v = lut.values
    for b in range(s):
        for g in range(s):
            for r in range(s):
                lines.append(f"{v[0, r, g, b]:.6f} {v[1, r, g, b]:.6f} {v[2, r, g, b]:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_cube(path: str | Path) -> Lut3D:
    size = None
    rows: list[tuple[float, float, float]] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("TITLE") or line.startswith("DOMAIN_"):
            continue
        if line.startswith("LUT_1D_SIZE"):
            raise LutFileError(f"{path}: expected a 3D LUT, found a 1D header")
        if line.startswith("LUT_3D_SIZE"):
            try:
                size = int(line.split()[1])
            except (IndexError, ValueError) as exc:
                raise LutFileError(f"{path}:{lineno}: bad LUT_3D_SIZE line") from exc
            continue
        parts = line.split()
        if len(parts) != 3:
            raise LutFileError(f"{path}:{lineno}: expected 3 values, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise LutFileError(f"{path}:{lineno}: non-numeric value") from exc
    if size is None:
        raise LutFileError(f"{path}: missing LUT_3D_SIZE header")
    if len(rows) != size**3:
        raise LutFileError(f"{path}: expected {size**3} entries, got {len(rows)}")
    data = np.asarray(rows, dtype=np.float64)  # rows ordered red-fastest
    values = np.empty((3, size, size, size), dtype=FLOAT_DTYPE)
    grid = data.reshape(size, size, size, 3)  # [b][g][r][c]
    for c in range(3):
        values[c] = grid[:, :, :, c].transpose(2, 1, 0)
    return Lut3D(values)


def write_lut1d(lut: Lut1D, path: str | Path) -> None:
    if lut.is_quantized:
        lut = Lut1D(lut.values.astype(np.float64) / 255.0)
    lines = [f"SEPLUT1D {lut.size}"]
    v = lut.values
    for i in range(lut.size):
        lines.append(f"{v[0, i]:.6f} {v[1, i]:.6f} {v[2, i]:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_lut1d(path: str | Path) -> Lut1D:
    text = [
        ln.strip()
        for ln in Path(path).read_text(encoding="utf-8").splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not text or not text[0].startswith("SEPLUT1D"):
        raise LutFileError(f"{path}: missing SEPLUT1D header")
    try:
        size = int(text[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise LutFileError(f"{path}: bad SEPLUT1D header") from exc
    if len(text) - 1 != size:
        raise LutFileError(f"{path}: expected {size} entries, got {len(text) - 1}")
    values = np.empty((3, size), dtype=FLOAT_DTYPE)
    for i, line in enumerate(text[1:]):
        parts = line.split()
        if len(parts) != 3:
            raise LutFileError(f"{path}: entry {i} has {len(parts)} values, expected 3")
        try:
            values[:, i] = [float(p) for p in parts]
        except ValueError as exc:
            raise LutFileError(f"{path}: entry {i} is non-numeric") from exc
    return Lut1D(values)
