"""MSEQ motion-sequence files: the shared, bit-exact on-disk field format.

Layout (all integers little-endian u32 unless noted):

    magic       4 bytes, b"MSEQ"
    version     u32 (currently 1)
    frame_width, frame_height, grid_width, grid_height, scale, frame_count
    payload     frame_count fields, each grid_height x grid_width x 2
                float32 little-endian, row-major, dx before dy per cell
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .geometry import GridGeometry, MotionField

MAGIC = b"MSEQ"
VERSION = 1
_HEADER = struct.Struct("<4s7I")


def write_mseq(path, geometry: GridGeometry, fields) -> None:
    """Write a motion sequence; ``fields`` is (n, gh, gw, 2) or a MotionField list."""
    if isinstance(fields, np.ndarray):
        arr = fields
    else:
        arr = np.stack([f.data for f in fields]) if fields else np.zeros(
            (0,) + geometry.field_shape, dtype=np.float32
        )
    if arr.ndim != 4 or arr.shape[1:] != geometry.field_shape:
        raise FormatError(f"field array shape {arr.shape} does not match geometry")
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        geometry.frame_width,
        geometry.frame_height,
        geometry.grid_width,
        geometry.grid_height,
        geometry.scale,
        arr.shape[0],
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_mseq(path) -> tuple[GridGeometry, np.ndarray]:
    """Read a motion sequence into (geometry, float32 array (n, gh, gw, 2))."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, fw, fh, gw, gh, scale, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    try:
        geometry = GridGeometry(fw, fh, gw, gh, scale)
    except Exception as exc:
        raise FormatError(f"{path}: invalid geometry in header: {exc}") from exc
    expected = count * gh * gw * 2 * 4
    payload = raw[_HEADER.size:]
    if len(payload) < expected:
        raise FormatError(
            f"{path}: truncated payload, expected {expected} bytes, got {len(payload)}"
        )
    if len(payload) > expected:
        raise FormatError(f"{path}: {len(payload) - expected} trailing bytes after payload")
    arr = np.frombuffer(payload, dtype="<f4", count=count * gh * gw * 2)
    arr = arr.reshape(count, gh, gw, 2).astype(np.float32, copy=True)
    if not np.all(np.isfinite(arr)):
        raise FormatError(f"{path}: payload contains non-finite values")
    return geometry, arr


def read_fields(path) -> tuple[GridGeometry, list[MotionField]]:
    """Read a motion sequence as validated MotionField values."""
    geometry, arr = read_mseq(path)
    return geometry, [MotionField(geometry, arr[i], copy=False) for i in range(arr.shape[0])]
