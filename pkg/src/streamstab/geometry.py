"""Motion-field geometry and the additive motion algebra.

A motion field is a coarse grid of 2D displacements, one (dx, dy) pair
per grid cell, expressed in full-resolution pixel units.  Fields compose
additively, windows of recent fields feed the path smoother, and
cumulative sums of fields form the camera path.  All values here are
immutable after construction and all operations are pure functions, so
everything in this module is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class GridGeometry:
    """Coarse displacement grid tied to a full-resolution frame.

    The frame is tiled exactly by ``grid_width x grid_height`` square
    cells of ``scale`` pixels.
    """

    frame_width: int = 640
    frame_height: int = 360
    grid_width: int = 80
    grid_height: int = 45
    scale: int = 8

    def __post_init__(self):
        for name in ("frame_width", "frame_height", "grid_width", "grid_height"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 2:
                raise GeometryError(f"{name} must be an integer >= 2, got {v!r}")
        if not isinstance(self.scale, (int, np.integer)) or self.scale < 1:
            raise GeometryError(f"scale must be an integer >= 1, got {self.scale!r}")
        if self.frame_width != self.grid_width * self.scale:
            raise GeometryError(
                f"frame_width {self.frame_width} != grid_width {self.grid_width}"
                f" * scale {self.scale}"
            )
        if self.frame_height != self.grid_height * self.scale:
            raise GeometryError(
                f"frame_height {self.frame_height} != grid_height {self.grid_height}"
                f" * scale {self.scale}"
            )

    @property
    def grid_shape(self) -> tuple[int, int]:
        return (self.grid_height, self.grid_width)

    @property
    def field_shape(self) -> tuple[int, int, int]:
        return (self.grid_height, self.grid_width, 2)

    @property
    def frame_shape(self) -> tuple[int, int]:
        return (self.frame_height, self.frame_width)

    def cell_centers(self, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
        """Frame-pixel coordinates of cell centers: (xs[grid_width], ys[grid_height])."""
        xs = (np.arange(self.grid_width, dtype=dtype) + 0.5) * self.scale - 0.5
        ys = (np.arange(self.grid_height, dtype=dtype) + 0.5) * self.scale - 0.5
        return xs, ys


def displacement_bound(geometry: GridGeometry) -> float:
    """Sanity bound on per-frame displacements; violations mean corrupt input."""
    return 2.0 * max(geometry.frame_width, geometry.frame_height)


class MotionField:
    """Per-cell 2D displacement grid, component order (dx, dy), in pixels.

    The same container carries per-frame motions, stabilizing warp
    fields, and synthetic/label fields; they differ only in role.
    """

    __slots__ = ("geometry", "data")

    def __init__(self, geometry: GridGeometry, data, copy: bool = True):
        arr = np.array(data, copy=True) if copy else np.asarray(data)
        if arr.shape != geometry.field_shape:
            raise GeometryError(
                f"field shape {arr.shape} does not match geometry {geometry.field_shape}"
            )
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        if not np.all(np.isfinite(arr)):
            raise GeometryError("motion field contains non-finite values")
        bound = displacement_bound(geometry)
        amax = float(np.abs(arr).max())
        if amax > bound:
            raise GeometryError(
                f"displacement magnitude {amax:.1f} exceeds sanity bound {bound:.1f}"
            )
        arr.setflags(write=False)
        self.geometry = geometry
        self.data = arr

    @classmethod
    def zero(cls, geometry: GridGeometry, dtype=np.float32) -> "MotionField":
        return cls(geometry, np.zeros(geometry.field_shape, dtype=dtype), copy=False)

    @classmethod
    def uniform(cls, geometry: GridGeometry, dx: float, dy: float, dtype=np.float32) -> "MotionField":
        data = np.empty(geometry.field_shape, dtype=dtype)
        data[..., 0] = dx
        data[..., 1] = dy
        return cls(geometry, data, copy=False)

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        g = self.geometry
        return f"MotionField({g.grid_width}x{g.grid_height}, dtype={self.data.dtype})"


def _check_same_geometry(a: MotionField, b: MotionField, what: str = "operands"):
    if a.geometry != b.geometry:
        raise GeometryError(f"{what} have mismatched geometry: {a.geometry} vs {b.geometry}")


def compose_additive(a: MotionField, b: MotionField) -> MotionField:
    """Element-wise sum of two motion fields (the paper-style '+' composition)."""
    _check_same_geometry(a, b)
    return MotionField(a.geometry, a.data + b.data, copy=False)


def negate(a: MotionField) -> MotionField:
    """Element-wise negation (the inverse motion under additive composition)."""
    return MotionField(a.geometry, -a.data, copy=False)


def fields_to_channels(stack: np.ndarray) -> np.ndarray:
    """Pack (k, gh, gw, 2) fields into (2k, gh, gw) channels, oldest first.

    Field i occupies channels (2i, 2i+1) as (dx, dy).  This is the one
    canonical packing used by windows, datasets, and the engine, so
    streamed and batched inputs agree bit-exactly.
    """
    k, gh, gw, two = stack.shape
    if two != 2:
        raise GeometryError(f"expected trailing component axis of size 2, got {two}")
    return np.ascontiguousarray(stack.transpose(0, 3, 1, 2)).reshape(2 * k, gh, gw)


class MotionWindow:
    """Fixed-capacity FIFO of the most recent motion fields, oldest first."""

    __slots__ = ("geometry", "capacity", "entries")

    def __init__(self, geometry: GridGeometry, entries: Sequence[MotionField]):
        entries = tuple(entries)
        if not entries:
            raise GeometryError("motion window needs at least one entry")
        for f in entries:
            if f.geometry != geometry:
                raise GeometryError("window entries have mismatched geometry")
        self.geometry = geometry
        self.capacity = len(entries)
        self.entries = entries

    @classmethod
    def zeros(cls, geometry: GridGeometry, capacity: int, dtype=np.float32) -> "MotionWindow":
        if capacity < 1:
            raise GeometryError(f"window capacity must be >= 1, got {capacity}")
        z = MotionField.zero(geometry, dtype=dtype)
        return cls(geometry, (z,) * capacity)

    @property
    def newest(self) -> MotionField:
        return self.entries[-1]

    @property
    def oldest(self) -> MotionField:
        return self.entries[0]

    def as_channels(self) -> np.ndarray:
        """Stack entries into a (2 * capacity, gh, gw) channel block."""
        return fields_to_channels(np.stack([f.data for f in self.entries]))

    def __len__(self):
        return self.capacity


def push_window(w: MotionWindow, f: MotionField) -> MotionWindow:
    """Drop the oldest entry and append ``f``; capacity is preserved."""
    if f.geometry != w.geometry:
        raise GeometryError("pushed field geometry does not match window")
    return MotionWindow(w.geometry, w.entries[1:] + (f,))


class CameraPath:
    """Cumulative camera trajectory: positions[t] = sum of motions[0..t-1].

    Positions are kept in float64 because cumulative displacements grow
    past the per-motion sanity bound on long sequences.
    """

    __slots__ = ("geometry", "positions")

    def __init__(self, geometry: GridGeometry, positions: np.ndarray):
        positions = np.asarray(positions, dtype=np.float64)
        if positions.ndim != 4 or positions.shape[1:] != geometry.field_shape:
            raise GeometryError(f"bad path positions shape {positions.shape}")
        positions.setflags(write=False)
        self.geometry = geometry
        self.positions = positions

    def __len__(self):
        return self.positions.shape[0]

    def motions(self) -> np.ndarray:
        """First differences of the path (recovers the input motions)."""
        return np.diff(self.positions, axis=0)


def accumulate_path(motions: Iterable[MotionField]) -> CameraPath:
    """Prefix-sum a motion sequence into a camera path with a leading zero."""
    motions = list(motions)
    if not motions:
        raise GeometryError("cannot accumulate an empty motion sequence")
    geometry = motions[0].geometry
    for m in motions[1:]:
        _check_same_geometry(motions[0], m, "path motions")
    out = np.zeros((len(motions) + 1,) + geometry.field_shape, dtype=np.float64)
    acc = np.zeros(geometry.field_shape, dtype=np.float64)
    for t, m in enumerate(motions):
        acc += m.data
        out[t + 1] = acc
    return CameraPath(geometry, out)


def rasterize_mesh(vertex_motions, geometry: GridGeometry) -> MotionField:
    """Bilinearly interpolate sparse vertex motions onto the cell-center grid.

    The (Vr, Vc) vertex lattice spans the frame uniformly, corners at
    pixel coordinates (0, 0) and (frame_width-1, frame_height-1); each
    cell samples the four enclosing vertices at its center.
    """
    vm = np.asarray(vertex_motions, dtype=np.float64)
    if vm.ndim != 3 or vm.shape[2] != 2:
        raise GeometryError(f"vertex motions must be (Vr, Vc, 2), got {vm.shape}")
    vr, vc = vm.shape[:2]
    if vr < 2 or vc < 2:
        raise GeometryError(f"vertex grid must be at least 2x2, got {vr}x{vc}")
    if not np.all(np.isfinite(vm)):
        raise GeometryError("vertex motions contain non-finite values")

    xs, ys = geometry.cell_centers()
    # Fractional vertex coordinates of each cell center.
    gx = xs * (vc - 1) / (geometry.frame_width - 1)
    gy = ys * (vr - 1) / (geometry.frame_height - 1)
    j0 = np.clip(np.floor(gx).astype(np.int64), 0, vc - 2)
    i0 = np.clip(np.floor(gy).astype(np.int64), 0, vr - 2)
    tx = (gx - j0)[None, :, None]
    ty = (gy - i0)[:, None, None]

    v00 = vm[np.ix_(i0, j0)]
    v01 = vm[np.ix_(i0, j0 + 1)]
    v10 = vm[np.ix_(i0 + 1, j0)]
    v11 = vm[np.ix_(i0 + 1, j0 + 1)]
    top = v00 * (1.0 - tx) + v01 * tx
    bot = v10 * (1.0 - tx) + v11 * tx
    data = (top * (1.0 - ty) + bot * ty).astype(np.float32)
    return MotionField(geometry, data, copy=False)
