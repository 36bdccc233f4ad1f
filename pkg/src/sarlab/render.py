"""Deterministic PNG rendering of image magnitudes.

Magnitude maps to dB = 20*log10(|v| / max|v|), clipped to
[-dynamic_range_db, 0], then through a fixed 256-entry "ember" colormap
(black -> deep violet -> crimson -> amber -> near-white, linearly
interpolated between the anchors below).  Identical inputs produce
byte-identical PNGs.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

# (position, (r, g, b)) anchors of the ember colormap
_ANCHORS = [
    (0.00, (0, 0, 0)),
    (0.20, (36, 12, 96)),
    (0.45, (150, 27, 90)),
    (0.70, (231, 102, 33)),
    (0.90, (250, 193, 90)),
    (1.00, (252, 250, 210)),
]


def _build_lut() -> np.ndarray:
    lut = np.zeros((256, 3), dtype=np.uint8)
    pos = np.array([a[0] for a in _ANCHORS])
    rgb = np.array([a[1] for a in _ANCHORS], dtype=np.float64)
    x = np.linspace(0.0, 1.0, 256)
    for c in range(3):
        lut[:, c] = np.round(np.interp(x, pos, rgb[:, c])).astype(np.uint8)
    return lut


_LUT = _build_lut()


class RenderError(ValueError):
    """Raised for invalid render requests."""


def plane_from_volume(voxels: np.ndarray, mode: str = "mip", axis: int = 0,
                      index: int = 0) -> np.ndarray:
    """Reduce a 2-D/3-D complex volume to a 2-D magnitude plane."""
    mag = np.abs(voxels)
    if mag.ndim == 2:
        # nothing to reduce, but slice bounds are still validated
        if mode == "slice":
            if not 0 <= axis < 2:
                raise RenderError(f"axis {axis} out of range for 2-D image")
            if not 0 <= index < mag.shape[axis]:
                raise RenderError(f"slice index {index} out of range "
                                  f"[0, {mag.shape[axis]})")
        return mag
    if mag.ndim != 3:
        raise RenderError(f"expected 2-D or 3-D voxels, got {mag.ndim}-D")
    if not 0 <= axis < 3:
        raise RenderError(f"axis {axis} out of range for 3-D volume")
    if mode == "mip":
        return mag.max(axis=axis)
    if mode == "slice":
        if not 0 <= index < mag.shape[axis]:
            raise RenderError(f"slice index {index} out of range "
                              f"[0, {mag.shape[axis]})")
        return np.take(mag, index, axis=axis)
    raise RenderError(f"mode must be 'slice' or 'mip', got {mode!r}")


def render_image(voxels: np.ndarray, mode: str = "mip", axis: int = 0,
                 index: int = 0, dynamic_range_db: float = 40.0) -> bytes:
    """PNG bytes of a magnitude plane (row 0 of the array = top image row)."""
    if dynamic_range_db <= 0:
        raise RenderError("dynamic_range_db must be positive")
    plane = plane_from_volume(voxels, mode=mode, axis=axis, index=index)
    peak = plane.max()
    if peak == 0:
        u = np.zeros(plane.shape)
    else:
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(plane / peak)
        db = np.clip(db, -dynamic_range_db, 0.0)
        u = (db + dynamic_range_db) / dynamic_range_db
    idx = np.round(u * 255.0).astype(np.uint8)
    rgb = _LUT[idx]
    img = Image.fromarray(rgb, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG", compress_level=6)
    return buf.getvalue()
