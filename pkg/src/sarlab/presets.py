"""Named pipeline presets served by the API and the wizard gallery.

fig5a-d reproduce the linear-aperture resolution study (a "UTD" glyph target
at 435 GHz, 128/256 elements crossed with 5/10 GHz bandwidth); knife-cyl is
the cylindrical solid-target example scaled to run on a desk.
"""

from __future__ import annotations

import numpy as np

from sarlab.constants import C

_FC = 435e9
_LAM = C / _FC

# "UTD" glyph as polylines in the (y, z) image plane, unit box [0,1]x[0,1]
_GLYPH_SEGMENTS = {
    "U": [[(0.0, 1.0), (0.0, 0.15)], [(0.0, 0.15), (0.15, 0.0)],
          [(0.15, 0.0), (0.55, 0.0)], [(0.55, 0.0), (0.7, 0.15)],
          [(0.7, 0.15), (0.7, 1.0)]],
    "T": [[(0.0, 1.0), (0.7, 1.0)], [(0.35, 1.0), (0.35, 0.0)]],
    "D": [[(0.0, 0.0), (0.0, 1.0)], [(0.0, 1.0), (0.45, 1.0)],
          [(0.45, 1.0), (0.7, 0.72)], [(0.7, 0.72), (0.7, 0.28)],
          [(0.7, 0.28), (0.45, 0.0)], [(0.45, 0.0), (0.0, 0.0)]],
}


def utd_points(height: float = 8e-3, spacing: float = 4e-4) -> list[dict]:
    """Point scatterers spelling "UTD" in the y-z plane, centered on origin."""
    pts = []
    width = 0.7 * height
    gap = 0.35 * height
    total_w = 3 * width + 2 * gap
    y_cursor = -total_w / 2.0
    for letter in "UTD":
        for seg in _GLYPH_SEGMENTS[letter]:
            (u0, v0), (u1, v1) = seg
            p0 = np.array([u0 * width + y_cursor, (v0 - 0.5) * height])
            p1 = np.array([u1 * width + y_cursor, (v1 - 0.5) * height])
            n = max(2, int(np.ceil(np.linalg.norm(p1 - p0) / spacing)) + 1)
            for t in np.linspace(0.0, 1.0, n):
                y, z = (1 - t) * p0 + t * p1
                pts.append({"xyz": [0.0, float(y), float(z)], "re": 1.0, "im": 0.0})
        y_cursor += width + gap
    return pts


def _fig5(n_elements: int, bandwidth: float) -> dict:
    return {
        "waveform": {
            "type": "fmcw",
            "f0": _FC - bandwidth / 2.0,
            "K": bandwidth / 100e-6,
            "Tc": 100e-6,
            "Tr": 120e-6,
            "Nc": 1,
            "fS": 2e6,
            "Nf": 64,
        },
        "aperture": {"kind": "linear", "Ny": n_elements, "dy": _LAM / 4.0,
                     "Z0": 0.1},
        "scene": {"points": utd_points()},
        "grid": {"y": {"min": -12e-3, "max": 12e-3, "count": 121},
                 "z": {"min": -15e-3, "max": 15e-3, "count": 121}},
        "algo": "rma-linear",
    }


def _knife_cylindrical() -> dict:
    fc = 60e9
    bandwidth = 8e9
    lam = C / fc
    n_theta, n_y = 256, 32
    r0 = n_theta * lam / (8.0 * np.pi) * 0.98  # keep arc spacing near lam/4
    return {
        "waveform": {
            "type": "fmcw",
            "f0": fc - bandwidth / 2.0,
            "K": bandwidth / 100e-6,
            "Tc": 100e-6,
            "Tr": 120e-6,
            "Nc": 1,
            "fS": 2e6,
            "Nf": 32,
        },
        "aperture": {"kind": "cylindrical", "Ntheta": n_theta, "Ny": n_y,
                     "dy": lam / 4.0, "R0": float(r0)},
        "scene": {"meshes": [{"builtin": "knife", "spacing": 8e-4,
                              "length": 0.016, "seed": 11}]},
        "grid": {"x": {"min": -10e-3, "max": 10e-3, "count": 51},
                 "y": {"min": -8e-3, "max": 8e-3, "count": 41},
                 "z": {"min": -10e-3, "max": 10e-3, "count": 51}},
        "algo": "rma-cylindrical",
    }


def build_presets() -> list[dict]:
    return [
        {"id": "fig5a", "name": "Linear 128 el / 5 GHz",
         "description": "UTD glyph, 435 GHz linear SAR, 128 elements at "
                        "lambda/4, 5 GHz bandwidth",
         "config": _fig5(128, 5e9)},
        {"id": "fig5b", "name": "Linear 128 el / 10 GHz",
         "description": "UTD glyph, 435 GHz linear SAR, 128 elements at "
                        "lambda/4, 10 GHz bandwidth",
         "config": _fig5(128, 10e9)},
        {"id": "fig5c", "name": "Linear 256 el / 5 GHz",
         "description": "UTD glyph, 435 GHz linear SAR, 256 elements at "
                        "lambda/4, 5 GHz bandwidth",
         "config": _fig5(256, 5e9)},
        {"id": "fig5d", "name": "Linear 256 el / 10 GHz",
         "description": "UTD glyph, 435 GHz linear SAR, 256 elements at "
                        "lambda/4, 10 GHz bandwidth",
         "config": _fig5(256, 10e9)},
        {"id": "knife-cyl", "name": "Cylindrical knife (desk scale)",
         "description": "Knife mesh on a 256 x 32 cylindrical aperture at "
                        "60 GHz, reconstructed with the polar RMA",
         "config": _knife_cylindrical()},
    ]


PRESETS = {p["id"]: p for p in build_presets()}
