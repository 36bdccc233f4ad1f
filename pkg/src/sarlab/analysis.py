"""Resolution theory, PSF measurement, and image comparison.

Predicted resolutions follow the standard near-field relations: cross-range
lambda_c*Z_ref/(2*D) and range c/(2*B) for rectilinear apertures; vertical
lambda_c*R0/(2*Dy) and radial 2.4/(k_max + k_min) for cylindrical ones.
Measured widths use the half-power criterion on magnitude profiles
(half power = peak/sqrt(2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sarlab.constants import C
from sarlab.grids import ImageVolume


class AnalysisError(ValueError):
    """Raised for invalid analysis inputs."""


@dataclass(frozen=True)
class ResolutionReport:
    """Predicted vs measured per-axis resolutions [m] plus the config echo."""

    predicted: dict
    measured: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for d in (self.predicted, self.measured):
            for key, val in d.items():
                if val is not None and (not np.isfinite(val) or val <= 0):
                    raise AnalysisError(f"resolution {key}={val!r} must be positive")

    def as_dict(self) -> dict:
        return {"predicted": dict(self.predicted),
                "measured": dict(self.measured),
                "config": dict(self.config)}


def planar_resolution(lambda_c: float, z_ref: float, dx_aperture: float,
                      dy_aperture: float, bandwidth: float) -> ResolutionReport:
    """Planar-aperture resolutions: dx, dy cross-range and dz range [m].

    A zero aperture extent omits that axis from the report (a linear aperture
    has no x extent, for instance).
    """
    if lambda_c <= 0 or z_ref <= 0 or bandwidth <= 0:
        raise AnalysisError("lambda_c, z_ref and bandwidth must be positive")
    predicted = {"dz": C / (2.0 * bandwidth)}
    if dx_aperture > 0:
        predicted["dx"] = lambda_c * z_ref / (2.0 * dx_aperture)
    if dy_aperture > 0:
        predicted["dy"] = lambda_c * z_ref / (2.0 * dy_aperture)
    return ResolutionReport(predicted, config={
        "lambdaC": lambda_c, "Zref": z_ref, "Dx": dx_aperture,
        "Dy": dy_aperture, "B": bandwidth})


def cylindrical_resolution(lambda_c: float, r0: float, dy_aperture: float,
                           k_min: float, k_max: float) -> ResolutionReport:
    """Cylindrical-aperture resolutions: dy vertical and drho radial [m]."""
    if k_max <= k_min or k_min <= 0:
        raise AnalysisError(f"need k_max > k_min > 0, got ({k_min}, {k_max})")
    if lambda_c <= 0 or r0 <= 0:
        raise AnalysisError("lambda_c and r0 must be positive")
    predicted = {"drho": 2.4 / (k_max + k_min)}
    if dy_aperture > 0:
        predicted["dy"] = lambda_c * r0 / (2.0 * dy_aperture)
    return ResolutionReport(predicted, config={
        "lambdaC": lambda_c, "R0": r0, "Dy": dy_aperture,
        "kmin": k_min, "kmax": k_max})


def _half_power_width(axis: np.ndarray, profile: np.ndarray, peak_idx: int) -> float:
    """Distance between the -3 dB crossings around the peak, by linear
    interpolation of the magnitude profile."""
    level = profile[peak_idx] / np.sqrt(2.0)
    n = profile.size
    if peak_idx == 0 or peak_idx == n - 1:
        raise AnalysisError("peak sits on the grid boundary")

    i = peak_idx
    while i > 0 and profile[i] > level:
        i -= 1
    if profile[i] > level:
        raise AnalysisError("no left half-power crossing inside the grid")
    frac = (level - profile[i]) / (profile[i + 1] - profile[i])
    left = axis[i] + frac * (axis[i + 1] - axis[i])

    i = peak_idx
    while i < n - 1 and profile[i] > level:
        i += 1
    if profile[i] > level:
        raise AnalysisError("no right half-power crossing inside the grid")
    frac = (level - profile[i - 1]) / (profile[i] - profile[i - 1])
    right = axis[i - 1] + frac * (axis[i] - axis[i - 1])
    return float(right - left)


def psf_widths(image: ImageVolume, peak=None) -> dict:
    """Per-axis -3 dB widths [m] of an isolated point response.

    Profiles are taken through the magnitude argmax (or the given peak index)
    along each axis; crossings are located by linear interpolation.  Raises
    when the peak touches the grid boundary or a crossing is missing.
    """
    mag = image.magnitude
    if mag.max() == 0:
        raise AnalysisError("image is identically zero")
    idx = np.unravel_index(np.argmax(mag), mag.shape) if peak is None else tuple(peak)
    widths = {}
    for d, name in enumerate(image.axis_names):
        sel: list = list(idx)
        sel[d] = slice(None)
        profile = mag[tuple(sel)]
        widths[name] = _half_power_width(image.axes[d], profile, idx[d])
    return widths


def image_compare(a: ImageVolume, b: ImageVolume) -> dict:
    """{ncc, rmse, peak_offset}: similarity of two same-shape images.

    Both magnitudes are peak-normalized first; NCC is the zero-lag normalized
    cross-correlation, rmse the root-mean-square difference, peak_offset the
    argmax displacement in voxels.
    """
    if a.voxels.shape != b.voxels.shape:
        raise AnalysisError(f"shape mismatch: {a.voxels.shape} vs {b.voxels.shape}")
    ma, mb = a.magnitude, b.magnitude
    if ma.max() == 0 or mb.max() == 0:
        raise AnalysisError("NCC undefined for an all-zero image")
    ma = ma / ma.max()
    mb = mb / mb.max()
    da = ma - ma.mean()
    db = mb - mb.mean()
    denom = np.sqrt((da**2).sum() * (db**2).sum())
    if denom == 0:
        raise AnalysisError("NCC undefined for a constant image")
    ncc = float((da * db).sum() / denom)
    rmse = float(np.sqrt(np.mean((ma - mb) ** 2)))
    pa = np.unravel_index(np.argmax(ma), ma.shape)
    pb = np.unravel_index(np.argmax(mb), mb.shape)
    offset = tuple(int(x - y) for x, y in zip(pa, pb))
    return {"ncc": ncc, "rmse": rmse, "peak_offset": offset}
