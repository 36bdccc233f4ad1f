"""Monostatic synthetic-aperture geometries.

Four canonical scanning patterns plus free-form point sets:

* linear      -- elements along y at the z=Z0 plane, positions (0, y', Z0)
* planar      -- centered x-y grid at z=Z0, positions (x', y', Z0)
* circular    -- single ring in the y-z plane, positions (0, R0*cos t, R0*sin t)
* cylindrical -- rings in the x-z plane stacked along y,
                 positions (R0*cos t, y', R0*sin t)
* irregular   -- caller-supplied positions, kept verbatim

The circular ring lives in y-z while the cylindrical rings live in x-z; the
two parameterizations are intentionally different (each matches the scanning
hardware it models) and the axis maps are fixed here once and for all.
Uniform apertures carry their generating parameters in ``meta`` so they can
be regenerated bit-identically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

KINDS = ("linear", "planar", "circular", "cylindrical", "irregular")


class ApertureError(ValueError):
    """Raised for invalid aperture parameters."""


@dataclass(frozen=True)
class Aperture:
    """Ordered monostatic transceiver positions with geometry metadata."""

    kind: str
    positions: np.ndarray  # [N, 3] float64, meters
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ApertureError(f"unknown aperture kind {self.kind!r}")
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ApertureError("positions must be a nonempty [N, 3] array")
        if not np.all(np.isfinite(pos)):
            raise ApertureError("positions must be finite")
        object.__setattr__(self, "positions", pos)

    @property
    def n_elements(self) -> int:
        return self.positions.shape[0]


def linear_aperture(Ny: int, dy: float, Z0: float) -> Aperture:
    """Ny elements along y, centered on y=0, spacing dy, at the z=Z0 plane."""
    if Ny < 1:
        raise ApertureError(f"Ny must be >= 1, got {Ny}")
    if dy <= 0:
        raise ApertureError(f"dy must be positive, got {dy}")
    y = (np.arange(Ny) - (Ny - 1) / 2.0) * dy
    pos = np.zeros((Ny, 3))
    pos[:, 1] = y
    pos[:, 2] = Z0
    return Aperture("linear", pos, {"Ny": int(Ny), "dy": float(dy), "Z0": float(Z0)})


def planar_aperture(Nx: int, Ny: int, dx: float, dy: float, Z0: float) -> Aperture:
    """Centered Nx-by-Ny grid at z=Z0; element n = iy*Nx + ix (x fastest)."""
    if Nx < 1 or Ny < 1:
        raise ApertureError(f"counts must be >= 1, got Nx={Nx}, Ny={Ny}")
    if dx <= 0 or dy <= 0:
        raise ApertureError(f"spacings must be positive, got dx={dx}, dy={dy}")
    x = (np.arange(Nx) - (Nx - 1) / 2.0) * dx
    y = (np.arange(Ny) - (Ny - 1) / 2.0) * dy
    xx, yy = np.meshgrid(x, y)  # shape [Ny, Nx], row-major flatten => x fastest
    pos = np.column_stack([xx.ravel(), yy.ravel(), np.full(Nx * Ny, float(Z0))])
    meta = {"Nx": int(Nx), "Ny": int(Ny), "dx": float(dx), "dy": float(dy),
            "Z0": float(Z0)}
    return Aperture("planar", pos, meta)


def circular_aperture(Ntheta: int, R0: float) -> Aperture:
    """Single ring of radius R0 in the y-z plane, theta uniform on [0, 2*pi)."""
    if Ntheta < 1:
        raise ApertureError(f"Ntheta must be >= 1, got {Ntheta}")
    if R0 <= 0:
        raise ApertureError(f"R0 must be positive, got {R0}")
    theta = 2.0 * np.pi * np.arange(Ntheta) / Ntheta
    pos = np.zeros((Ntheta, 3))
    pos[:, 1] = R0 * np.cos(theta)
    pos[:, 2] = R0 * np.sin(theta)
    return Aperture("circular", pos, {"Ntheta": int(Ntheta), "R0": float(R0)})


def cylindrical_aperture(Ntheta: int, Ny: int, dy: float, R0: float) -> Aperture:
    """Rings of radius R0 in the x-z plane stacked along centered y.

    Element ordering is theta-major: n = itheta*Ny + iy.
    """
    if Ntheta < 1 or Ny < 1:
        raise ApertureError(f"counts must be >= 1, got Ntheta={Ntheta}, Ny={Ny}")
    if dy <= 0:
        raise ApertureError(f"dy must be positive, got {dy}")
    if R0 <= 0:
        raise ApertureError(f"R0 must be positive, got {R0}")
    theta = 2.0 * np.pi * np.arange(Ntheta) / Ntheta
    y = (np.arange(Ny) - (Ny - 1) / 2.0) * dy
    tt = np.repeat(theta, Ny)
    yy = np.tile(y, Ntheta)
    pos = np.column_stack([R0 * np.cos(tt), yy, R0 * np.sin(tt)])
    meta = {"Ntheta": int(Ntheta), "Ny": int(Ny), "dy": float(dy), "R0": float(R0)}
    return Aperture("cylindrical", pos, meta)


def irregular_aperture(positions) -> Aperture:
    """Free-form aperture from explicit positions, order preserved.

    Duplicate positions are accepted (repeated dwells are physically
    meaningful) but flagged with a warning.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.size == 0:
        raise ApertureError("positions must be nonempty")
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ApertureError("positions must be an [N, 3] array")
    if not np.all(np.isfinite(pos)):
        raise ApertureError("positions must be finite")
    uniq = np.unique(pos, axis=0)
    if uniq.shape[0] != pos.shape[0]:
        warnings.warn("irregular aperture contains duplicate positions",
                      stacklevel=2)
    return Aperture("irregular", pos)


def aperture_extent(a: Aperture) -> tuple[float, float]:
    """(Dx, Dy): coordinate span of the aperture along x and y [m]."""
    pos = a.positions
    return (float(pos[:, 0].max() - pos[:, 0].min()),
            float(pos[:, 1].max() - pos[:, 1].min()))


def regenerate(a: Aperture) -> Aperture:
    """Rebuild a uniform aperture from its meta (bit-identical positions)."""
    m = a.meta
    if a.kind == "linear":
        return linear_aperture(m["Ny"], m["dy"], m["Z0"])
    if a.kind == "planar":
        return planar_aperture(m["Nx"], m["Ny"], m["dx"], m["dy"], m["Z0"])
    if a.kind == "circular":
        return circular_aperture(m["Ntheta"], m["R0"])
    if a.kind == "cylindrical":
        return cylindrical_aperture(m["Ntheta"], m["Ny"], m["dy"], m["R0"])
    raise ApertureError(f"cannot regenerate {a.kind!r} aperture from meta")


def check_sampling(a: Aperture, lambda_c: float) -> list[str]:
    """Warn (never reject) when element spacing exceeds lambda_c/4.

    Returns the list of warning messages for callers that log them.
    """
    lim = lambda_c / 4.0
    msgs = []
    m = a.meta
    for key in ("dx", "dy"):
        if key in m and m[key] > lim * (1 + 1e-12):
            msgs.append(f"{a.kind} aperture {key}={m[key]:.4g} m exceeds "
                        f"lambda_c/4={lim:.4g} m")
    if "Ntheta" in m and "R0" in m and m["Ntheta"] > 1:
        arc = 2.0 * np.pi * m["R0"] / m["Ntheta"]
        if arc > lim * (1 + 1e-12):
            msgs.append(f"{a.kind} aperture arc spacing {arc:.4g} m exceeds "
                        f"lambda_c/4={lim:.4g} m")
    for msg in msgs:
        warnings.warn(msg, stacklevel=2)
    return msgs
