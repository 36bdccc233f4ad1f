"""Range migration for rectilinear (linear and planar) apertures.

Pipeline: spatial FFT over the aperture axes -> standoff compensation
exp(+j*kz*Z0) on the propagating disc -> Stolt resampling from the radial
wavenumber k onto uniform kz -> inverse transform evaluated directly on the
requested voxel grid.

Wavenumber bookkeeping (fixed by the forward model's exp(-j*2*k*R) phase and
a forward spatial DFT): a point at (x0, y0, z0) appears in the 2-D aperture
spectrum as exp(-j*(kx*x0 + ky*y0)) * exp(+j*kz*z0) * exp(-j*kz*Z0), so the
image kernels are e^{+j*kx*x}, e^{+j*ky*y}, e^{-j*kz*z}.
"""

from __future__ import annotations

import numpy as np

from sarlab.forward import EchoData
from sarlab.grids import GridSpec, ImageVolume, KSpace
from sarlab.recon.zoomfft import spatial_spectrum, zoom_eval


class ReconError(ValueError):
    """Raised for inputs a reconstructor cannot handle."""


def dispersion_kz(k, kx, ky):
    """kz = sqrt(4k^2 - kx^2 - ky^2) with its propagating-region mask.

    Evanescent combinations (kx^2 + ky^2 > 4k^2) get kz = 0 and mask False;
    their contribution is zeroed downstream.
    """
    k = np.asarray(k, dtype=np.float64)
    kz2 = 4.0 * k**2 - np.asarray(kx, dtype=np.float64) ** 2 \
        - np.asarray(ky, dtype=np.float64) ** 2
    mask = kz2 >= 0.0
    return np.sqrt(np.where(mask, kz2, 0.0)), mask


def stolt_rectilinear(spectrum: np.ndarray, k_axis: np.ndarray,
                      kz_grid: np.ndarray, kxy_sq,
                      order: int = 1) -> tuple[np.ndarray, int]:
    """Resample S(..., k) onto uniform kz along the last axis.

    For each line (fixed kx, ky with kxy_sq = kx^2 + ky^2) the samples sit at
    the nonuniform kz(k) = sqrt(4k^2 - kxy_sq); the resampler exploits the
    closed-form inverse k(kz) = sqrt(kz^2 + kxy_sq)/2 of that monotone map and
    interpolates along the uniform k axis (linear by default, order=3 cubic).
    Queries outside the band and evanescent regions are zero.  Lines with
    fewer than two propagating k samples are zeroed outright; their count is
    returned alongside the resampled spectrum.
    """
    k_axis = np.asarray(k_axis, dtype=np.float64)
    kz_grid = np.asarray(kz_grid, dtype=np.float64)
    nk = k_axis.size
    dk = k_axis[1] - k_axis[0]
    kxy_sq = np.broadcast_to(np.asarray(kxy_sq, dtype=np.float64),
                             spectrum.shape[:-1])

    n_prop = (4.0 * k_axis**2 > kxy_sq[..., None]).sum(axis=-1)
    dead = n_prop < 2
    n_zeroed = int(dead.sum())

    flat = np.ascontiguousarray(spectrum.reshape(-1, nk),
                                dtype=np.complex128)
    if order == 1:
        from sarlab import _kernels
        rho2 = np.ascontiguousarray(kxy_sq, dtype=np.float64).reshape(-1)
        out = np.empty((flat.shape[0], kz_grid.size), dtype=np.complex128)
        _kernels.stolt_resample_kernel(flat, rho2, k_axis[0], dk,
                                       np.ascontiguousarray(kz_grid), out)
    elif order == 3:
        from scipy.ndimage import map_coordinates
        k_star = 0.5 * np.sqrt(kz_grid[None, :] ** 2 + kxy_sq.reshape(-1, 1))
        idx = (k_star - k_axis[0]) / dk
        eps = 1e-9 * nk
        valid = (idx >= -eps) & (idx <= nk - 1 + eps) & (kz_grid[None, :] > 0.0)
        rows = np.broadcast_to(np.arange(flat.shape[0])[:, None], idx.shape)
        coords = np.stack([rows, np.clip(idx, 0, nk - 1)])
        out = (map_coordinates(flat.real, coords, order=3, mode="nearest")
               + 1j * map_coordinates(flat.imag, coords, order=3, mode="nearest"))
        out = np.where(valid, out, 0.0)
    else:
        raise ReconError(f"unsupported interpolation order {order}")
    out = out.reshape(*spectrum.shape[:-1], kz_grid.size)
    out[dead] = 0.0
    return out, n_zeroed


def _uniform_meta(echo: EchoData, kind: str) -> dict:
    ap = echo.aperture
    if ap.kind != kind or not ap.meta:
        raise ReconError(
            f"rma requires a uniform {kind} aperture; got {ap.kind!r} "
            "(use bpa for irregular or nonuniform apertures)")
    return ap.meta


def _kz_grid(k: np.ndarray, theta_cap: float,
             n_samples: int | None) -> np.ndarray:
    """Uniform kz targets on [2*k_min*cos(theta_cap), 2*k_max].

    The lower limit follows the steepest propagation angle the geometry can
    produce; stopping at 2*k_min (the on-axis band edge) would clip the
    off-axis support and cap the cross-range resolution.  The default count
    matches the source density (spacing >= 2*dk, never finer than the densest
    source line), so linear Stolt resampling cannot create energy.
    """
    lo = 2.0 * k[0] * np.cos(min(theta_cap, np.deg2rad(75.0)))
    hi = 2.0 * k[-1]
    dk = k[1] - k[0]
    if n_samples is None:
        n_samples = max(k.size, int(np.floor((hi - lo) / (2.0 * dk))) + 1)
    return np.linspace(lo, hi, int(n_samples))


def _theta_cap(meta: dict, grid: GridSpec) -> float:
    """Steepest element-to-voxel angle off the aperture normal."""
    half_x = (meta.get("Nx", 1) - 1) * meta.get("dx", 0.0) / 2.0
    half_y = (meta["Ny"] - 1) * meta["dy"] / 2.0
    cross = 0.0
    for name in ("x", "y"):
        if name in grid.axes:
            i = grid.axes.index(name)
            cross = max(cross, abs(grid.mins[i]), abs(grid.maxs[i]))
    iz = grid.axes.index("z")
    gap = abs(meta["Z0"]) - max(abs(grid.mins[iz]), abs(grid.maxs[iz]))
    gap = max(gap, 0.05 * abs(meta["Z0"]), 1e-6)
    return float(np.arctan((max(half_x, half_y) + cross) / gap))


def _stage(stages, spectrum, axes, names, label):
    """Record a pipeline snapshot with monotone axes (fftshifted as needed)."""
    if stages is None:
        return
    spec = spectrum
    out_axes = []
    for d, ax in enumerate(axes):
        ax = np.asarray(ax, dtype=np.float64)
        if ax.size > 1 and np.any(np.diff(ax) <= 0):  # fftfreq order
            order = np.argsort(ax)
            ax = ax[order]
            spec = np.take(spec, order, axis=d)
        out_axes.append(ax)
    stages.append(KSpace(spec, tuple(out_axes), tuple(names), label))


def rma_planar(echo: EchoData, grid: GridSpec, Z0: float | None = None,
               pad: int = 2, kz_samples: int | None = None,
               stolt_order: int = 1,
               keep_kspace: bool = False) -> tuple[ImageVolume, list[KSpace]]:
    """3-D planar-aperture range migration onto the requested grid.

    Returns (image, stages); stages holds the intermediate k-space snapshots
    when keep_kspace is set, else an empty list.
    """
    meta = _uniform_meta(echo, "planar")
    if tuple(grid.axes) != ("x", "y", "z"):
        raise ReconError("planar rma needs a 3-D grid over (x, y, z)")
    z0 = meta["Z0"] if Z0 is None else Z0
    nx, ny, dx, dy = meta["Nx"], meta["Ny"], meta["dx"], meta["dy"]
    k = echo.freq.wavenumbers
    s = echo.samples.reshape(ny, nx, k.size)  # element n = iy*Nx + ix

    stages: list[KSpace] | None = [] if keep_kspace else None
    f_hz = echo.freq.values
    _stage(stages, s,
           ((np.arange(ny) - (ny - 1) / 2) * dy,
            (np.arange(nx) - (nx - 1) / 2) * dx, f_hz),
           ("y", "x", "f"), "stage0_signal")

    nyp, nxp = pad * ny, pad * nx
    S, ky = spatial_spectrum(s, 0, nyp, dy, -(ny - 1) / 2 * dy)
    S, kx = spatial_spectrum(S, 1, nxp, dx, -(nx - 1) / 2 * dx)
    _stage(stages, S, (ky, kx, k), ("ky", "kx", "k"), "stage1_kspace")

    S = np.ascontiguousarray(S)
    from sarlab import _kernels
    _kernels.compensate_planar_kernel(S, ky, kx, k, z0)  # in place
    _stage(stages, S.copy() if keep_kspace else S, (ky, kx, k),
           ("ky", "kx", "k"), "stage2_compensated")

    kzg = _kz_grid(k, _theta_cap(meta, grid), kz_samples)
    kxy2 = ky[:, None] ** 2 + kx[None, :] ** 2
    S, _ = stolt_rectilinear(S, k, kzg, kxy2, order=stolt_order)
    _stage(stages, S, (ky, kx, kzg), ("ky", "kx", "kz"), "stage3_stolt")

    xv, yv, zv = (grid.axis_values(a) for a in ("x", "y", "z"))
    # kz axis first: it is contiguous and shrinks the array the most, making
    # the spatial reorder and the remaining transforms cheap
    img = zoom_eval(S, 2, kzg[0], kzg[1] - kzg[0], zv, -1)
    oy, ox = np.argsort(ky), np.argsort(kx)
    img = img[oy][:, ox]
    kys, kxs = ky[oy], kx[ox]
    img = zoom_eval(img, 0, kys[0], kys[1] - kys[0], yv, +1)
    img = zoom_eval(img, 1, kxs[0], kxs[1] - kxs[0], xv, +1)
    img = np.transpose(img, (1, 0, 2))  # (y, x, z) -> (x, y, z)
    vol = ImageVolume(img, tuple(grid.coordinate_arrays()), tuple(grid.axes),
                      {"algorithm": "rma-planar", "pad": pad,
                       "stolt_order": stolt_order})
    return vol, (stages or [])


def rma_linear(echo: EchoData, grid: GridSpec, Z0: float | None = None,
               pad: int = 2, kz_samples: int | None = None,
               stolt_order: int = 1,
               keep_kspace: bool = False) -> tuple[ImageVolume, list[KSpace]]:
    """2-D linear-aperture range migration onto a (y, z) grid."""
    meta = _uniform_meta(echo, "linear")
    if tuple(grid.axes) != ("y", "z"):
        raise ReconError("linear rma needs a 2-D grid over (y, z)")
    z0 = meta["Z0"] if Z0 is None else Z0
    ny, dy = meta["Ny"], meta["dy"]
    k = echo.freq.wavenumbers
    s = echo.samples  # [Ny, Nf]

    stages: list[KSpace] | None = [] if keep_kspace else None
    _stage(stages, s, ((np.arange(ny) - (ny - 1) / 2) * dy, echo.freq.values),
           ("y", "f"), "stage0_signal")

    S, ky = spatial_spectrum(s, 0, pad * ny, dy, -(ny - 1) / 2 * dy)
    _stage(stages, S, (ky, k), ("ky", "k"), "stage1_kspace")

    kz, prop = dispersion_kz(k[None, :], 0.0, ky[:, None])
    S = np.where(prop, S * np.exp(1j * kz * z0), 0.0)
    _stage(stages, S, (ky, k), ("ky", "k"), "stage2_compensated")

    kzg = _kz_grid(k, _theta_cap(meta, grid), kz_samples)
    S, _ = stolt_rectilinear(S, k, kzg, ky**2, order=stolt_order)
    _stage(stages, S, (ky, kzg), ("ky", "kz"), "stage3_stolt")

    yv, zv = grid.axis_values("y"), grid.axis_values("z")
    oy = np.argsort(ky)
    S = S[oy]
    kys = ky[oy]
    img = zoom_eval(S, 0, kys[0], kys[1] - kys[0], yv, +1)
    img = zoom_eval(img, 1, kzg[0], kzg[1] - kzg[0], zv, -1)
    vol = ImageVolume(img, tuple(grid.coordinate_arrays()), tuple(grid.axes),
                      {"algorithm": "rma-linear", "pad": pad,
                       "stolt_order": stolt_order})
    return vol, (stages or [])
