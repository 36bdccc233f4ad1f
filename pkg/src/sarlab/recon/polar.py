"""Range migration for polar (circular and cylindrical) apertures.

Pipeline: FFT over the rotation angle (and the vertical axis for cylinders)
-> azimuth compensation per harmonic -> inverse FFT back to an upsampled
angle grid -> polar Stolt resampling onto a rectangular wavenumber grid ->
inverse transform evaluated on the requested voxel grid.

Azimuth compensation: the monostatic ring response of harmonic q at in-plane
wavenumber kr is (up to smooth amplitude) the outgoing cylindrical wave
H2_q(kr*R0) (Hankel, second kind).  The textbook kernel built from
FFT[exp(-j*kr*R0*cos(theta))] is its Bessel-J part, which mixes the incoming
wave species and has zeros across the harmonic axis; dividing by H2_q instead
is stable (H2 has no zeros) and focuses all the energy, so that is what the
pipeline applies, zeroing the evanescent harmonics |q| >= kr*R0.  The J-based
kernel itself is still exposed as azimuth_kernel for analysis.
"""

from __future__ import annotations

import numpy as np
from scipy.special import hankel2

from sarlab.forward import EchoData
from sarlab.grids import GridSpec, ImageVolume, KSpace
from sarlab.recon.rect import ReconError, _stage
from sarlab.recon.zoomfft import spatial_spectrum, zoom_eval


def azimuth_kernel(ktheta, ky: float, k: float, R0: float,
                   Ntheta: int) -> tuple[np.ndarray, bool]:
    """G(ktheta) = DFT over theta of exp(-j*sqrt(4k^2-ky^2)*R0*cos(theta)).

    theta is uniform on [0, 2*pi) with Ntheta samples; ktheta holds integer
    harmonic numbers (DFT bins).  Returns (G, propagating); for |ky| >= 2k
    the kernel is zeroed and propagating is False.
    """
    q = np.asarray(ktheta)
    if Ntheta < 2:
        raise ReconError("Ntheta must be >= 2")
    if not np.allclose(q, np.round(q)):
        raise ReconError("ktheta must contain integer harmonic numbers")
    kr2 = 4.0 * k**2 - ky**2
    if kr2 < 0.0:
        return np.zeros(q.shape, dtype=np.complex128), False
    theta = 2.0 * np.pi * np.arange(Ntheta) / Ntheta
    kernel = np.exp(-1j * np.sqrt(kr2) * R0 * np.cos(theta))
    spec = np.fft.fft(kernel)
    return spec[np.round(q).astype(np.int64) % Ntheta], True


def _hankel_compensation(q: np.ndarray, kr: np.ndarray, R0: float,
                         cutoff: float = 0.98) -> np.ndarray:
    """Per-harmonic azimuth filter (-j)^q / H2_q(kr*R0), even in q.

    Harmonics at or beyond the evanescent turnover |q| >= cutoff*kr*R0 are
    zeroed.  kr may be any broadcastable array.
    """
    absq = np.abs(q).astype(np.int64)
    kappa = kr * R0
    ok = absq < cutoff * kappa
    h = hankel2(absq, np.where(kappa > 0, kappa, 1.0))
    twist = (-1j) ** (absq % 4)
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(ok, twist / h, 0.0)
    return np.nan_to_num(w)


def stolt_polar(spectrum: np.ndarray, k_axis: np.ndarray,
                ku_axis: np.ndarray, kv_axis: np.ndarray,
                ky: float = 0.0) -> np.ndarray:
    """Resample sigma(alpha, k) onto the rectangular (ku, kv) wavenumber grid.

    For each target node: alpha* = atan2(kv, ku) and the radial sample
    k* = sqrt(ku^2 + kv^2 + ky^2)/2 (the in-plane radius is kr = 2k projected
    by the out-of-plane ky).  Bilinear interpolation, periodic in alpha,
    linear along the uniform k axis; outside the annulus support -> 0, and
    the degenerate node ku = kv = 0 -> 0.
    """
    k_axis = np.asarray(k_axis, dtype=np.float64)
    n_alpha, nk = spectrum.shape
    if k_axis.size != nk or nk < 2:
        raise ReconError("spectrum must be [n_alpha, len(k_axis)] with >= 2 k")
    dk = k_axis[1] - k_axis[0]
    if dk <= 0:
        raise ReconError("degenerate k axis")
    ku = np.asarray(ku_axis, dtype=np.float64)
    kv = np.asarray(kv_axis, dtype=np.float64)
    KU, KV = np.meshgrid(ku, kv, indexing="ij")
    kr_sq = KU**2 + KV**2
    k_star = 0.5 * np.sqrt(kr_sq + ky**2)
    alpha = np.mod(np.arctan2(KV, KU), 2.0 * np.pi)

    ik = (k_star - k_axis[0]) / dk
    ia = alpha / (2.0 * np.pi / n_alpha)
    valid = (ik >= 0.0) & (ik <= nk - 1) & (kr_sq > 0.0)

    i0 = np.clip(np.floor(ik).astype(np.int64), 0, nk - 2)
    wk = ik - i0
    a0 = np.floor(ia).astype(np.int64) % n_alpha
    wa = ia - np.floor(ia)
    a1 = (a0 + 1) % n_alpha
    out = ((1 - wa) * (1 - wk) * spectrum[a0, i0]
           + (1 - wa) * wk * spectrum[a0, i0 + 1]
           + wa * (1 - wk) * spectrum[a1, i0]
           + wa * wk * spectrum[a1, i0 + 1])
    return np.where(valid, out, 0.0)


def _rect_k_axis(k_max_r: float, span: float, margin: float,
                 max_samples: int = 4096) -> np.ndarray:
    """Uniform rectangular wavenumber axis covering [-2k_max, 2k_max] with a
    sample density giving an alias-free period of margin*span."""
    dk_rect = 2.0 * np.pi / (margin * span)
    n = int(np.ceil(2.0 * k_max_r / dk_rect)) + 1
    if n > max_samples:
        raise ReconError(
            f"rectangular k-grid needs {n} samples (> {max_samples}); "
            "shrink the grid span or reduce the margin")
    return np.linspace(-k_max_r, k_max_r, n)


def _axis_half_span(grid: GridSpec, name: str) -> float:
    i = grid.axes.index(name)
    return max(abs(grid.mins[i]), abs(grid.maxs[i]))


def _upsampled_alpha_idft(M: np.ndarray, upsample: int) -> np.ndarray:
    """Inverse DFT over the harmonic axis 0 onto an upsample-times finer
    angle grid (exact for the band-limited azimuth spectrum)."""
    n = M.shape[0]
    n_up = upsample * n
    shifted = np.fft.fftshift(M, axes=0)
    shape = (n_up,) + M.shape[1:]
    padded = np.zeros(shape, dtype=np.complex128)
    lo = (n_up - n) // 2
    padded[lo:lo + n] = shifted
    padded = np.fft.ifftshift(padded, axes=0)
    return np.fft.ifft(padded, axis=0, norm="ortho")


def _polar_rma(echo: EchoData, grid: GridSpec, plane: tuple[str, str],
               with_height: bool, pad: int, alpha_upsample: int,
               margin: float, keep_kspace: bool,
               algorithm: str) -> tuple[ImageVolume, list[KSpace]]:
    meta = echo.aperture.meta
    R0 = meta["R0"]
    n_theta = meta["Ntheta"]
    k = echo.freq.wavenumbers
    dk = k[1] - k[0]
    stages: list[KSpace] | None = [] if keep_kspace else None
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    q = np.fft.fftfreq(n_theta, d=1.0 / n_theta).astype(np.int64)

    if with_height:
        ny, dy = meta["Ny"], meta["dy"]
        s = echo.samples.reshape(n_theta, ny, k.size)  # theta-major
        _stage(stages, s, (theta, (np.arange(ny) - (ny - 1) / 2) * dy,
                           echo.freq.values), ("theta", "y", "f"),
               "stage0_signal")
        S = np.fft.fft(s, axis=0, norm="ortho")
        S, ky = spatial_spectrum(S, 1, pad * ny, dy, -(ny - 1) / 2 * dy)
        _stage(stages, S, (q.astype(float), ky, k), ("ktheta", "ky", "k"),
               "stage1_kspace")
        kr = np.sqrt(np.maximum(4.0 * k[None, :] ** 2 - ky[:, None] ** 2, 0.0))
        W = _hankel_compensation(q[:, None, None], kr[None, :, :], R0)
    else:
        s = echo.samples  # [Ntheta, Nf]
        ky = None
        _stage(stages, s, (theta, echo.freq.values), ("theta", "f"),
               "stage0_signal")
        S = np.fft.fft(s, axis=0, norm="ortho")
        _stage(stages, S, (q.astype(float), k), ("ktheta", "k"),
               "stage1_kspace")
        kr = 2.0 * k
        W = _hankel_compensation(q[:, None], kr[None, :], R0)

    M = S * W
    if with_height:
        _stage(stages, M, (q.astype(float), ky, k), ("ktheta", "ky", "k"),
               "stage2_compensated")
    else:
        _stage(stages, M, (q.astype(float), k), ("ktheta", "k"),
               "stage2_compensated")

    sigma_pol = _upsampled_alpha_idft(M, alpha_upsample)

    u_name, v_name = plane
    span_u = 2.0 * _axis_half_span(grid, u_name)
    span_v = 2.0 * _axis_half_span(grid, v_name)
    kug = _rect_k_axis(2.0 * k[-1], span_u, margin)
    kvg = _rect_k_axis(2.0 * k[-1], span_v, margin)

    if with_height:
        rect = np.empty((kug.size, ky.size, kvg.size), dtype=np.complex128)
        for iy in range(ky.size):
            rect[:, iy, :] = stolt_polar(sigma_pol[:, iy, :], k, kug, kvg,
                                         ky=float(ky[iy]))
        _stage(stages, rect, (kug, ky, kvg), ("kx", "ky", "kz"),
               "stage3_stolt")
        uv, yv, vv = (grid.axis_values(a) for a in ("x", "y", "z"))
        oy = np.argsort(ky)
        rect = rect[:, oy, :]
        kys = ky[oy]
        img = zoom_eval(rect, 0, kug[0], kug[1] - kug[0], uv, +1)
        img = zoom_eval(img, 1, kys[0], kys[1] - kys[0], yv, +1)
        img = zoom_eval(img, 2, kvg[0], kvg[1] - kvg[0], vv, +1)
    else:
        rect = stolt_polar(sigma_pol, k, kug, kvg, ky=0.0)
        _stage(stages, rect, (kug, kvg), ("ky", "kz"), "stage3_stolt")
        uv = grid.axis_values(u_name)
        vv = grid.axis_values(v_name)
        img = zoom_eval(rect, 0, kug[0], kug[1] - kug[0], uv, +1)
        img = zoom_eval(img, 1, kvg[0], kvg[1] - kvg[0], vv, +1)

    vol = ImageVolume(img, tuple(grid.coordinate_arrays()), tuple(grid.axes),
                      {"algorithm": algorithm, "pad": pad,
                       "alpha_upsample": alpha_upsample, "margin": margin})
    return vol, (stages or [])


def rma_cylindrical(echo: EchoData, grid: GridSpec, pad: int = 2,
                    alpha_upsample: int = 8, margin: float = 4.0,
                    keep_kspace: bool = False) -> tuple[ImageVolume, list[KSpace]]:
    """3-D cylindrical-aperture range migration onto an (x, y, z) grid.

    The rotation circle lies in the x-z plane; y is the cylinder axis.
    """
    if echo.aperture.kind != "cylindrical" or not echo.aperture.meta:
        raise ReconError("rma_cylindrical requires a uniform cylindrical "
                         "aperture (use bpa otherwise)")
    if tuple(grid.axes) != ("x", "y", "z"):
        raise ReconError("cylindrical rma needs a 3-D grid over (x, y, z)")
    return _polar_rma(echo, grid, plane=("x", "z"), with_height=True, pad=pad,
                      alpha_upsample=alpha_upsample, margin=margin,
                      keep_kspace=keep_kspace, algorithm="rma-cylindrical")


def rma_circular(echo: EchoData, grid: GridSpec, alpha_upsample: int = 8,
                 margin: float = 4.0,
                 keep_kspace: bool = False) -> tuple[ImageVolume, list[KSpace]]:
    """2-D circular-aperture range migration onto a (y, z) grid.

    The scan circle lies in the y-z plane (single ring, no height axis).
    """
    if echo.aperture.kind != "circular" or not echo.aperture.meta:
        raise ReconError("rma_circular requires a uniform circular aperture "
                         "(use bpa otherwise)")
    if tuple(grid.axes) != ("y", "z"):
        raise ReconError("circular rma needs a 2-D grid over (y, z)")
    return _polar_rma(echo, grid, plane=("y", "z"), with_height=False, pad=1,
                      alpha_upsample=alpha_upsample, margin=margin,
                      keep_kspace=keep_kspace, algorithm="rma-circular")
