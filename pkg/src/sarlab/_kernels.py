"""Numba kernels for the two hot paths: echo synthesis and backprojection.

Both exploit that the frequency axis is uniform: the per-frequency phasor
exp(-2j*k_f*R) is a geometric sequence in f, so each (element, scatterer) or
(voxel, element) pair costs two sin/cos evaluations plus one complex multiply
per frequency.  Accumulation order is fixed (inner loops sequential, prange
only over independent output rows), so parallel and serial runs agree to the
last bit.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True)
def echo_kernel(el, sc_pos, sc_refl, gains, two_k0, two_dk, out):
    """Accumulate sum_t g*sigma_t/R^2 * exp(-j*2*k_f*R) into out[N, F]."""
    n_el = el.shape[0]
    n_sc = sc_pos.shape[0]
    n_f = out.shape[1]
    use_gain = gains.shape[0] == n_el
    for n in prange(n_el):
        for t in range(n_sc):
            dx = sc_pos[t, 0] - el[n, 0]
            dy = sc_pos[t, 1] - el[n, 1]
            dz = sc_pos[t, 2] - el[n, 2]
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            g = gains[n, t] if use_gain else 1.0
            if g == 0.0:
                continue
            amp = g / (r * r)
            a0 = -two_k0 * r
            p = (amp * sc_refl[t]) * complex(math.cos(a0), math.sin(a0))
            aw = -two_dk * r
            w = complex(math.cos(aw), math.sin(aw))
            for f in range(n_f):
                out[n, f] += p
                p *= w


@njit(parallel=True, cache=True)
def bpa_kernel(el, vox, samples, two_k0, two_dk, out):
    """out[v] = sum_n sum_f samples[n, f] * exp(+j*2*k_f*R_vn)."""
    n_vox = vox.shape[0]
    n_el = el.shape[0]
    n_f = samples.shape[1]
    for v in prange(n_vox):
        acc = complex(0.0, 0.0)
        for n in range(n_el):
            dx = vox[v, 0] - el[n, 0]
            dy = vox[v, 1] - el[n, 1]
            dz = vox[v, 2] - el[n, 2]
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            a0 = two_k0 * r
            p = complex(math.cos(a0), math.sin(a0))
            aw = two_dk * r
            w = complex(math.cos(aw), math.sin(aw))
            for f in range(n_f):
                acc += samples[n, f] * p
                p *= w
        out[v] = acc


@njit(parallel=True, cache=True)
def stolt_resample_kernel(flat_spec, kxy_sq, k0, dk, kz_grid, out):
    """Per-line pullback resample onto uniform kz (linear interpolation).

    flat_spec: [L, nk] spectrum lines on the uniform k axis; kxy_sq: [L]
    transverse wavenumber magnitude squared; out: [L, len(kz_grid)].
    """
    n_lines, nk = flat_spec.shape
    n_out = kz_grid.shape[0]
    eps = 1e-9 * nk
    for li in prange(n_lines):
        rho2 = kxy_sq[li]
        for m in range(n_out):
            kz = kz_grid[m]
            if kz <= 0.0:
                out[li, m] = 0.0
                continue
            k_star = 0.5 * math.sqrt(kz * kz + rho2)
            idx = (k_star - k0) / dk
            if idx < -eps or idx > nk - 1 + eps:
                out[li, m] = 0.0
                continue
            if idx < 0.0:
                idx = 0.0
            elif idx > nk - 1:
                idx = nk - 1.0
            i0 = int(idx)
            if i0 > nk - 2:
                i0 = nk - 2
            w = idx - i0
            out[li, m] = (1.0 - w) * flat_spec[li, i0] \
                + w * flat_spec[li, i0 + 1]


@njit(parallel=True, cache=True)
def compensate_planar_kernel(spec, ky, kx, k, z0):
    """In-place standoff compensation spec *= exp(+j*kz*z0) on the
    propagating disc; evanescent entries are zeroed."""
    ny, nx, nk = spec.shape
    for iy in prange(ny):
        ky2 = ky[iy] * ky[iy]
        for ix in range(nx):
            rho2 = ky2 + kx[ix] * kx[ix]
            for m in range(nk):
                kz2 = 4.0 * k[m] * k[m] - rho2
                if kz2 < 0.0:
                    spec[iy, ix, m] = 0.0
                else:
                    ph = math.sqrt(kz2) * z0
                    spec[iy, ix, m] *= complex(math.cos(ph), math.sin(ph))


@njit(cache=True)
def min_pair_distance(el, sc_pos):
    """(min distance, element index, scatterer index) over all pairs."""
    best = 1e300
    bn = -1
    bt = -1
    for n in range(el.shape[0]):
        for t in range(sc_pos.shape[0]):
            dx = sc_pos[t, 0] - el[n, 0]
            dy = sc_pos[t, 1] - el[n, 1]
            dz = sc_pos[t, 2] - el[n, 2]
            r = math.sqrt(dx * dx + dy * dy + dz * dz)
            if r < best:
                best = r
                bn = n
                bt = t
    return best, bn, bt


def warmup():
    """Trigger JIT compilation on tiny inputs (useful before timing)."""
    el = np.zeros((1, 3))
    sc = np.ones((1, 3))
    refl = np.ones(1, dtype=np.complex128)
    out = np.zeros((1, 2), dtype=np.complex128)
    echo_kernel(el, sc, refl, np.empty((0, 0)), 1.0, 0.1, out)
    img = np.zeros(1, dtype=np.complex128)
    bpa_kernel(el, sc, out, 1.0, 0.1, img)
    min_pair_distance(el, sc)
    stolt_resample_kernel(out, np.zeros(1), 1.0, 0.1, np.ones(2),
                          np.zeros((1, 2), dtype=np.complex128))
    compensate_planar_kernel(np.zeros((1, 1, 2), dtype=np.complex128),
                             np.zeros(1), np.zeros(1), np.ones(2), 0.1)
