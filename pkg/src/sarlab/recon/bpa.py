"""Backprojection: the direct matched-filter inversion of the echo model.

Works for every aperture kind, including irregular point sets; cost is
O(N_voxels * N_elements * N_frequencies), which makes it the reference
oracle for the FFT reconstructors rather than the production path.
"""

from __future__ import annotations

import numpy as np

from sarlab import _kernels
from sarlab.forward import EchoData
from sarlab.grids import GridSpec, ImageVolume, image_from_grid


def bpa(echo: EchoData, grid: GridSpec, progress=None,
        chunk: int = 65536) -> ImageVolume:
    """sigma_hat(t) = sum_n sum_k s[n, k] * exp(+j*4*pi*f_k/c*||t - r_n||).

    Parallel over voxels; deterministic regardless of worker count.
    """
    vox = grid.voxel_positions()
    el = echo.aperture.positions
    k = echo.freq.wavenumbers
    two_k0 = 2.0 * k[0]
    two_dk = 2.0 * (k[1] - k[0])
    out = np.zeros(vox.shape[0], dtype=np.complex128)
    for start in range(0, vox.shape[0], chunk):
        stop = min(start + chunk, vox.shape[0])
        _kernels.bpa_kernel(el, vox[start:stop], echo.samples,
                            two_k0, two_dk, out[start:stop])
        if progress is not None:
            progress(stop / vox.shape[0])
    return image_from_grid(out.reshape(grid.shape), grid, {"algorithm": "bpa"})
