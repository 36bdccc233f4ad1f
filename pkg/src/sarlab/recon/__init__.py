"""Image reconstruction: backprojection and FFT-based range migration."""

from sarlab.recon.bpa import bpa
from sarlab.recon.rect import dispersion_kz, rma_linear, rma_planar, stolt_rectilinear
from sarlab.recon.polar import azimuth_kernel, rma_circular, rma_cylindrical, stolt_polar

ALGORITHMS = ("bpa", "rma-linear", "rma-planar", "rma-circular", "rma-cylindrical")

__all__ = [
    "ALGORITHMS",
    "azimuth_kernel",
    "bpa",
    "dispersion_kz",
    "rma_circular",
    "rma_cylindrical",
    "rma_linear",
    "rma_planar",
    "stolt_polar",
    "stolt_rectilinear",
]
