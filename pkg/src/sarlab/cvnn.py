"""Complex-valued convolution building blocks for learned image processing.

Real-valued convolution hardware forces complex convolution to be assembled
from real passes: the direct form uses four, the Gauss (Karatsuba-style)
variant three.  Both are true convolutions (kernel flipped); a correlate
flag provides the ML convention.  Activations apply a real nonlinearity to
the real and imaginary parts separately.
"""

from __future__ import annotations

import contextlib
import threading

import numpy as np
from scipy.signal import convolve2d

_counter = threading.local()


@contextlib.contextmanager
def count_real_convolutions():
    """Instrumentation hook: counts real-convolution passes in the block.

    Usage: with count_real_convolutions() as n: ...; n["count"] holds the
    total afterwards.
    """
    box = {"count": 0}
    stack = getattr(_counter, "stack", None)
    if stack is None:
        stack = _counter.stack = []
    stack.append(box)
    try:
        yield box
    finally:
        stack.pop()


def _real_conv2d(kernel: np.ndarray, image: np.ndarray, mode: str,
                 correlate: bool) -> np.ndarray:
    """The single real 2-D convolution primitive everything else counts."""
    for box in getattr(_counter, "stack", []):
        box["count"] += 1
    if correlate:
        kernel = kernel[::-1, ::-1]
    return convolve2d(image, kernel, mode=mode)


def _check_inputs(kernel: np.ndarray, image: np.ndarray, mode: str):
    if mode not in ("valid", "same"):
        raise ValueError(f"mode must be 'valid' or 'same', got {mode!r}")
    if kernel.ndim != 2 or image.ndim != 2:
        raise ValueError("kernel and input must be 2-D")
    if mode == "valid" and (kernel.shape[0] > image.shape[0]
                            or kernel.shape[1] > image.shape[1]):
        raise ValueError(f"kernel {kernel.shape} larger than input "
                         f"{image.shape} in valid mode")


def cconv2d_direct(kernel, image, mode: str = "valid",
                   correlate: bool = False) -> np.ndarray:
    """Complex 2-D convolution via four real convolutions.

    (W_R*z_R - W_I*z_I) + j(W_R*z_I + W_I*z_R), zero padding in same mode.
    """
    w = np.asarray(kernel)
    z = np.asarray(image)
    _check_inputs(w, z, mode)
    wr, wi = np.real(w).astype(np.float64), np.imag(w).astype(np.float64)
    zr, zi = np.real(z).astype(np.float64), np.imag(z).astype(np.float64)
    rr = _real_conv2d(wr, zr, mode, correlate)
    ii = _real_conv2d(wi, zi, mode, correlate)
    ri = _real_conv2d(wr, zi, mode, correlate)
    ir = _real_conv2d(wi, zr, mode, correlate)
    return (rr - ii) + 1j * (ri + ir)


def cconv2d_gauss(kernel, image, mode: str = "valid",
                  correlate: bool = False) -> np.ndarray:
    """Complex 2-D convolution via three real convolutions (Gauss's trick).

    t1 = W_R*z_R, t2 = W_I*z_I, t3 = (W_R+W_I)*(z_R+z_I);
    result = (t1 - t2) + j(t3 - t1 - t2).  Numerically equivalent to the
    direct form up to rounding.
    """
    w = np.asarray(kernel)
    z = np.asarray(image)
    _check_inputs(w, z, mode)
    wr, wi = np.real(w).astype(np.float64), np.imag(w).astype(np.float64)
    zr, zi = np.real(z).astype(np.float64), np.imag(z).astype(np.float64)
    t1 = _real_conv2d(wr, zr, mode, correlate)
    t2 = _real_conv2d(wi, zi, mode, correlate)
    t3 = _real_conv2d(wr + wi, zr + zi, mode, correlate)
    return (t1 - t2) + 1j * (t3 - t1 - t2)


def split_activation(z, kind: str = "crelu") -> np.ndarray:
    """F(z) = G(z_R) + j*G(z_I) with G = ReLU (crelu) or tanh (ctanh)."""
    z = np.asarray(z, dtype=np.complex128)
    if kind == "crelu":
        return np.maximum(z.real, 0.0) + 1j * np.maximum(z.imag, 0.0)
    if kind == "ctanh":
        return np.tanh(z.real) + 1j * np.tanh(z.imag)
    raise ValueError(f"unknown activation kind {kind!r}")
