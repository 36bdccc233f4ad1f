"""Forward echo model: complex scattered signal over elements and frequencies.

For aperture element r_n and frequency f the received sample is

    s[n, k] = sum_t g(n, t) * sigma(t) / ||t - r_n||^2 * exp(-j*4*pi*f_k/c*||t - r_n||)

with g an optional antenna gain weight (1 without a pattern).  The 1/R^2
spreading is kept even though the FFT reconstructors are phase-only; real
data has it, and the mismatch exercises reconstruction robustness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sarlab import _kernels
from sarlab.apertures import Aperture
from sarlab.scene import Scene
from sarlab.waveform import FrequencyAxis

MIN_STANDOFF = 1e-6  # [m] guards the 1/R^2 singularity


class ForwardModelError(ValueError):
    """Raised for invalid forward-model configurations."""


@dataclass(frozen=True)
class EchoData:
    """Raw signal-domain data: complex samples [N_el, N_f] plus its axes."""

    samples: np.ndarray
    freq: FrequencyAxis
    aperture: Aperture

    def __post_init__(self):
        s = np.ascontiguousarray(np.asarray(self.samples, dtype=np.complex128))
        if s.ndim != 2:
            raise ForwardModelError("samples must be [N_el, N_f]")
        if s.shape[0] != self.aperture.n_elements or s.shape[1] != len(self.freq):
            raise ForwardModelError(
                f"samples shape {s.shape} inconsistent with aperture "
                f"({self.aperture.n_elements} elements) and frequency axis "
                f"({len(self.freq)} samples)")
        if not np.all(np.isfinite(s.view(np.float64))):
            raise ForwardModelError("samples must be finite")
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class GainPattern:
    """Antenna gain on a regular (theta, phi) grid, linear amplitude scale.

    theta is the polar angle from the antenna boresight (+z of the element
    frame), phi the azimuth about it.
    """

    theta: np.ndarray  # [Nt] ascending, radians
    phi: np.ndarray    # [Np] ascending, radians
    gain: np.ndarray   # [Nt, Np] linear, >= 0

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=np.float64)
        ph = np.asarray(self.phi, dtype=np.float64)
        g = np.asarray(self.gain, dtype=np.float64)
        if th.ndim != 1 or ph.ndim != 1 or g.shape != (th.size, ph.size):
            raise ForwardModelError("gain table must be [len(theta), len(phi)]")
        if np.any(np.diff(th) <= 0) or np.any(np.diff(ph) <= 0):
            raise ForwardModelError("theta/phi axes must be strictly increasing")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ForwardModelError("gain must be finite and >= 0")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)
        object.__setattr__(self, "gain", g)


def gain_lookup(pattern: GainPattern, directions) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear gain for unit direction vectors (in the element frame).

    Returns (gain, covered): directions outside the table's angular coverage
    get gain 0 and covered=False.
    """
    d = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    norms = np.linalg.norm(d, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ForwardModelError("directions must be unit vectors")
    theta = np.arccos(np.clip(d[:, 2], -1.0, 1.0))
    phi = np.arctan2(d[:, 1], d[:, 0])
    # wrap phi by 2*pi into the table's base interval when possible
    phi = pattern.phi[0] + np.mod(phi - pattern.phi[0], 2.0 * np.pi)

    covered = ((theta >= pattern.theta[0] - 1e-12)
               & (theta <= pattern.theta[-1] + 1e-12)
               & (phi >= pattern.phi[0] - 1e-12)
               & (phi <= pattern.phi[-1] + 1e-12))

    th = np.clip(theta, pattern.theta[0], pattern.theta[-1])
    ph = np.clip(phi, pattern.phi[0], pattern.phi[-1])
    ti = np.clip(np.searchsorted(pattern.theta, th, side="right") - 1,
                 0, pattern.theta.size - 2)
    pi = np.clip(np.searchsorted(pattern.phi, ph, side="right") - 1,
                 0, pattern.phi.size - 2)
    tw = (th - pattern.theta[ti]) / (pattern.theta[ti + 1] - pattern.theta[ti])
    pw = (ph - pattern.phi[pi]) / (pattern.phi[pi + 1] - pattern.phi[pi])
    g = ((1 - tw) * (1 - pw) * pattern.gain[ti, pi]
         + (1 - tw) * pw * pattern.gain[ti, pi + 1]
         + tw * (1 - pw) * pattern.gain[ti + 1, pi]
         + tw * pw * pattern.gain[ti + 1, pi + 1])
    g = np.where(covered, g, 0.0)
    return g, covered


def load_gain_csv(path) -> GainPattern:
    """Load a gain pattern CSV: header theta_rad,phi_rad,gain_db, rows in
    theta-major order over a regular grid.  dB values are converted to
    linear amplitude (10^(dB/20))."""
    raw = np.genfromtxt(path, delimiter=",", names=True)
    required = ("theta_rad", "phi_rad", "gain_db")
    if raw.dtype.names is None or tuple(raw.dtype.names) != required:
        raise ForwardModelError(
            f"gain CSV must have header {','.join(required)}")
    theta = np.unique(raw["theta_rad"])
    phi = np.unique(raw["phi_rad"])
    if raw.size != theta.size * phi.size:
        raise ForwardModelError("gain CSV is not a full regular grid")
    order = np.lexsort((raw["phi_rad"], raw["theta_rad"]))
    gain_db = raw["gain_db"][order].reshape(theta.size, phi.size)
    return GainPattern(theta, phi, 10.0 ** (gain_db / 20.0))


def element_boresights(aperture: Aperture, scene_center=None) -> np.ndarray:
    """Unit boresight per element: rectilinear apertures look along -z (or +z
    when the scene is above), polar apertures look inward; irregular ones look
    at the scene center."""
    pos = aperture.positions
    n = aperture.n_elements
    if aperture.kind in ("linear", "planar"):
        sign = -np.sign(pos[0, 2]) if pos[0, 2] != 0 else -1.0
        b = np.tile([0.0, 0.0, sign], (n, 1))
    elif aperture.kind == "circular":
        b = -pos / np.linalg.norm(pos, axis=1, keepdims=True)
    elif aperture.kind == "cylindrical":
        radial = pos.copy()
        radial[:, 1] = 0.0
        b = -radial / np.linalg.norm(radial, axis=1, keepdims=True)
    else:
        center = np.zeros(3) if scene_center is None else np.asarray(scene_center)
        b = center[None, :] - pos
        norms = np.linalg.norm(b, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        b = b / norms
    return b


def _pair_gains(aperture: Aperture, scene: Scene, pattern: GainPattern) -> np.ndarray:
    """Gain per (element, scatterer), frequency-independent."""
    el = aperture.positions
    sc = scene.positions_array()
    bores = element_boresights(aperture, sc.mean(axis=0))
    # per-element orthonormal frame (e1, e2, boresight)
    ref = np.tile([1.0, 0.0, 0.0], (el.shape[0], 1))
    parallel = np.abs(np.sum(ref * bores, axis=1)) > 0.9
    ref[parallel] = [0.0, 1.0, 0.0]
    e1 = ref - bores * np.sum(ref * bores, axis=1, keepdims=True)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(bores, e1)

    gains = np.empty((el.shape[0], sc.shape[0]))
    for n in range(el.shape[0]):
        d = sc - el[n]
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        local = np.column_stack([d @ e1[n], d @ e2[n], d @ bores[n]])
        gains[n], _ = gain_lookup(pattern, local)
    return gains


def simulate_echo(aperture: Aperture, scene: Scene, freq: FrequencyAxis,
                  gain: GainPattern | None = None,
                  progress=None, chunk: int = 512) -> EchoData:
    """Synthesize the echo matrix [N_el, N_f] for a scene.

    Deterministic; parallel over elements.  progress, if given, is called
    with a float in [0, 1] after each element chunk (it must be reentrant:
    chunks may be dispatched from worker context).
    """
    el = aperture.positions
    sc_pos = np.ascontiguousarray(scene.positions_array())
    sc_refl = np.ascontiguousarray(scene.reflectivity_array())

    dmin, bn, bt = _kernels.min_pair_distance(el, sc_pos)
    if dmin < MIN_STANDOFF:
        raise ForwardModelError(
            f"scatterer {bt} at {tuple(sc_pos[bt])} is within {MIN_STANDOFF} m "
            f"of element {bn} at {tuple(el[bn])} (distance {dmin:.3e} m)")

    gains = (_pair_gains(aperture, scene, gain) if gain is not None
             else np.empty((0, 0)))

    k = freq.wavenumbers
    two_k0 = 2.0 * k[0]
    two_dk = 2.0 * (k[1] - k[0])
    out = np.zeros((el.shape[0], len(freq)), dtype=np.complex128)
    for start in range(0, el.shape[0], chunk):
        stop = min(start + chunk, el.shape[0])
        g = gains[start:stop] if gains.size else gains
        _kernels.echo_kernel(el[start:stop], sc_pos, sc_refl, g,
                             two_k0, two_dk, out[start:stop])
        if progress is not None:
            progress(stop / el.shape[0])
    return EchoData(out, freq, aperture)


def add_noise(echo: EchoData, snr_db: float | None, seed: int = 0) -> EchoData:
    """Add circularly-symmetric complex Gaussian noise at the requested SNR.

    snr_db=None (or +inf) returns the echo unchanged.  Noise power is set
    from the mean signal power: 10*log10(P_sig/P_noise) = snr_db.
    """
    if snr_db is None or np.isinf(snr_db):
        return echo
    p_sig = np.mean(np.abs(echo.samples) ** 2)
    if p_sig == 0:
        raise ForwardModelError("cannot set finite SNR on a zero-energy echo")
    p_noise = p_sig / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    shape = echo.samples.shape
    noise = np.sqrt(p_noise / 2.0) * (rng.standard_normal(shape)
                                      + 1j * rng.standard_normal(shape))
    return EchoData(echo.samples + noise, echo.freq, echo.aperture)
