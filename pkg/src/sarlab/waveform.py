"""Radar waveform parameter sets and their derived range/Doppler metrics.

Three continuous-wave signaling schemes are modeled: FMCW (linear chirps),
PMCW (binary phase codes), and OFDM (orthogonal subcarriers).  Each scheme
yields the same bundle of derived metrics (bandwidth, range resolution,
ambiguity limits, Doppler resolution, center wavelength) plus the stepped
frequency axis the echo simulator actually sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sarlab.constants import C


class WaveformError(ValueError):
    """Raised for invalid waveform parameters."""


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not np.isfinite(value) or value <= 0:
            raise WaveformError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class FmcwParams:
    """Linear-chirp FMCW parameters.

    f0: start frequency [Hz], K: ramp slope [Hz/s], Tc: chirp duration [s],
    Tr: chirp repetition interval [s], Nc: chirp count, fS: fast-time sampling
    rate [Hz], Nf: number of frequency samples used for simulation.
    """

    f0: float
    K: float
    Tc: float
    Tr: float
    Nc: int
    fS: float
    Nf: int

    def __post_init__(self):
        _require_positive(f0=self.f0, K=self.K, Tc=self.Tc, Tr=self.Tr,
                          Nc=self.Nc, fS=self.fS)
        if self.Tr < self.Tc:
            raise WaveformError(f"Tr ({self.Tr}) must be >= Tc ({self.Tc})")
        if self.Nf < 2:
            raise WaveformError(f"Nf must be >= 2, got {self.Nf}")


@dataclass(frozen=True)
class PmcwParams:
    """Phase-coded CW parameters.

    fc: carrier [Hz], B: chip bandwidth [Hz], Td: code duration [s],
    Ncode: number of codes.
    """

    fc: float
    B: float
    Td: float
    Ncode: int

    def __post_init__(self):
        _require_positive(fc=self.fc, B=self.B, Td=self.Td, Ncode=self.Ncode)


@dataclass(frozen=True)
class OfdmParams:
    """OFDM radar parameters.

    fc: carrier (band center) [Hz], Nsc: subcarrier count, df: subcarrier
    spacing [Hz], Tcp: cyclic-prefix duration [s], Nsym: symbol count,
    Tr: pulse repetition interval [s].  Tsym = 1/df and B = Nsc*df.
    """

    fc: float
    Nsc: int
    df: float
    Tcp: float
    Nsym: int
    Tr: float

    def __post_init__(self):
        _require_positive(fc=self.fc, Nsc=self.Nsc, df=self.df, Tcp=self.Tcp,
                          Nsym=self.Nsym, Tr=self.Tr)

    @property
    def Tsym(self) -> float:
        return 1.0 / self.df


@dataclass(frozen=True)
class DerivedMetrics:
    """Derived waveform metrics: B [Hz], deltaR/Rmax [m], vmax/deltaV [m/s],
    lambdaC [m]."""

    B: float
    deltaR: float
    Rmax: float
    vmax: float
    deltaV: float
    lambdaC: float

    def __post_init__(self):
        _require_positive(B=self.B, deltaR=self.deltaR, Rmax=self.Rmax,
                          vmax=self.vmax, deltaV=self.deltaV, lambdaC=self.lambdaC)

    def as_dict(self) -> dict:
        return {
            "B": self.B, "deltaR": self.deltaR, "Rmax": self.Rmax,
            "vmax": self.vmax, "deltaV": self.deltaV, "lambdaC": self.lambdaC,
        }


@dataclass(frozen=True)
class FrequencyAxis:
    """Uniformly spaced, strictly increasing stepped-frequency axis [Hz]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 2:
            raise WaveformError("frequency axis needs at least 2 samples")
        if v[0] <= 0:
            raise WaveformError("frequencies must be positive")
        d = np.diff(v)
        if np.any(d <= 0):
            raise WaveformError("frequency axis must be strictly increasing")
        if np.max(np.abs(d - d[0])) > 16 * np.finfo(np.float64).eps * v[-1]:
            raise WaveformError("frequency axis must be uniformly spaced")

    @property
    def df(self) -> float:
        return float(self.values[1] - self.values[0])

    @property
    def f_center(self) -> float:
        return float(0.5 * (self.values[0] + self.values[-1]))

    @property
    def wavenumbers(self) -> np.ndarray:
        """Radial wavenumbers k = 2*pi*f/c [rad/m]."""
        return 2.0 * np.pi * self.values / C

    def __len__(self) -> int:
        return self.values.size


def fmcw_derived(p: FmcwParams) -> DerivedMetrics:
    """Derived metrics of an FMCW chirp sequence.

    B = K*Tc, deltaR = c/(2B), Rmax = fS*c/(2K) (beat-frequency limited),
    lambdaC at band center, vmax = lambdaC/(4*Tr), deltaV = lambdaC/(2*Nc*Tr).
    """
    B = p.K * p.Tc
    lam = C / (p.f0 + B / 2.0)
    return DerivedMetrics(
        B=B,
        deltaR=C / (2.0 * B),
        Rmax=p.fS * C / (2.0 * p.K),
        vmax=lam / (4.0 * p.Tr),
        deltaV=lam / (2.0 * p.Nc * p.Tr),
        lambdaC=lam,
    )


def pmcw_derived(p: PmcwParams) -> DerivedMetrics:
    """Derived metrics of a PMCW code sequence (band centered on fc)."""
    lam = C / p.fc
    return DerivedMetrics(
        B=p.B,
        deltaR=C / (2.0 * p.B),
        Rmax=C * p.Td / 2.0,
        vmax=lam / (4.0 * p.Td),
        deltaV=lam / (2.0 * p.Ncode * p.Td),
        lambdaC=lam,
    )


def ofdm_derived(p: OfdmParams) -> DerivedMetrics:
    """Derived metrics of an OFDM frame (band centered on fc)."""
    B = p.Nsc * p.df
    lam = C / p.fc
    return DerivedMetrics(
        B=B,
        deltaR=C / (2.0 * B),
        Rmax=C * p.Tcp / 2.0,
        vmax=lam / (4.0 * p.Tr),
        deltaV=lam / (2.0 * p.Nsym * p.Tsym),
        lambdaC=lam,
    )


def frequency_axis(f0: float, B: float, Nf: int) -> FrequencyAxis:
    """Nf uniform frequency samples on [f0, f0+B], endpoints included."""
    _require_positive(f0=f0, B=B)
    if Nf < 2:
        raise WaveformError(f"Nf must be >= 2, got {Nf}")
    return FrequencyAxis(np.linspace(f0, f0 + B, int(Nf)))


def simulation_band(kind: str, params) -> tuple[float, float, int]:
    """(f0, B, Nf) swept by the stepped-frequency simulator for a scheme.

    FMCW sweeps [f0, f0+B] with its own Nf; PMCW and OFDM are treated as
    bands centered on the carrier.  OFDM samples one frequency per
    subcarrier; PMCW has no native frequency-sample count, so the config
    layer must supply one.
    """
    if kind == "fmcw":
        return params.f0, params.K * params.Tc, params.Nf
    if kind == "ofdm":
        B = params.Nsc * params.df
        return params.fc - B / 2.0, B, params.Nsc
    if kind == "pmcw":
        return params.fc - params.B / 2.0, params.B, 0
    raise WaveformError(f"unknown waveform kind {kind!r}")
