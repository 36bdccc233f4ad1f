"""Pipeline engine: the single code path behind both the CLI and the service.

Runs are pure functions of their config, and results are persisted as SARB
containers, so a pipeline executed through either surface produces
bit-identical bytes.
"""

from __future__ import annotations

import numpy as np

from sarlab import recon
from sarlab.analysis import (cylindrical_resolution, planar_resolution,
                             psf_widths)
from sarlab.apertures import Aperture, aperture_extent, check_sampling
from sarlab.config import (ConfigError, PipelineConfig, build_aperture,
                           build_grid, build_scene, build_waveform,
                           config_hash, parse_pipeline_config)
from sarlab.constants import C
from sarlab.forward import EchoData, add_noise, load_gain_csv, simulate_echo
from sarlab.grids import GridSpec, ImageVolume
from sarlab.scene import Scatterer, point_scene
from sarlab.waveform import FrequencyAxis


def _scaled(progress, lo: float, hi: float):
    if progress is None:
        return None
    return lambda frac: progress(lo + (hi - lo) * frac)


def simulate_to_arrays(cfg: PipelineConfig, progress=None) -> tuple[dict, dict]:
    """Run the forward model; returns (arrays, meta) ready for SARB."""
    kind, _, derived, freq = build_waveform(cfg.waveform)
    aperture = build_aperture(cfg.aperture)
    check_sampling(aperture, derived.lambdaC)
    scene = build_scene(cfg.scene)
    gain = load_gain_csv(cfg.gain_csv) if cfg.gain_csv else None
    echo = simulate_echo(aperture, scene, freq, gain=gain, progress=progress)
    if cfg.noise is not None:
        echo = add_noise(echo, cfg.noise.snr_db, cfg.noise.seed)
    arrays = {
        "echo": echo.samples,
        "freq": freq.values,
        "elements": aperture.positions,
    }
    meta = {
        "aperture": cfg.aperture.model_dump(),
        "waveform_type": kind,
        "derived": derived.as_dict(),
        "config_hash": config_hash(cfg),
    }
    return arrays, meta


def echo_from_arrays(arrays: dict, meta: dict) -> EchoData:
    """Rebuild EchoData from persisted arrays plus header meta."""
    freq = FrequencyAxis(arrays["freq"])
    ap_cfg = meta.get("aperture")
    if ap_cfg:
        from sarlab.config import ApertureConfig
        from pydantic import TypeAdapter
        aperture = build_aperture(TypeAdapter(ApertureConfig).validate_python(ap_cfg))
        if not np.array_equal(aperture.positions.shape,
                              np.asarray(arrays["elements"]).shape):
            raise ConfigError("echo meta aperture disagrees with elements array")
    else:
        aperture = Aperture("irregular", arrays["elements"])
    return EchoData(arrays["echo"], freq, aperture)


def reconstruct_image(echo: EchoData, grid: GridSpec, algo: str,
                      tuning=None, keep_kspace: bool = False,
                      progress=None):
    """Dispatch to a reconstructor; returns (ImageVolume, stages)."""
    pad = getattr(tuning, "pad", 2)
    order = getattr(tuning, "stolt_order", 1)
    upsample = getattr(tuning, "alpha_upsample", 8)
    margin = getattr(tuning, "margin", 4.0)
    if algo == "bpa":
        return recon.bpa(echo, grid, progress=progress), []
    if algo == "rma-linear":
        return recon.rma_linear(echo, grid, pad=pad, stolt_order=order,
                                keep_kspace=keep_kspace)
    if algo == "rma-planar":
        return recon.rma_planar(echo, grid, pad=pad, stolt_order=order,
                                keep_kspace=keep_kspace)
    if algo == "rma-circular":
        return recon.rma_circular(echo, grid, alpha_upsample=upsample,
                                  margin=margin, keep_kspace=keep_kspace)
    if algo == "rma-cylindrical":
        return recon.rma_cylindrical(echo, grid, pad=pad,
                                     alpha_upsample=upsample, margin=margin,
                                     keep_kspace=keep_kspace)
    raise ConfigError(f"unknown algorithm {algo!r}", "algo")


def image_to_arrays(image: ImageVolume, stages=()) -> dict:
    arrays = {"image": image.voxels}
    for d, (name, ax) in enumerate(zip(image.axis_names, image.axes)):
        arrays[f"image_axis_{name}"] = ax
    for st in stages:
        arrays[st.stage] = st.spectrum
        for d, ax in enumerate(st.axes):
            arrays[f"{st.stage}_axis{d}"] = ax
    return arrays


def run_pipeline(raw_config: dict, progress=None,
                 keep_kspace: bool | None = None) -> tuple[dict, dict]:
    """simulate + reconstruct from one config; returns (arrays, meta)."""
    cfg = parse_pipeline_config(raw_config)
    if keep_kspace is None:
        keep_kspace = cfg.recon.keep_kspace
    _, _, derived, freq = build_waveform(cfg.waveform)
    aperture = build_aperture(cfg.aperture)
    check_sampling(aperture, derived.lambdaC)
    scene = build_scene(cfg.scene)
    grid = build_grid(cfg, derived)
    gain = load_gain_csv(cfg.gain_csv) if cfg.gain_csv else None
    echo = simulate_echo(aperture, scene, freq, gain=gain,
                         progress=_scaled(progress, 0.0, 0.5))
    if cfg.noise is not None:
        echo = add_noise(echo, cfg.noise.snr_db, cfg.noise.seed)
    image, stages = reconstruct_image(echo, grid, cfg.algo, cfg.recon,
                                      keep_kspace=keep_kspace,
                                      progress=_scaled(progress, 0.5, 1.0))
    if progress is not None:
        progress(1.0)
    arrays = image_to_arrays(image, stages)
    meta = {"algorithm": cfg.algo, "config_hash": config_hash(cfg),
            "derived": derived.as_dict(), "axes": list(image.axis_names)}
    return arrays, meta


def predicted_resolution(cfg: PipelineConfig, derived, grid: GridSpec) -> dict:
    """Eq-based per-axis predictions for the configured system."""
    aperture = build_aperture(cfg.aperture)
    if cfg.aperture.kind in ("linear", "planar"):
        dx_a, dy_a = aperture_extent(aperture)
        zc = 0.0
        if "z" in grid.axes:
            i = grid.axes.index("z")
            zc = 0.5 * (grid.mins[i] + grid.maxs[i])
        z_ref = abs(cfg.aperture.Z0 - zc)
        report = planar_resolution(derived.lambdaC, z_ref, dx_a, dy_a, derived.B)
    else:
        f_c = C / derived.lambdaC
        k_min = 2.0 * np.pi * (f_c - derived.B / 2.0) / C
        k_max = 2.0 * np.pi * (f_c + derived.B / 2.0) / C
        dy_a = aperture_extent(aperture)[1]
        report = cylindrical_resolution(derived.lambdaC, cfg.aperture.R0,
                                        dy_a if dy_a > 0 else -1.0,
                                        k_min, k_max)
    return report.as_dict()


def run_psf(raw_config: dict, progress=None) -> dict:
    """Point-target pipeline + half-power width measurement.

    The configured scene is replaced by a single unit scatterer at the grid
    center; measured widths sit next to the predictions in the report.
    """
    cfg = parse_pipeline_config(raw_config)
    _, _, derived, freq = build_waveform(cfg.waveform)
    grid = build_grid(cfg, derived)
    center = {a: 0.5 * (grid.mins[i] + grid.maxs[i])
              for i, a in enumerate(grid.axes)}
    pos = (center.get("x", 0.0), center.get("y", 0.0), center.get("z", 0.0))
    scene = point_scene([Scatterer(pos, 1.0 + 0.0j)])

    aperture = build_aperture(cfg.aperture)
    echo = simulate_echo(aperture, scene, freq,
                         progress=_scaled(progress, 0.0, 0.6))
    image, _ = reconstruct_image(echo, grid, cfg.algo, cfg.recon,
                                 progress=_scaled(progress, 0.6, 1.0))
    measured = psf_widths(image)
    report = predicted_resolution(cfg, derived, grid)
    key_map = {"x": "dx", "y": "dy", "z": "dz"}
    report["measured"] = {key_map.get(k, k): v for k, v in measured.items()}
    report["config"]["algorithm"] = cfg.algo
    if progress is not None:
        progress(1.0)
    return report
