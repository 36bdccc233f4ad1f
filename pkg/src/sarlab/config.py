"""Pipeline configuration schema shared by the CLI and the REST service.

A pipeline config bundles waveform + aperture + scene + grid + algorithm
(plus optional noise, gain, and reconstruction tuning).  Validation errors
carry the offending field path so both surfaces can report it.
"""

from __future__ import annotations

import hashlib
import json
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sarlab import apertures, waveform as wf
from sarlab.constants import C
from sarlab.grids import GridSpec, grid_spec
from sarlab.scene import (BUILTIN_MESHES, Scene, TriangleMesh, import_stl,
                          mesh_to_scatterers, point_scene, random_scene,
                          Scatterer)


class ConfigError(ValueError):
    """Raised for invalid configs; field_path names the offending entry."""

    def __init__(self, message: str, field_path: str = ""):
        super().__init__(message)
        self.field_path = field_path


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FmcwConfig(_Model):
    type: Literal["fmcw"]
    f0: float
    K: float
    Tc: float
    Tr: float
    Nc: int = 1
    fS: float
    Nf: int


class PmcwConfig(_Model):
    type: Literal["pmcw"]
    fc: float
    B: float
    Td: float
    Ncode: int = 1
    Nf: int  # frequency samples for stepped simulation (no native count)


class OfdmConfig(_Model):
    type: Literal["ofdm"]
    fc: float
    Nsc: int
    df: float
    Tcp: float
    Nsym: int = 1
    Tr: float


WaveformConfig = Union[FmcwConfig, PmcwConfig, OfdmConfig]


class LinearApertureConfig(_Model):
    kind: Literal["linear"]
    Ny: int
    dy: float
    Z0: float


class PlanarApertureConfig(_Model):
    kind: Literal["planar"]
    Nx: int
    Ny: int
    dx: float
    dy: float
    Z0: float


class CircularApertureConfig(_Model):
    kind: Literal["circular"]
    Ntheta: int
    R0: float


class CylindricalApertureConfig(_Model):
    kind: Literal["cylindrical"]
    Ntheta: int
    Ny: int
    dy: float
    R0: float


class IrregularApertureConfig(_Model):
    kind: Literal["irregular"]
    positions: list[list[float]]


ApertureConfig = Union[LinearApertureConfig, PlanarApertureConfig,
                       CircularApertureConfig, CylindricalApertureConfig,
                       IrregularApertureConfig]


class PointConfig(_Model):
    xyz: list[float]
    re: float = 1.0
    im: float = 0.0


class MeshConfig(_Model):
    path: Optional[str] = None
    builtin: Optional[str] = None
    spacing: float
    re: float = 1.0
    im: float = 0.0
    seed: int = 0
    stl_units: Literal["mm", "m"] = "mm"
    length: Optional[float] = None  # builtin meshes only


class RandomSceneConfig(_Model):
    seed: int = 0
    n_points: int
    n_points_max: Optional[int] = None  # draw count from [n_points, n_points_max]
    bounds: list[list[float]]  # [[xmin,ymin,zmin],[xmax,ymax,zmax]]
    meshes: list[MeshConfig] = Field(default_factory=list)


class SceneConfig(_Model):
    points: list[PointConfig] = Field(default_factory=list)
    meshes: list[MeshConfig] = Field(default_factory=list)
    random: Optional[RandomSceneConfig] = None


class AxisConfig(_Model):
    min: float
    max: float
    count: Optional[int] = None  # None -> half the predicted resolution


class GridConfig(_Model):
    x: Optional[AxisConfig] = None
    y: Optional[AxisConfig] = None
    z: Optional[AxisConfig] = None


class NoiseConfig(_Model):
    snr_db: Optional[float] = None
    seed: int = 0


class ReconTuning(_Model):
    pad: int = 2
    stolt_order: Literal[1, 3] = 1
    alpha_upsample: int = 8
    margin: float = 4.0
    keep_kspace: bool = False


class PipelineConfig(_Model):
    waveform: WaveformConfig = Field(discriminator="type")
    aperture: ApertureConfig = Field(discriminator="kind")
    scene: SceneConfig
    grid: GridConfig
    algo: Literal["bpa", "rma-linear", "rma-planar", "rma-circular",
                  "rma-cylindrical"] = "bpa"
    noise: Optional[NoiseConfig] = None
    gain_csv: Optional[str] = None
    recon: ReconTuning = Field(default_factory=ReconTuning)


class ReconstructConfig(_Model):
    """Reconstruction of an existing echo container (counts are mandatory:
    there is no waveform context to derive default grid spacing from)."""

    echo_path: Optional[str] = None
    echo_job: Optional[str] = None
    grid: GridConfig
    algo: Literal["bpa", "rma-linear", "rma-planar", "rma-circular",
                  "rma-cylindrical"]
    recon: ReconTuning = Field(default_factory=ReconTuning)


class DatasetSpecConfig(_Model):
    base_seed: int = 0
    n_train: int = Field(ge=0)
    n_test: int = Field(ge=0)
    waveform: WaveformConfig = Field(discriminator="type")
    aperture: ApertureConfig = Field(discriminator="kind")
    scene_random: RandomSceneConfig
    grid: GridConfig
    algo: Literal["bpa", "rma-linear", "rma-planar", "rma-circular",
                  "rma-cylindrical"] = "rma-planar"
    sigma_vox: float = 1.0
    hr_mode: Literal["rasterize", "simulate"] = "rasterize"
    waveform_hr: Optional[WaveformConfig] = None
    aperture_hr: Optional[ApertureConfig] = None
    noise: Optional[NoiseConfig] = None


def _field_path(err: ValidationError) -> str:
    errs = err.errors()
    if not errs:
        return ""
    return ".".join(str(p) for p in errs[0]["loc"])


def parse_pipeline_config(raw: dict) -> PipelineConfig:
    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as e:
        path = _field_path(e)
        raise ConfigError(f"invalid config at {path or '<root>'}: "
                          f"{e.errors()[0]['msg']}", path) from e


def parse_dataset_spec(raw: dict) -> DatasetSpecConfig:
    try:
        return DatasetSpecConfig.model_validate(raw)
    except ValidationError as e:
        path = _field_path(e)
        raise ConfigError(f"invalid dataset spec at {path or '<root>'}: "
                          f"{e.errors()[0]['msg']}", path) from e


def parse_reconstruct_config(raw: dict) -> ReconstructConfig:
    try:
        cfg = ReconstructConfig.model_validate(raw)
    except ValidationError as e:
        path = _field_path(e)
        raise ConfigError(f"invalid reconstruct config at {path or '<root>'}: "
                          f"{e.errors()[0]['msg']}", path) from e
    if (cfg.echo_path is None) == (cfg.echo_job is None):
        raise ConfigError("reconstruct config needs exactly one of "
                          "echo_path/echo_job", "echo_path")
    return cfg


def build_grid_literal(grid: GridConfig) -> GridSpec:
    """GridSpec from explicit axes; every present axis must carry a count."""
    axes = {}
    for name in ("x", "y", "z"):
        block = getattr(grid, name)
        if block is None:
            continue
        if block.count is None:
            raise ConfigError(f"grid.{name}.count is required here",
                              f"grid.{name}.count")
        axes[name] = (block.min, block.max, block.count)
    if not axes:
        raise ConfigError("grid must define at least two axes", "grid")
    return grid_spec(**axes)


def config_hash(raw) -> str:
    """Content hash of a config (canonical JSON, sha256 hex)."""
    if isinstance(raw, BaseModel):
        raw = raw.model_dump()
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"),
                      default=float).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# builders: config models -> domain objects


def build_waveform(cfg: WaveformConfig):
    """(kind, params, derived metrics, frequency axis) from a waveform block."""
    if cfg.type == "fmcw":
        p = wf.FmcwParams(cfg.f0, cfg.K, cfg.Tc, cfg.Tr, cfg.Nc, cfg.fS, cfg.Nf)
        derived = wf.fmcw_derived(p)
        axis = wf.frequency_axis(cfg.f0, derived.B, cfg.Nf)
    elif cfg.type == "pmcw":
        p = wf.PmcwParams(cfg.fc, cfg.B, cfg.Td, cfg.Ncode)
        derived = wf.pmcw_derived(p)
        axis = wf.frequency_axis(cfg.fc - cfg.B / 2.0, cfg.B, cfg.Nf)
    else:
        p = wf.OfdmParams(cfg.fc, cfg.Nsc, cfg.df, cfg.Tcp, cfg.Nsym, cfg.Tr)
        derived = wf.ofdm_derived(p)
        axis = wf.frequency_axis(cfg.fc - derived.B / 2.0, derived.B, cfg.Nsc)
    return cfg.type, p, derived, axis


def build_aperture(cfg: ApertureConfig) -> apertures.Aperture:
    if cfg.kind == "linear":
        return apertures.linear_aperture(cfg.Ny, cfg.dy, cfg.Z0)
    if cfg.kind == "planar":
        return apertures.planar_aperture(cfg.Nx, cfg.Ny, cfg.dx, cfg.dy, cfg.Z0)
    if cfg.kind == "circular":
        return apertures.circular_aperture(cfg.Ntheta, cfg.R0)
    if cfg.kind == "cylindrical":
        return apertures.cylindrical_aperture(cfg.Ntheta, cfg.Ny, cfg.dy, cfg.R0)
    return apertures.irregular_aperture(np.asarray(cfg.positions))


def _load_mesh(cfg: MeshConfig) -> TriangleMesh:
    if (cfg.path is None) == (cfg.builtin is None):
        raise ConfigError("mesh entry needs exactly one of path/builtin",
                          "scene.meshes")
    if cfg.builtin is not None:
        maker = BUILTIN_MESHES.get(cfg.builtin)
        if maker is None:
            raise ConfigError(f"unknown builtin mesh {cfg.builtin!r} "
                              f"(have {sorted(BUILTIN_MESHES)})", "scene.meshes")
        return maker(cfg.length) if cfg.length else maker()
    with open(cfg.path, "rb") as f:
        return import_stl(f.read(), units=cfg.stl_units)


def build_scene(cfg: SceneConfig) -> Scene:
    scats: list[Scatterer] = []
    for p in cfg.points:
        scats.append(Scatterer(tuple(p.xyz), complex(p.re, p.im)))
    for m in cfg.meshes:
        mesh = _load_mesh(m)
        sub = mesh_to_scatterers(mesh, m.spacing, complex(m.re, m.im), seed=m.seed)
        scats.extend(sub.scatterers)
    if cfg.random is not None:
        library = [(_load_mesh(m), m.spacing) for m in cfg.random.meshes]
        sub = random_scene(cfg.random.seed, cfg.random.n_points,
                           np.asarray(cfg.random.bounds),
                           mesh_library=library or None)
        scats.extend(sub.scatterers)
    if not scats:
        raise ConfigError("scene is empty", "scene")
    return point_scene(scats)


def _predicted_spacing(axis: str, cfg: PipelineConfig, derived, grid: GridConfig) -> float:
    """Default grid spacing: half the predicted resolution along the axis."""
    lam = derived.lambdaC
    ap = cfg.aperture
    if ap.kind in ("linear", "planar"):
        if axis == "z":
            res = derived.deltaR
        else:
            extent = {"x": (ap.Nx - 1) * ap.dx if ap.kind == "planar" else 0.0,
                      "y": (ap.Ny - 1) * ap.dy}[axis]
            if extent <= 0:
                res = derived.deltaR
            else:
                block = getattr(grid, "z", None)
                z_ref = abs(ap.Z0 - (0.5 * (block.min + block.max) if block else 0.0))
                res = lam * max(z_ref, 1e-6) / (2.0 * extent)
    else:
        # polar: radial resolution applies in the scan plane, vertical along y
        f_c = C / lam
        k_min = 2.0 * np.pi * (f_c - derived.B / 2.0) / C
        k_max = 2.0 * np.pi * (f_c + derived.B / 2.0) / C
        if axis == "y" and ap.kind == "cylindrical":
            extent = (ap.Ny - 1) * ap.dy
            res = lam * ap.R0 / (2.0 * extent) if extent > 0 else 2.4 / (k_max + k_min)
        else:
            res = 2.4 / (k_max + k_min)
    return res / 2.0


def build_grid(cfg: PipelineConfig, derived) -> GridSpec:
    axes = {}
    for name in ("x", "y", "z"):
        block = getattr(cfg.grid, name)
        if block is None:
            continue
        if block.count is not None:
            count = block.count
        else:
            spacing = _predicted_spacing(name, cfg, derived, cfg.grid)
            count = max(2, int(np.ceil((block.max - block.min) / spacing)) + 1)
        axes[name] = (block.min, block.max, count)
    if not axes:
        raise ConfigError("grid must define at least two axes", "grid")
    return grid_spec(**axes)
