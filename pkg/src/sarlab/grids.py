"""Voxel grids and the complex volumes that live on them.

GridSpec names 2 or 3 of the axes {x, y, z} and discretizes each uniformly;
ImageVolume holds reconstructed (or rasterized) complex voxels with physical
axes; KSpace holds a spatial-spectral intermediate with wavenumber axes and a
pipeline stage label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

AXIS_NAMES = ("x", "y", "z")

# pipeline stage labels persisted by --keep-kspace, in order
STAGE_NAMES = ("stage0_signal", "stage1_kspace", "stage2_compensated",
               "stage3_stolt")


class GridError(ValueError):
    """Raised for invalid grid definitions."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform axis-aligned voxel grid over 2 or 3 named axes."""

    axes: tuple[str, ...]          # subset of ("x","y","z"), in x,y,z order
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.axes) not in (2, 3):
            raise GridError("grid must have 2 or 3 axes")
        if any(a not in AXIS_NAMES for a in self.axes):
            raise GridError(f"axis names must be from {AXIS_NAMES}")
        if list(self.axes) != [a for a in AXIS_NAMES if a in self.axes]:
            raise GridError("axes must be given in x,y,z order")
        if len(set(self.axes)) != len(self.axes):
            raise GridError("duplicate axis")
        for name, lo, hi, n in zip(self.axes, self.mins, self.maxs, self.counts):
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
                raise GridError(f"axis {name}: max must exceed min")
            if n < 2:
                raise GridError(f"axis {name}: count must be >= 2")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.counts)

    def axis_values(self, name: str) -> np.ndarray:
        i = self.axes.index(name)
        return np.linspace(self.mins[i], self.maxs[i], self.counts[i])

    def coordinate_arrays(self) -> list[np.ndarray]:
        return [self.axis_values(a) for a in self.axes]

    def voxel_positions(self) -> np.ndarray:
        """All voxel centers as an [N, 3] array; absent axes pinned at 0."""
        vals = {a: self.axis_values(a) for a in self.axes}
        full = [vals.get(a, np.zeros(1)) for a in AXIS_NAMES]
        mesh = np.meshgrid(*full, indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        return np.ascontiguousarray(pts)

    def spacing(self, name: str) -> float:
        i = self.axes.index(name)
        return (self.maxs[i] - self.mins[i]) / (self.counts[i] - 1)


def grid_spec(**axes) -> GridSpec:
    """Build a GridSpec from keyword axes, e.g. grid_spec(y=(-.02,.02,64), z=...)."""
    names = [a for a in AXIS_NAMES if a in axes]
    if set(axes) - set(AXIS_NAMES):
        raise GridError(f"unknown axes {set(axes) - set(AXIS_NAMES)}")
    mins, maxs, counts = [], [], []
    for a in names:
        lo, hi, n = axes[a]
        mins.append(float(lo))
        maxs.append(float(hi))
        counts.append(int(n))
    return GridSpec(tuple(names), tuple(mins), tuple(maxs), tuple(counts))


@dataclass(frozen=True)
class ImageVolume:
    """Complex voxel grid with physical axes [m] and provenance."""

    voxels: np.ndarray
    axes: tuple[np.ndarray, ...]       # per-dimension coordinates, increasing
    axis_names: tuple[str, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vox = np.asarray(self.voxels)
        object.__setattr__(self, "voxels", vox)
        axes = tuple(np.asarray(a, dtype=np.float64) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        if vox.ndim != len(axes) or vox.ndim != len(self.axis_names):
            raise GridError("voxel dims must match axes")
        for ax, n in zip(axes, vox.shape):
            if ax.size != n:
                raise GridError("axis length must match voxel shape")
            if np.any(np.diff(ax) <= 0):
                raise GridError("axes must be strictly increasing")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.voxels)


def image_from_grid(voxels: np.ndarray, grid: GridSpec, provenance=None) -> ImageVolume:
    return ImageVolume(voxels, tuple(grid.coordinate_arrays()), tuple(grid.axes),
                       provenance or {})


@dataclass(frozen=True)
class KSpace:
    """Spatial-spectral intermediate: complex spectrum with labeled axes."""

    spectrum: np.ndarray
    axes: tuple[np.ndarray, ...]
    axis_names: tuple[str, ...]     # e.g. ("ky","kx","k") or ("ktheta","ky","k")
    stage: str

    def __post_init__(self):
        if self.stage not in STAGE_NAMES:
            raise GridError(f"unknown pipeline stage {self.stage!r}")
        spec = np.asarray(self.spectrum)
        object.__setattr__(self, "spectrum", spec)
        axes = tuple(np.asarray(a, dtype=np.float64) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        if spec.ndim != len(axes):
            raise GridError("spectrum dims must match axes")
        for ax, n in zip(axes, spec.shape):
            if ax.size != n:
                raise GridError("axis length must match spectrum shape")
            if ax.size > 1 and np.any(np.diff(ax) <= 0):
                raise GridError("axes must be monotone increasing")
