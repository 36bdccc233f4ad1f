"""Target scenes: point scatterers, imported triangle meshes, ground truth.

Scenes are collections of discrete point scatterers with complex
reflectivities.  Solid targets enter as triangle meshes (STL import or the
built-in shapes) and are converted to surface point clouds; near-field SAR at
these frequencies images surfaces, so no volumetric sampling is attempted.
Ground-truth label images are rasterized by trilinear splatting followed by a
small Gaussian blur.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from sarlab.grids import GridSpec, ImageVolume, image_from_grid


class SceneError(ValueError):
    """Raised for invalid scenes or meshes."""


class StlError(SceneError):
    """Raised for malformed STL payloads; carries the failing byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Scatterer:
    """Point scatterer: position [m] and complex reflectivity (unitless)."""

    position: tuple[float, float, float]
    reflectivity: complex = 1.0 + 0.0j

    def __post_init__(self):
        p = np.asarray(self.position, dtype=np.float64)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise SceneError(f"invalid scatterer position {self.position!r}")
        object.__setattr__(self, "position", (float(p[0]), float(p[1]), float(p[2])))
        r = complex(self.reflectivity)
        if not np.isfinite(r.real) or not np.isfinite(r.imag):
            raise SceneError("reflectivity must be finite")
        object.__setattr__(self, "reflectivity", r)


@dataclass(frozen=True)
class Scene:
    """Point-scatterer collection with its axis-aligned bounding box."""

    scatterers: tuple[Scatterer, ...]
    bounds: np.ndarray  # [2, 3]: [[xmin,ymin,zmin], [xmax,ymax,zmax]]

    def __post_init__(self):
        if len(self.scatterers) == 0:
            raise SceneError("scene must contain at least one scatterer")
        b = np.asarray(self.bounds, dtype=np.float64)
        if b.shape != (2, 3) or not np.all(np.isfinite(b)):
            raise SceneError("bounds must be a finite [2, 3] array")
        pos = self.positions_array()
        eps = 1e-12
        if np.any(pos < b[0] - eps) or np.any(pos > b[1] + eps):
            raise SceneError("all scatterers must lie inside bounds")
        object.__setattr__(self, "bounds", b)

    def positions_array(self) -> np.ndarray:
        return np.array([s.position for s in self.scatterers], dtype=np.float64)

    def reflectivity_array(self) -> np.ndarray:
        return np.array([s.reflectivity for s in self.scatterers],
                        dtype=np.complex128)

    def __len__(self) -> int:
        return len(self.scatterers)


def scene_to_array(scene: Scene) -> np.ndarray:
    """Pack a scene as [N, 5] float64 rows (x, y, z, re, im)."""
    pos = scene.positions_array()
    refl = scene.reflectivity_array()
    return np.column_stack([pos, refl.real, refl.imag])


def scene_from_array(arr: np.ndarray) -> Scene:
    arr = np.asarray(arr, dtype=np.float64)
    scats = [Scatterer((r[0], r[1], r[2]), complex(r[3], r[4])) for r in arr]
    return point_scene(scats)


def point_scene(scatterers) -> Scene:
    """Scene from explicit scatterers with tight bounds.

    Degenerate extents (single point, coplanar sets) are expanded by a tiny
    epsilon so the box always has positive volume.
    """
    scats = tuple(s if isinstance(s, Scatterer) else Scatterer(*s)
                  for s in scatterers)
    if not scats:
        raise SceneError("scatterer list must be nonempty")
    pos = np.array([s.position for s in scats])
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    eps = 1e-9
    degen = (hi - lo) < eps
    lo = lo - degen * eps
    hi = hi + degen * eps
    return Scene(scats, np.array([lo, hi]))


# ---------------------------------------------------------------------------
# triangle meshes


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle mesh in meters."""

    vertices: np.ndarray   # [V, 3] float64
    triangles: np.ndarray  # [T, 3] int64 vertex indices

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise SceneError("vertices must be [V, 3]")
        if t.ndim != 2 or t.shape[1] != 3:
            raise SceneError("triangles must be [T, 3]")
        if t.size and (t.min() < 0 or t.max() >= v.shape[0]):
            raise SceneError("triangle indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    def triangle_areas(self) -> np.ndarray:
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]


def _dedup_mesh(tri_vertices: np.ndarray) -> TriangleMesh:
    """Build an indexed mesh from per-triangle vertices, deduplicating
    bit-identical vertices and dropping zero-area triangles."""
    flat = tri_vertices.reshape(-1, 3)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    tris = inverse.reshape(-1, 3).astype(np.int64)
    mesh = TriangleMesh(uniq, tris)
    areas = mesh.triangle_areas()
    keep = areas > 0.0
    return TriangleMesh(uniq, tris[keep])


def import_stl(data: bytes, units: str = "mm") -> TriangleMesh:
    """Parse binary or ASCII STL bytes into a TriangleMesh.

    STL files are dimensionless; the dominant CAD convention is millimeters,
    so coordinates are scaled to meters unless units="m".  Vertices are
    deduplicated exactly and zero-area facets dropped.
    """
    if units not in ("mm", "m"):
        raise SceneError(f"units must be 'mm' or 'm', got {units!r}")
    scale = 1e-3 if units == "mm" else 1.0
    if len(data) < 15:
        raise StlError("file too short to be an STL", 0)

    is_ascii = data.lstrip()[:5].lower() == b"solid" and b"facet" in data[:2048]
    if len(data) >= 84:
        ntri = struct.unpack_from("<I", data, 80)[0]
        if len(data) == 84 + 50 * ntri:
            is_ascii = False  # binary file whose header happens to say "solid"

    if is_ascii:
        verts = _parse_ascii_stl(data)
    else:
        verts = _parse_binary_stl(data)
    return _dedup_mesh(verts * scale)


def _parse_binary_stl(data: bytes) -> np.ndarray:
    if len(data) < 84:
        raise StlError("binary STL truncated before facet count", len(data))
    ntri = struct.unpack_from("<I", data, 80)[0]
    expected = 84 + 50 * ntri
    if len(data) < expected:
        raise StlError(f"binary STL payload short: header claims {ntri} facets",
                       len(data))
    raw = np.frombuffer(data, dtype=np.uint8, count=50 * ntri, offset=84)
    # facet record: normal 3f4, vertices 9f4, attribute u2
    rec = raw.reshape(ntri, 50)
    floats = rec[:, :48].copy().view("<f4").reshape(ntri, 12)
    verts = floats[:, 3:12].astype(np.float64).reshape(ntri, 3, 3)
    if not np.all(np.isfinite(verts)):
        bad = int(np.argwhere(~np.isfinite(verts.reshape(ntri, -1)))[0][0])
        raise StlError("non-finite vertex in binary STL", 84 + 50 * bad)
    return verts


def _parse_ascii_stl(data: bytes) -> np.ndarray:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise StlError("ASCII STL is not valid UTF-8", e.start) from e
    verts: list[list[float]] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        if stripped.startswith("vertex"):
            parts = stripped.split()
            if len(parts) != 4:
                raise StlError(f"malformed vertex line {stripped!r}", offset)
            try:
                verts.append([float(p) for p in parts[1:]])
            except ValueError as e:
                raise StlError(f"bad vertex number in {stripped!r}", offset) from e
        offset += len(line.encode("utf-8"))
    if "endsolid" not in text:
        raise StlError("ASCII STL missing endsolid terminator", len(data))
    if len(verts) == 0 or len(verts) % 3 != 0:
        raise StlError(f"ASCII STL vertex count {len(verts)} not a multiple of 3",
                       len(data))
    return np.asarray(verts, dtype=np.float64).reshape(-1, 3, 3)


def mesh_to_scatterers(mesh: TriangleMesh, spacing: float,
                       reflectivity: complex = 1.0 + 0.0j,
                       seed: int = 0) -> Scene:
    """Sample the mesh surface uniformly by area at ~1/spacing^2 points/m^2.

    Points are drawn per-triangle (area-weighted) with uniform barycentric
    coordinates, deterministically for a given seed; all carry the same
    reflectivity.
    """
    if spacing <= 0:
        raise SceneError(f"spacing must be positive, got {spacing}")
    if mesh.n_triangles == 0:
        raise SceneError("mesh has no (non-degenerate) triangles")
    areas = mesh.triangle_areas()
    total = areas.sum()
    if total <= 0:
        raise SceneError("mesh surface area is zero")
    n = max(1, int(round(total / spacing**2)))
    rng = np.random.default_rng(seed)
    tri_idx = rng.choice(mesh.n_triangles, size=n, p=areas / total)
    a = mesh.vertices[mesh.triangles[tri_idx, 0]]
    b = mesh.vertices[mesh.triangles[tri_idx, 1]]
    c = mesh.vertices[mesh.triangles[tri_idx, 2]]
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    pts = (1 - r1)[:, None] * a + (r1 * (1 - r2))[:, None] * b + (r1 * r2)[:, None] * c
    scats = [Scatterer(tuple(p), reflectivity) for p in pts]
    return point_scene(scats)


# ---------------------------------------------------------------------------
# ground-truth rasterization


def _splat(scene: Scene, grid: GridSpec, strict: bool = True):
    """Deposit |reflectivity| on the grid with multilinear weights.

    Returns (volume, n_clipped).  Weights per scatterer sum to 1, so total
    deposited mass equals sum(|reflectivity|) when nothing is clipped.
    """
    axes = grid.coordinate_arrays()
    pos3 = scene.positions_array()
    cols = ["xyz".index(a) for a in grid.axes]
    pos = pos3[:, cols]
    mags = np.abs(scene.reflectivity_array())

    lo = np.array([a[0] for a in axes])
    hi = np.array([a[-1] for a in axes])
    step = np.array([a[1] - a[0] for a in axes])
    inside = np.all((pos >= lo) & (pos <= hi), axis=1)
    n_clipped = int((~inside).sum())
    if n_clipped and strict:
        raise SceneError(f"{n_clipped} scatterer(s) outside grid (strict mode)")

    vol = np.zeros(grid.shape, dtype=np.float64)
    frac = (pos[inside] - lo) / step
    base = np.floor(frac).astype(np.int64)
    base = np.minimum(base, np.array(grid.shape) - 2)  # keep base+1 in range
    t = frac - base
    ndim = grid.ndim
    for corner in range(2**ndim):
        offs = [(corner >> d) & 1 for d in range(ndim)]
        w = mags[inside].copy()
        idx = []
        for d in range(ndim):
            w *= t[:, d] if offs[d] else (1.0 - t[:, d])
            idx.append(base[:, d] + offs[d])
        np.add.at(vol, tuple(idx), w)
    return vol, n_clipped


def rasterize_ground_truth(scene: Scene, grid: GridSpec, sigma_vox: float = 1.0,
                           strict: bool = True) -> ImageVolume:
    """Ideal label image: multilinear splat, Gaussian blur, peak-normalized.

    sigma_vox is the isotropic Gaussian std in voxels (0 disables the blur).
    In strict mode scatterers outside the grid raise; otherwise they are
    clipped and the count recorded in provenance.
    """
    vol, n_clipped = _splat(scene, grid, strict=strict)
    if sigma_vox > 0:
        vol = gaussian_filter(vol, sigma=sigma_vox, mode="constant")
    peak = vol.max()
    if peak > 0:
        vol = vol / peak
    return image_from_grid(vol, grid, {"algorithm": "ground_truth",
                                       "sigma_vox": sigma_vox,
                                       "clipped": n_clipped})


# ---------------------------------------------------------------------------
# randomized scenes for dataset generation


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation matrix (quaternion method)."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_scene(seed: int, n_points: int, bounds,
                 mesh_library=None) -> Scene:
    """Deterministic random scene: points and/or a posed mesh inside bounds.

    Reflectivity magnitudes are uniform on [0.5, 1] with uniform phase.
    mesh_library is a sequence of (TriangleMesh, spacing) pairs; one entry is
    chosen and placed with a random rigid pose (uniformly scaled down first
    if it cannot fit inside the bounds).
    """
    b = np.asarray(bounds, dtype=np.float64)
    if b.shape != (2, 3) or np.any(b[1] <= b[0]):
        raise SceneError("bounds must be [[xmin,ymin,zmin],[xmax,ymax,zmax]]")
    if n_points < 0:
        raise SceneError("n_points must be >= 0")
    if n_points == 0 and not mesh_library:
        raise SceneError("need n_points > 0 or a mesh library entry")
    rng = np.random.default_rng(seed)

    scats: list[Scatterer] = []
    if mesh_library:
        mesh, spacing = mesh_library[rng.integers(len(mesh_library))]
        rot = _random_rotation(rng)
        verts = mesh.vertices @ rot.T
        span = verts.max(axis=0) - verts.min(axis=0)
        room = b[1] - b[0]
        scale = min(1.0, float(np.min(room / np.maximum(span, 1e-30))) * 0.95)
        verts = verts * scale
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        center_lo = b[0] - lo
        center_hi = b[1] - hi
        shift = center_lo + rng.random(3) * np.maximum(center_hi - center_lo, 0)
        posed = TriangleMesh(verts + shift, mesh.triangles)
        sub = mesh_to_scatterers(posed, spacing, 1.0 + 0.0j,
                                 seed=int(rng.integers(2**32)))
        mags = rng.uniform(0.5, 1.0)
        phase = rng.uniform(0, 2 * np.pi)
        refl = mags * np.exp(1j * phase)
        scats.extend(Scatterer(s.position, refl) for s in sub.scatterers)

    if n_points > 0:
        pts = b[0] + rng.random((n_points, 3)) * (b[1] - b[0])
        mags = rng.uniform(0.5, 1.0, n_points)
        phases = rng.uniform(0, 2 * np.pi, n_points)
        refl = mags * np.exp(1j * phases)
        scats.extend(Scatterer(tuple(p), complex(r)) for p, r in zip(pts, refl))

    if not scats:
        raise SceneError("random scene came out empty")
    return Scene(tuple(scats), b)


# ---------------------------------------------------------------------------
# built-in meshes


def _extrude_convex(poly_xy: np.ndarray, thickness: float) -> np.ndarray:
    """Triangle soup [T,3,3] for a convex polygon extruded along z."""
    n = len(poly_xy)
    zf, zb = thickness / 2.0, -thickness / 2.0
    tris = []
    for i in range(1, n - 1):  # front and back fans
        a, bb, c = poly_xy[0], poly_xy[i], poly_xy[i + 1]
        tris.append([[*a, zf], [*bb, zf], [*c, zf]])
        tris.append([[*a, zb], [*c, zb], [*bb, zb]])
    for i in range(n):  # side walls
        a, bb = poly_xy[i], poly_xy[(i + 1) % n]
        tris.append([[*a, zf], [*bb, zf], [*bb, zb]])
        tris.append([[*a, zf], [*bb, zb], [*a, zb]])
    return np.asarray(tris, dtype=np.float64)


def knife_mesh(length: float = 0.02) -> TriangleMesh:
    """Simple knife-shaped mesh (blade + handle), overall length in meters."""
    L = length
    blade = np.array([[0.0, -0.15], [1.0, 0.0], [0.55, 0.15], [0.0, 0.15]]) * L
    handle = np.array([[-0.45, -0.1], [0.0, -0.1], [0.0, 0.1], [-0.45, 0.1]]) * L
    t = 0.04 * L
    soup = np.concatenate([_extrude_convex(blade, t), _extrude_convex(handle, t)])
    return _dedup_mesh(soup)


BUILTIN_MESHES = {"knife": knife_mesh}
