"""Analytic test surfaces and mesh generators.

Random choices use numpy's ``default_rng`` (PCG64) seeded explicitly, so every
generator is a pure function of its inputs and seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .mesh import PolygonMesh, build_mesh, mesh_spacing, min_edge_length

log = logging.getLogger(__name__)


class JitterCollapse(RuntimeError):
    pass


class AnalyticSurface:
    kind: str = ""
    closed: bool = True

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def normal(self, x: np.ndarray) -> np.ndarray:
        """Outward unit normal, extended to a neighborhood of the surface."""
        raise NotImplementedError

    def tangent_basis(self, x: np.ndarray):
        raise NotImplementedError

    def integrate(self, g, n: int = 200) -> float:
        """Surface integral of ``g`` (points -> values) by tensor quadrature."""
        raise NotImplementedError

    @property
    def area(self) -> float:
        return self.integrate(lambda x: np.ones(len(x)))


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Plane(AnalyticSurface):
    """The square [-1, 1]^2 in the z = 0 plane, oriented by +z."""

    kind = "plane"
    closed = False

    def project(self, x):
        x = np.array(x, dtype=float, copy=True)
        x[..., :2] = np.clip(x[..., :2], -1.0, 1.0)
        x[..., 2] = 0.0
        return x

    def normal(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        out[..., 2] = 1.0
        return out

    def tangent_basis(self, x):
        x = np.asarray(x, dtype=float)
        t1 = np.zeros_like(x)
        t2 = np.zeros_like(x)
        t1[..., 0] = 1.0
        t2[..., 1] = 1.0
        return t1, t2

    def integrate(self, g, n=200):
        t, w = np.polynomial.legendre.leggauss(n)
        X, Y = np.meshgrid(t, t, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])
        return float(np.sum(np.outer(w, w).ravel() * g(pts)))


@dataclass(frozen=True)
class Sphere(AnalyticSurface):
    """Unit sphere centered at the origin."""

    kind = "sphere"

    def project(self, x):
        return _unit(np.asarray(x, dtype=float))

    def normal(self, x):
        return _unit(np.asarray(x, dtype=float))

    def tangent_basis(self, x):
        n = self.normal(x)
        ref = np.zeros_like(n)
        use_z = np.abs(n[..., 2]) < 0.9
        ref[use_z, 2] = 1.0
        ref[~use_z, 0] = 1.0
        t1 = _unit(np.cross(ref, n))
        return t1, np.cross(n, t1)

    def integrate(self, g, n=200):
        t, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * np.pi * (t + 1)
        wt = 0.5 * np.pi * w * np.sin(theta)
        phi = 2 * np.pi * np.arange(2 * n) / (2 * n)
        T, P = np.meshgrid(theta, phi, indexing="ij")
        pts = np.column_stack([(np.sin(T) * np.cos(P)).ravel(),
                               (np.sin(T) * np.sin(P)).ravel(), np.cos(T).ravel()])
        W = np.outer(wt, np.full(2 * n, 2 * np.pi / (2 * n))).ravel()
        return float(np.sum(W * g(pts)))


@dataclass(frozen=True)
class Torus(AnalyticSurface):
    """Torus of revolution about the z axis."""

    major: float = 1.0
    minor: float = 0.5
    kind = "torus"

    def _center(self, x):
        x = np.asarray(x, dtype=float)
        rho = np.hypot(x[..., 0], x[..., 1])
        c = np.zeros_like(x)
        c[..., 0] = self.major * x[..., 0] / rho
        c[..., 1] = self.major * x[..., 1] / rho
        return c

    def project(self, x):
        c = self._center(x)
        return c + self.minor * _unit(np.asarray(x, dtype=float) - c)

    def normal(self, x):
        return _unit(np.asarray(x, dtype=float) - self._center(x))

    def angles(self, x):
        x = np.asarray(x, dtype=float)
        theta = np.arctan2(x[..., 1], x[..., 0])
        rho = np.hypot(x[..., 0], x[..., 1])
        phi = np.arctan2(x[..., 2], rho - self.major)
        return theta, phi

    def point(self, theta, phi):
        rr = self.major + self.minor * np.cos(phi)
        return np.stack([rr * np.cos(theta), rr * np.sin(theta),
                         self.minor * np.sin(phi)], axis=-1)

    def tangent_basis(self, x):
        theta, phi = self.angles(x)
        t1 = np.stack([-np.sin(theta), np.cos(theta), np.zeros_like(theta)], axis=-1)
        t2 = np.stack([-np.sin(phi) * np.cos(theta), -np.sin(phi) * np.sin(theta),
                       np.cos(phi)], axis=-1)
        return t1, t2

    def integrate(self, g, n=200):
        a = 2 * np.pi * np.arange(2 * n) / (2 * n)
        b = 2 * np.pi * np.arange(n) / n
        T, P = np.meshgrid(a, b, indexing="ij")
        pts = self.point(T, P).reshape(-1, 3)
        jac = self.minor * (self.major + self.minor * np.cos(P))
        W = (jac * (2 * np.pi / (2 * n)) * (2 * np.pi / n)).ravel()
        return float(np.sum(W * g(pts)))


def make_surface(name: str) -> AnalyticSurface:
    try:
        return {"plane": Plane, "sphere": Sphere, "torus": Torus}[name]()
    except KeyError:
        raise ValueError(f"unknown surface {name!r}") from None


# -- regular meshes -------------------------------------------------------

def _grid_faces(n: int, m: int, index) -> list:
    return [(index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1))
            for i in range(n) for j in range(m)]


def _plane_grid(n: int) -> PolygonMesh:
    t = np.linspace(-1.0, 1.0, n + 1)
    X, Y = np.meshgrid(t, t, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])
    return build_mesh(verts, _grid_faces(n, n, lambda i, j: i * (n + 1) + j))


def _cube_sphere(n: int, equiangular: bool = False) -> PolygonMesh:
    # integer lattice on the cube [0, n]^3 dedupes shared cube-face vertices
    index: dict = {}
    verts: list = []
    faces: list = []

    def vid(p):
        if p not in index:
            index[p] = len(verts)
            verts.append(p)
        return index[p]

    for axis in range(3):
        u, v = (axis + 1) % 3, (axis + 2) % 3
        for side in (0, n):
            def lattice(i, j):
                p = [0, 0, 0]
                p[axis], p[u], p[v] = side, i, j
                return vid(tuple(p))
            quads = _grid_faces(n, n, lattice)
            if side == 0:
                quads = [q[::-1] for q in quads]
            faces += quads
    cube = 2.0 * np.array(verts, dtype=float) / n - 1.0
    if equiangular:
        cube = np.tan(0.25 * np.pi * cube)
    return build_mesh(_unit(cube), faces)


def _torus_grid(surface: Torus, n: int, m: int) -> PolygonMesh:
    theta = 2 * np.pi * np.arange(n) / n
    phi = 2 * np.pi * np.arange(m) / m
    T, P = np.meshgrid(theta, phi, indexing="ij")
    verts = surface.point(T, P).reshape(-1, 3)
    return build_mesh(verts, _grid_faces(n, m, lambda i, j: (i % n) * m + (j % m)))


def gen_regular(surface: AnalyticSurface, resolution) -> PolygonMesh:
    """Regular quad mesh.

    ``resolution`` is the number of cells along the plane side, along each cube
    edge for the sphere (6 n^2 quads), and ``n`` or ``(n, m)`` around the
    major and minor circles of the torus.
    """
    if isinstance(surface, Torus):
        if np.ndim(resolution) == 0:
            n = int(resolution)
            m = max(3, int(round(n * surface.minor / surface.major)))
        else:
            n, m = (int(r) for r in resolution)
        if min(n, m) < 3:
            raise ValueError("torus resolution must be at least 3 in both directions")
        return _torus_grid(surface, n, m)
    n = int(resolution)
    if n < 2:
        raise ValueError("resolution must be >= 2")
    if isinstance(surface, Plane):
        return _plane_grid(n)
    if isinstance(surface, Sphere):
        return _cube_sphere(n)
    raise TypeError(f"no generator for {type(surface).__name__}")


# -- jittering ------------------------------------------------------------

def _plane_boundary_directions(v: np.ndarray, rng) -> np.ndarray:
    """Random slide directions for boundary vertices of [-1, 1]^2 (corners fixed)."""
    on_x = np.isclose(np.abs(v[:, 0]), 1.0)
    on_y = np.isclose(np.abs(v[:, 1]), 1.0)
    d = np.zeros_like(v)
    sgn = rng.choice([-1.0, 1.0], size=len(v))
    d[on_x & ~on_y, 1] = sgn[on_x & ~on_y]
    d[on_y & ~on_x, 0] = sgn[on_y & ~on_x]
    return d, on_x | on_y


def jitter(mesh: PolygonMesh, surface: AnalyticSurface, r: float, seed: int) -> PolygonMesh:
    """Move each vertex by r * (shortest edge) in a random tangent direction,
    then project back onto ``surface``.

    On the plane, boundary vertices slide along the square's boundary and
    corners stay put.
    """
    if r < 0:
        raise ValueError("jitter radius must be nonnegative")
    if r == 0:
        return mesh
    rng = np.random.default_rng(seed)
    v = mesh.vertices
    step = r * min_edge_length(mesh)
    angle = rng.uniform(0.0, 2 * np.pi, size=len(v))
    t1, t2 = surface.tangent_basis(v)
    d = np.cos(angle)[:, None] * t1 + np.sin(angle)[:, None] * t2
    if isinstance(surface, Plane):
        bd, on_bd = _plane_boundary_directions(v, rng)
        d[on_bd] = bd[on_bd]
    moved = surface.project(v + step * d)
    out = mesh.with_vertices(moved)
    ref = surface.normal(out.face_centroids)
    flipped = np.einsum("ij,ij->i", out.vector_areas, ref) <= 0
    if np.any(out.face_areas < out.area_epsilon) or np.any(flipped):
        raise JitterCollapse(f"jitter r={r} (seed {seed}) produced degenerate or flipped faces")
    return out


# -- unstructured meshes --------------------------------------------------

def _rotate_to_end(face: tuple, a: int, b: int) -> tuple:
    """Rotate a face so that its last halfedge is a -> b."""
    i = face.index(b)
    return face[i:] + face[:i]


def remove_edges(mesh: PolygonMesh, fraction: float, seed: int, region=None):
    """Randomly merge face pairs across interior edges.

    Returns ``(mesh, n_removed)``. A removal is legal only if the two faces
    are distinct, the merged boundary is a simple cycle, and no interior
    vertex drops below valence 3 (boundary vertices below 2). ``fraction``
    is relative to all edges, or with ``region=(center, radius)`` to the
    edges whose midpoints lie in that ball (only those are candidates).
    """
    if not 0 <= fraction < 1:
        raise ValueError("fraction must lie in [0, 1)")
    eligible = ~mesh.boundary_edges
    if region is not None:
        center, radius = region
        mid = mesh.vertices[mesh.edges].mean(axis=1)
        inside = np.linalg.norm(mid - np.asarray(center, dtype=float), axis=1) < radius
        eligible &= inside
        target = int(round(fraction * inside.sum()))
    else:
        target = int(round(fraction * mesh.n_edges))
    if target == 0:
        return mesh, 0
    rng = np.random.default_rng(seed)
    faces = {i: f for i, f in enumerate(mesh.faces)}
    edge_faces: dict = {}
    for fi, f in faces.items():
        for i in range(len(f)):
            key = tuple(sorted((f[i], f[(i + 1) % len(f)])))
            edge_faces.setdefault(key, []).append(fi)
    valence = np.bincount(mesh.edges.ravel(), minlength=mesh.n_vertices)
    on_boundary = mesh.boundary_vertices
    min_val = np.where(on_boundary, 2, 3)

    removed = 0
    for e in rng.permutation(np.flatnonzero(eligible)):
        if removed >= target:
            break
        a, b = (int(x) for x in mesh.edges[e])
        fs = edge_faces.get((a, b))
        if fs is None or len(fs) != 2 or fs[0] == fs[1]:
            continue
        if valence[a] - 1 < min_val[a] or valence[b] - 1 < min_val[b]:
            continue
        f1, f2 = faces[fs[0]], faces[fs[1]]
        # orient so that f1 traverses a -> b
        i = f1.index(a)
        if f1[(i + 1) % len(f1)] != b:
            a, b = b, a
        g1 = _rotate_to_end(f1, a, b)   # b ... a
        g2 = _rotate_to_end(f2, b, a)   # a ... b
        merged = g1 + g2[1:-1]
        if len(set(merged)) != len(merged):
            continue
        keep, drop = fs
        faces[keep] = merged
        del faces[drop]
        del edge_faces[tuple(sorted((a, b)))]
        for i in range(len(f2)):
            key = tuple(sorted((f2[i], f2[(i + 1) % len(f2)])))
            if key in edge_faces:
                edge_faces[key] = [keep if x == drop else x for x in edge_faces[key]]
        valence[a] -= 1
        valence[b] -= 1
        removed += 1
    out = build_mesh(mesh.vertices, [faces[k] for k in sorted(faces)])
    if removed < target:
        log.info("unstructure: removed %d of %d requested edges", removed, target)
    return out, removed


def unstructure(mesh: PolygonMesh, fraction: float, seed: int, region=None) -> PolygonMesh:
    return remove_edges(mesh, fraction, seed, region)[0]


# -- refinement sequences -------------------------------------------------

@dataclass
class RefinementSequence:
    surface: AnalyticSurface
    meshes: list
    resolutions: list
    jitter: float = 0.0
    fraction: float = 0.0
    seed: int = 0
    spacings: list = field(default_factory=list)

    def __post_init__(self):
        self.spacings = [mesh_spacing(m) for m in self.meshes]

    def __iter__(self):
        return iter(self.meshes)

    def __len__(self):
        return len(self.meshes)


def generate(surface: AnalyticSurface, resolution, jitter_r: float = 0.0,
             fraction: float = 0.0, seed: int = 0) -> PolygonMesh:
    """Regular mesh, then optional edge elimination, then optional jitter."""
    mesh = gen_regular(surface, resolution)
    if fraction > 0:
        mesh = unstructure(mesh, fraction, seed)
    if jitter_r > 0:
        mesh = jitter(mesh, surface, jitter_r, seed + 1)
    return mesh


def refinement_sequence(surface: AnalyticSurface, ladder: Sequence, jitter_r: float = 0.0,
                        fraction: float = 0.0, seed: int = 0) -> RefinementSequence:
    meshes = [generate(surface, res, jitter_r, fraction, seed + 7919 * i)
              for i, res in enumerate(ladder)]
    seq = RefinementSequence(surface, meshes, list(ladder), jitter_r, fraction, seed)
    if any(h2 >= h1 for h1, h2 in zip(seq.spacings, seq.spacings[1:])):
        raise ValueError("ladder does not refine monotonically")
    return seq
