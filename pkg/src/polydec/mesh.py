"""Polygonal surface meshes with oriented edges and per-face halfedge cycles.

A mesh is built once from vertex positions and cyclic face vertex lists and
is immutable afterwards. Every face owns ``p`` halfedges; halfedge ``i`` of a
face runs from its ``i``-th listed vertex to the ``(i+1) mod p``-th one.
Edges are stored once with the canonical orientation lower -> higher vertex
index, and every halfedge records its parent edge together with the
incidence sign ``[f:e]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MeshError(ValueError):
    pass


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class DegenerateFace(MeshError):
    pass


class IndexOutOfRange(MeshError):
    pass


class ZeroArea(MeshError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class PolygonMesh:
    """Immutable manifold polygonal surface (possibly with boundary).

    Flat halfedge arrays are indexed by ``face_offsets[f] + i`` for the
    ``i``-th halfedge of face ``f``.
    """

    def __init__(self, vertices, faces, edges, he_src, he_dst, he_face,
                 he_local, he_edge, he_sign, face_offsets):
        self.vertices = _frozen(np.asarray(vertices, dtype=float))
        self.faces = faces
        self.edges = _frozen(edges)
        self.he_src = _frozen(he_src)
        self.he_dst = _frozen(he_dst)
        self.he_face = _frozen(he_face)
        self.he_local = _frozen(he_local)
        self.he_edge = _frozen(he_edge)
        self.he_sign = _frozen(he_sign)
        self.face_offsets = _frozen(face_offsets)
        self.face_degree = _frozen(np.diff(face_offsets))
        deg = self.face_degree[he_face]
        start = face_offsets[:-1][he_face]
        self.he_next = _frozen(start + (he_local + 1) % deg)
        self.he_prev = _frozen(start + (he_local - 1) % deg)
        self.edge_face_count = _frozen(np.bincount(he_edge, minlength=len(edges)))
        self._cache: dict = {}

    def __setattr__(self, name, value):
        if name != "_cache" and name in self.__dict__:
            raise AttributeError("PolygonMesh is immutable")
        super().__setattr__(name, value)

    def __repr__(self) -> str:
        return (f"PolygonMesh(|V|={self.n_vertices}, |E|={self.n_edges}, "
                f"|F|={self.n_faces})")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_halfedges(self) -> int:
        return len(self.he_src)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def n_cells(self, degree: int) -> int:
        return (self.n_vertices, self.n_edges, self.n_faces)[degree]

    @property
    def boundary_edges(self) -> np.ndarray:
        return self.edge_face_count == 1

    @property
    def boundary_vertices(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.edges[self.boundary_edges].ravel()] = True
        return mask

    # -- geometry ---------------------------------------------------------

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def halfedge_vectors(self) -> np.ndarray:
        return self._memo("he_vec", lambda: _frozen(
            self.vertices[self.he_dst] - self.vertices[self.he_src]))

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._memo("edge_len", lambda: _frozen(np.linalg.norm(
            self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]], axis=1)))

    @property
    def vector_areas(self) -> np.ndarray:
        def build():
            v = self.vertices
            cross = np.cross(v[self.he_src], v[self.he_dst])
            out = np.zeros((self.n_faces, 3))
            np.add.at(out, self.he_face, cross)
            return _frozen(0.5 * out)
        return self._memo("vector_areas", build)

    @property
    def face_areas(self) -> np.ndarray:
        return self._memo("areas", lambda: _frozen(
            np.linalg.norm(self.vector_areas, axis=1)))

    @property
    def face_normals(self) -> np.ndarray:
        def build():
            a = self.face_areas
            safe = np.where(a > 0, a, 1.0)
            return _frozen(self.vector_areas / safe[:, None])
        return self._memo("normals", build)

    @property
    def face_centroids(self) -> np.ndarray:
        def build():
            out = np.zeros((self.n_faces, 3))
            np.add.at(out, self.he_face, self.vertices[self.he_src])
            return _frozen(out / self.face_degree[:, None])
        return self._memo("centroids", build)

    @property
    def area_epsilon(self) -> float:
        """Area below which a face counts as degenerate."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return 1e-12 * float(np.sum((hi - lo) ** 2))

    def check_nondegenerate(self) -> None:
        bad = np.flatnonzero(self.face_areas < self.area_epsilon)
        if bad.size:
            raise ZeroArea(f"{bad.size} face(s) with vanishing vector area, "
                           f"first is face {bad[0]}")

    def face_halfedges(self, face: int) -> np.ndarray:
        return np.arange(self.face_offsets[face], self.face_offsets[face + 1])

    def edge_index(self, a: int, b: int) -> int:
        """Index of the edge joining vertices ``a`` and ``b``."""
        lo, hi = (a, b) if a < b else (b, a)
        i = np.searchsorted(self._edge_keys, lo * self.n_vertices + hi)
        if i >= self.n_edges or self._edge_keys[i] != lo * self.n_vertices + hi:
            raise KeyError((a, b))
        return int(i)

    @property
    def _edge_keys(self) -> np.ndarray:
        return self._memo("edge_keys", lambda: _frozen(
            self.edges[:, 0].astype(np.int64) * self.n_vertices + self.edges[:, 1]))

    def with_vertices(self, vertices) -> "PolygonMesh":
        """Same connectivity, new positions."""
        vertices = np.asarray(vertices, dtype=float)
        if vertices.shape != self.vertices.shape:
            raise ValueError("vertex array shape mismatch")
        return PolygonMesh(vertices, self.faces, self.edges, self.he_src,
                           self.he_dst, self.he_face, self.he_local, self.he_edge,
                           self.he_sign, self.face_offsets)


@dataclass(frozen=True)
class FaceGeometry:
    vector_area: np.ndarray
    area: float
    centroid: np.ndarray
    unit_normal: np.ndarray


def build_mesh(vertex_positions, face_vertex_lists: Sequence[Sequence[int]]) -> PolygonMesh:
    """Validate connectivity and build the halfedge/edge tables."""
    verts = np.asarray(vertex_positions, dtype=float).reshape(-1, 3)
    nv = len(verts)
    faces = []
    for fi, f in enumerate(face_vertex_lists):
        f = tuple(int(i) for i in f)
        if len(f) < 3:
            raise DegenerateFace(f"face {fi} has fewer than 3 vertices")
        if len(set(f)) != len(f):
            raise DegenerateFace(f"face {fi} repeats a vertex: {f}")
        if min(f) < 0 or max(f) >= nv:
            raise IndexOutOfRange(f"face {fi} references a vertex outside [0, {nv})")
        faces.append(f)
    faces = tuple(faces)

    degree = np.fromiter((len(f) for f in faces), dtype=np.int64, count=len(faces))
    offsets = np.zeros(len(faces) + 1, dtype=np.int64)
    np.cumsum(degree, out=offsets[1:])
    he_src = np.fromiter((v for f in faces for v in f), dtype=np.int64, count=offsets[-1])
    he_face = np.repeat(np.arange(len(faces)), degree)
    he_local = np.arange(offsets[-1]) - offsets[:-1][he_face]
    he_dst = he_src[offsets[:-1][he_face] + (he_local + 1) % degree[he_face]]

    lo = np.minimum(he_src, he_dst)
    hi = np.maximum(he_src, he_dst)
    keys, he_edge = np.unique(lo * max(nv, 1) + hi, return_inverse=True)
    edges = np.column_stack([keys // max(nv, 1), keys % max(nv, 1)]).astype(np.int64)
    he_sign = np.where(he_src < he_dst, 1, -1).astype(np.int64)

    count = np.bincount(he_edge, minlength=len(edges))
    if np.any(count > 2):
        e = int(np.flatnonzero(count > 2)[0])
        raise NonManifoldEdge(f"edge {tuple(edges[e])} has {count[e]} incident faces")
    sign_sum = np.bincount(he_edge, weights=he_sign, minlength=len(edges))
    bad = (count == 2) & (sign_sum != 0)
    if np.any(bad):
        e = int(np.flatnonzero(bad)[0])
        raise InconsistentOrientation(
            f"faces on both sides of edge {tuple(edges[e])} traverse it the same way")
    return PolygonMesh(verts, faces, edges, he_src, he_dst, he_face, he_local,
                       he_edge.astype(np.int64), he_sign, offsets)


def incidence(mesh: PolygonMesh, face: int, edge: int) -> int:
    """Incidence number [face:edge] in {+1, -1, 0}."""
    if not 0 <= face < mesh.n_faces:
        raise IndexOutOfRange(f"face {face}")
    if not 0 <= edge < mesh.n_edges:
        raise IndexOutOfRange(f"edge {edge}")
    hes = mesh.face_halfedges(face)
    hit = hes[mesh.he_edge[hes] == edge]
    return int(mesh.he_sign[hit[0]]) if hit.size else 0


def face_geometry(mesh: PolygonMesh, face: int) -> FaceGeometry:
    if not 0 <= face < mesh.n_faces:
        raise IndexOutOfRange(f"face {face}")
    pts = mesh.vertices[list(mesh.faces[face])]
    va = 0.5 * np.cross(pts, np.roll(pts, -1, axis=0)).sum(axis=0)
    area = float(np.linalg.norm(va))
    if area < mesh.area_epsilon:
        raise ZeroArea(f"face {face} has vanishing vector area")
    return FaceGeometry(va, area, pts.mean(axis=0), va / area)


def mesh_spacing(mesh: PolygonMesh) -> float:
    """Mean edge length ``h``."""
    if mesh.n_edges == 0:
        raise ValueError("mesh has no edges")
    return float(mesh.edge_lengths.mean())


def min_edge_length(mesh: PolygonMesh) -> float:
    if mesh.n_edges == 0:
        raise ValueError("mesh has no edges")
    return float(mesh.edge_lengths.min())
