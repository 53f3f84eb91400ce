"""Face-local building blocks assembled into global sparse matrices.

Everything here is cached on the mesh (meshes are immutable). Matrices live
either in cochain spaces (V, E, F) or in the halfedge space H, where a
1-cochain is represented with face-consistent orientation.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .mesh import PolygonMesh


def _csr(rows, cols, vals, shape) -> sp.csr_matrix:
    m = sp.coo_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=shape)
    m = m.tocsr()
    m.sum_duplicates()
    return m


def _cached(mesh: PolygonMesh, key, build):
    if key not in mesh._cache:
        mesh._cache[key] = build()
    return mesh._cache[key]


def d0(mesh: PolygonMesh) -> sp.csr_matrix:
    def build():
        ne = mesh.n_edges
        rows = np.repeat(np.arange(ne), 2)
        cols = mesh.edges.ravel()
        vals = np.tile([-1.0, 1.0], ne)
        return _csr(rows, cols, vals, (ne, mesh.n_vertices))
    return _cached(mesh, "d0", build)


def d1(mesh: PolygonMesh) -> sp.csr_matrix:
    return _cached(mesh, "d1", lambda: _csr(
        mesh.he_face, mesh.he_edge, mesh.he_sign, (mesh.n_faces, mesh.n_edges)))


def transfer(mesh: PolygonMesh) -> sp.csr_matrix:
    """H x E: edge values to face-oriented halfedge values (signed)."""
    return _cached(mesh, "S", lambda: _csr(
        np.arange(mesh.n_halfedges), mesh.he_edge, mesh.he_sign,
        (mesh.n_halfedges, mesh.n_edges)))


def fold(mesh: PolygonMesh) -> sp.csr_matrix:
    """E x H: signed average of the (one or two) halfedges of each edge."""
    def build():
        w = mesh.he_sign / mesh.edge_face_count[mesh.he_edge]
        return _csr(mesh.he_edge, np.arange(mesh.n_halfedges), w,
                    (mesh.n_edges, mesh.n_halfedges))
    return _cached(mesh, "fold", build)


def pairing(mesh: PolygonMesh) -> sp.csr_matrix:
    """H x H matrix A: 1 on boundary halfedges, 1/2 on interior ones,
    -1/2 between the two opposing halfedges of an interior edge."""
    return _cached(mesh, "A", lambda: (transfer(mesh) @ fold(mesh)).tocsr())


def face_sum(mesh: PolygonMesh) -> sp.csr_matrix:
    """F x H: sums halfedge values per face."""
    return _cached(mesh, "Fsum", lambda: _csr(
        mesh.he_face, np.arange(mesh.n_halfedges), np.ones(mesh.n_halfedges),
        (mesh.n_faces, mesh.n_halfedges)))


def edge_average(mesh: PolygonMesh) -> sp.csr_matrix:
    """E x V matrix with 1/2 at both endpoints of each edge."""
    def build():
        ne = mesh.n_edges
        return _csr(np.repeat(np.arange(ne), 2), mesh.edges.ravel(),
                    np.full(2 * ne, 0.5), (ne, mesh.n_vertices))
    return _cached(mesh, "B", build)


def face_average(mesh: PolygonMesh) -> sp.csr_matrix:
    """F x V matrix with 1/p at the vertices of each p-gon."""
    return _cached(mesh, "FV", lambda: _csr(
        mesh.he_face, mesh.he_src, 1.0 / mesh.face_degree[mesh.he_face],
        (mesh.n_faces, mesh.n_vertices)))


def _shifted(mesh: PolygonMesh, shift: int, mask=None):
    """Flat index of the halfedge ``shift`` steps ahead within each face."""
    deg = mesh.face_degree[mesh.he_face]
    start = mesh.face_offsets[:-1][mesh.he_face]
    idx = start + (mesh.he_local + shift) % deg
    return idx if mask is None else idx[mask]


def wedge_matrix(mesh: PolygonMesh) -> sp.csr_matrix:
    """Block-diagonal H x H matrix R of the 1-form wedge product."""
    def build():
        deg = mesh.face_degree[mesh.he_face]
        h = np.arange(mesh.n_halfedges)
        rows, cols, vals = [], [], []
        amax = (int(mesh.face_degree.max()) - 1) // 2 if mesh.n_faces else 0
        for a in range(1, amax + 1):
            mask = (deg - 1) // 2 >= a
            c = 0.5 - a / deg[mask]
            rows += [h[mask], h[mask]]
            cols += [_shifted(mesh, a, mask), _shifted(mesh, -a, mask)]
            vals += [c, -c]
        if not rows:
            return sp.csr_matrix((mesh.n_halfedges, mesh.n_halfedges))
        return _csr(np.concatenate(rows), np.concatenate(cols),
                    np.concatenate(vals), (mesh.n_halfedges, mesh.n_halfedges))
    return _cached(mesh, "R", build)


def _face_gram(mesh: PolygonMesh, vectors: np.ndarray, key) -> sp.csr_matrix:
    """Block-diagonal H x H matrix <u_i, u_j> / |f| over the halfedges of each face."""
    def build():
        deg = mesh.face_degree[mesh.he_face]
        h = np.arange(mesh.n_halfedges)
        area = mesh.face_areas[mesh.he_face]
        rows, cols, vals = [], [], []
        for s in range(int(mesh.face_degree.max())):
            mask = deg > s
            j = _shifted(mesh, s, mask)
            rows.append(h[mask])
            cols.append(j)
            vals.append(np.einsum("ij,ij->i", vectors[mask], vectors[j]) / area[mask])
        return _csr(np.concatenate(rows), np.concatenate(cols),
                    np.concatenate(vals), (mesh.n_halfedges, mesh.n_halfedges))
    return _cached(mesh, key, build)


def metric_matrix(mesh: PolygonMesh) -> sp.csr_matrix:
    """Block-diagonal W1 with entries <e_i, e_j>/|f| on face-oriented halfedges."""
    return _face_gram(mesh, mesh.halfedge_vectors, "W1")


def midpoint_matrix(mesh: PolygonMesh) -> sp.csr_matrix:
    """Block-diagonal M_f = B_f B_f^T / |f| with centroid-relative edge midpoints."""
    mid = 0.5 * (mesh.vertices[mesh.he_src] + mesh.vertices[mesh.he_dst])
    return _face_gram(mesh, mid - mesh.face_centroids[mesh.he_face], "Mf")


def vertex_weights(mesh: PolygonMesh) -> np.ndarray:
    """sum over faces f containing v of |f|/p_f."""
    def build():
        w = (mesh.face_areas / mesh.face_degree)[mesh.he_face]
        return np.bincount(mesh.he_src, weights=w, minlength=mesh.n_vertices)
    return _cached(mesh, "vweights", build)
