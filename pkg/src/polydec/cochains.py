"""Discrete forms and their construction from analytic fields.

Analytic fields are vectorized callables taking an ``(N, 3)`` array of points.
A 1-form is represented by its ambient covector ``B`` (so that the form is
``B_x dx + B_y dy + B_z dz``), a 2-form by its flux density ``w`` (so that
``Omega(u, v) = <w, u x v>``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import _assembly as asm
from .mesh import PolygonMesh


class DegreeMismatch(ValueError):
    pass


class QuadratureOrderInvalid(ValueError):
    pass


class IsolatedVertex(ValueError):
    pass


@dataclass(eq=False)
class Cochain:
    """A real value per k-cell of ``mesh``."""

    degree: int
    values: np.ndarray
    mesh: PolygonMesh

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise DegreeMismatch(f"degree {self.degree} not in 0..2")
        self.values = np.asarray(self.values, dtype=float)
        n = self.mesh.n_cells(self.degree)
        if self.values.shape != (n,):
            raise DegreeMismatch(
                f"{self.degree}-cochain needs {n} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("cochain values must be finite")

    def _check(self, other: "Cochain") -> None:
        if other.mesh is not self.mesh or other.degree != self.degree:
            raise DegreeMismatch("cochains live on different meshes or degrees")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.degree, self.values + other.values, self.mesh)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.degree, self.values - other.values, self.mesh)

    def __neg__(self) -> "Cochain":
        return Cochain(self.degree, -self.values, self.mesh)

    def __mul__(self, c: float) -> "Cochain":
        return Cochain(self.degree, c * self.values, self.mesh)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.values)


def zeros(mesh: PolygonMesh, degree: int) -> Cochain:
    return Cochain(degree, np.zeros(mesh.n_cells(degree)), mesh)


def constant(mesh: PolygonMesh, value: float = 1.0) -> Cochain:
    return Cochain(0, np.full(mesh.n_vertices, float(value)), mesh)


# -- analytic fields -------------------------------------------------------

Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarField:
    func: Func
    degree = 0

    def __call__(self, x):
        return np.broadcast_to(self.func(x), (len(x),)).astype(float)


@dataclass(frozen=True)
class CovectorField:
    func: Func
    degree = 1

    def __call__(self, x):
        return np.broadcast_to(self.func(x), (len(x), 3)).astype(float)


@dataclass(frozen=True)
class VectorField(CovectorField):
    """Tangent vector field; its flat is the line integral of the metric dual."""


@dataclass(frozen=True)
class TwoFormField:
    func: Func
    degree = 2

    def __call__(self, x):
        return np.broadcast_to(self.func(x), (len(x), 3)).astype(float)


# -- quadrature ------------------------------------------------------------

def gauss_legendre(order: int):
    """``order``-point Gauss-Legendre nodes and weights on [0, 1]."""
    if int(order) != order or order < 1:
        raise QuadratureOrderInvalid(f"edge quadrature order {order}")
    t, w = np.polynomial.legendre.leggauss(int(order))
    return 0.5 * (t + 1.0), 0.5 * w


_TRIANGLE_RULES = {
    1: (np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0])),
    2: (np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]]),
        np.full(3, 1 / 3)),
}


def _dunavant4():
    a, b = 0.445948490915965, 0.091576213509771
    wa, wb = 0.223381589678011, 0.109951743655322
    pts = []
    for x in (a, b):
        y = 1 - 2 * x
        pts += [[x, x, y], [x, y, x], [y, x, x]]
    return np.array(pts), np.array([wa] * 3 + [wb] * 3)


_TRIANGLE_RULES[4] = _dunavant4()


def triangle_rule(degree: int):
    """Symmetric rule on a triangle: barycentric points and weights summing to 1."""
    if degree not in _TRIANGLE_RULES:
        raise QuadratureOrderInvalid(
            f"triangle rule degree {degree}; available {sorted(_TRIANGLE_RULES)}")
    return _TRIANGLE_RULES[degree]


def _line_integrals(field: Callable, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """int_0^1 <b - a, F(a + (b - a) t)> dt for each segment."""
    t, w = gauss_legendre(order)
    seg = b - a
    out = np.zeros(len(a))
    for ti, wi in zip(t, w):
        out += wi * np.einsum("ij,ij->i", seg, field(a + ti * seg))
    return out


def discretize(field, mesh: PolygonMesh, degree: int | None = None,
               edge_order: int = 4, tri_degree: int = 4) -> Cochain:
    """Integrate an analytic k-form over the k-cells of ``mesh``."""
    k = field.degree if degree is None else degree
    if k != field.degree:
        raise DegreeMismatch(f"{type(field).__name__} is a {field.degree}-form, asked for {k}")
    v = mesh.vertices
    if k == 0:
        return Cochain(0, field(v), mesh)
    if k == 1:
        e = mesh.edges
        return Cochain(1, _line_integrals(field, v[e[:, 0]], v[e[:, 1]], edge_order), mesh)

    # centroid fan: triangles (C, v_i, v_{i+1}) per halfedge
    bary, w = triangle_rule(tri_degree)
    c = mesh.face_centroids[mesh.he_face]
    p, q = v[mesh.he_src], v[mesh.he_dst]
    half_normal = 0.5 * np.cross(p - c, q - c)
    acc = np.zeros(mesh.n_halfedges)
    for (b0, b1, b2), wi in zip(bary, w):
        acc += wi * np.einsum("ij,ij->i", field(b0 * c + b1 * p + b2 * q), half_normal)
    return Cochain(2, np.bincount(mesh.he_face, weights=acc, minlength=mesh.n_faces), mesh)


def flat(X, mesh: PolygonMesh, order: int = 4) -> Cochain:
    """X^flat(e) = int_0^1 <e'(t), X(e(t))> dt along each straight edge."""
    if not isinstance(X, CovectorField):
        X = VectorField(X)
    e = mesh.edges
    v = mesh.vertices
    return Cochain(1, _line_integrals(X, v[e[:, 0]], v[e[:, 1]], order), mesh)


def sharp(beta: Cochain, mesh: PolygonMesh | None = None) -> np.ndarray:
    """Per-vertex vector field reconstructed from a 1-cochain.

    Each face around ``v`` contributes the vector built from its two
    halfedges incident to ``v``; contributions are averaged over the faces.
    """
    mesh = beta.mesh if mesh is None else mesh
    if beta.degree != 1:
        raise DegreeMismatch("sharp acts on 1-cochains")
    eps_he = asm.transfer(mesh) @ beta.values
    vec = mesh.halfedge_vectors
    length = np.linalg.norm(vec, axis=1)
    n = mesh.face_normals[mesh.he_face]
    h2 = np.arange(mesh.n_halfedges)   # starts at v
    h1 = mesh.he_prev                  # ends at v
    l1, l2 = length[h1], length[h2]
    contrib = ((eps_he[h2] / (l2 * l1))[:, None] * np.cross(n, vec[h1])
               - (eps_he[h1] / (l1 * l2))[:, None] * np.cross(n, vec[h2]))
    rho = np.bincount(mesh.he_src, minlength=mesh.n_vertices)
    if np.any(rho == 0):
        raise IsolatedVertex(f"vertex {int(np.flatnonzero(rho == 0)[0])} has no faces")
    out = np.zeros((mesh.n_vertices, 3))
    np.add.at(out, mesh.he_src, contrib)
    return out / rho[:, None]


# -- error norms -----------------------------------------------------------

def aw_mass(mesh: PolygonMesh, degree: int) -> sp.csr_matrix:
    """Inner-product matrices used for error norms.

    Degree 0 and 2 are diagonal; degree 1 sums face-local midpoint Gram
    blocks over all faces.
    """
    if degree == 0:
        return sp.diags(asm.vertex_weights(mesh)).tocsr()
    if degree == 1:
        S = asm.transfer(mesh)
        return asm._cached(mesh, "M1_aw",
                           lambda: (S.T @ asm.midpoint_matrix(mesh) @ S).tocsr())
    if degree == 2:
        return sp.diags(1.0 / mesh.face_areas).tocsr()
    raise DegreeMismatch(f"degree {degree}")


def interior_mask(mesh: PolygonMesh, degree: int) -> np.ndarray:
    """Cells away from the boundary: non-boundary vertices and edges, and
    faces without a boundary edge."""
    if degree == 0:
        return ~mesh.boundary_vertices
    if degree == 1:
        return ~mesh.boundary_edges
    touches = np.zeros(mesh.n_faces, dtype=bool)
    touches[mesh.he_face[mesh.boundary_edges[mesh.he_edge]]] = True
    return ~touches


def error_norms(xi: Cochain, Xi: Cochain, mask: np.ndarray | None = None) -> tuple[float, float]:
    """(L2, Linf) distance between a computed cochain and a reference one.

    L2 is the square root of the quadratic form of the difference. With a
    boolean ``mask`` both norms only see the selected cells.
    """
    if xi.degree != Xi.degree or xi.mesh is not Xi.mesh:
        raise DegreeMismatch("error_norms needs cochains of one degree on one mesh")
    diff = xi.values - Xi.values
    M = aw_mass(xi.mesh, xi.degree)
    if mask is not None:
        diff = diff[mask]
        M = M[mask][:, mask]
    if diff.size == 0:
        return 0.0, 0.0
    q = float(diff @ (M @ diff))
    return float(np.sqrt(max(q, 0.0))), float(np.abs(diff).max())
