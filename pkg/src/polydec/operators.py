"""Primal-to-primal DEC operators on polygonal meshes.

All linear operators are returned as :class:`SparseOperator` objects wrapping
a CSR matrix between cochain spaces. Mesh-only operators are cached on the
mesh; operators depending on a vector field are rebuilt per call.

Hodge stars of 1-forms and the 1-form inner product are assembled through
the halfedge space: edge values are sign-folded onto face-oriented
halfedges, the face-local matrices act there, and the two halfedges of an
interior edge are averaged back (``asm.fold``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _assembly as asm
from .cochains import Cochain, DegreeMismatch, aw_mass
from .mesh import PolygonMesh


class DegreeOverflow(ValueError):
    pass


class SchemeDegreeUnsupported(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Linear map from ``src``-cochains to ``dst``-cochains of one mesh."""

    matrix: sp.csr_matrix
    src: int
    dst: int
    mesh: PolygonMesh

    def __post_init__(self):
        shape = (self.mesh.n_cells(self.dst), self.mesh.n_cells(self.src))
        if self.matrix.shape != shape:
            raise DegreeMismatch(f"matrix shape {self.matrix.shape} != {shape}")

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, c):
        if isinstance(c, Cochain):
            if c.degree != self.src or c.mesh is not self.mesh:
                raise DegreeMismatch(
                    f"operator takes {self.src}-cochains, got a {c.degree}-cochain")
            return Cochain(self.dst, self.matrix @ c.values, self.mesh)
        return self.matrix @ np.asarray(c, dtype=float)

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            if other.dst != self.src or other.mesh is not self.mesh:
                raise DegreeMismatch("cannot compose operators with mismatched degrees")
            return SparseOperator((self.matrix @ other.matrix).tocsr(),
                                  other.src, self.dst, self.mesh)
        return self(other)

    def _like(self, other):
        if other.src != self.src or other.dst != self.dst or other.mesh is not self.mesh:
            raise DegreeMismatch("operators act between different spaces")

    def __add__(self, other):
        self._like(other)
        return SparseOperator((self.matrix + other.matrix).tocsr(),
                              self.src, self.dst, self.mesh)

    def __sub__(self, other):
        self._like(other)
        return SparseOperator((self.matrix - other.matrix).tocsr(),
                              self.src, self.dst, self.mesh)

    def __neg__(self):
        return SparseOperator(-self.matrix, self.src, self.dst, self.mesh)

    def __mul__(self, c: float):
        return SparseOperator(c * self.matrix, self.src, self.dst, self.mesh)

    __rmul__ = __mul__

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _scheme(scheme: str) -> str:
    s = scheme.lower()
    if s in ("ours", "polydec"):
        return "ours"
    if s in ("aw", "aw0", "aw_geometric"):
        return "aw"
    raise ValueError(f"unknown scheme {scheme!r}")


def _op(mesh, key, src, dst, build) -> SparseOperator:
    return asm._cached(mesh, ("op",) + key,
                       lambda: SparseOperator(build().tocsr(), src, dst, mesh))


def exterior_derivative(mesh: PolygonMesh, k: int) -> SparseOperator:
    if k == 0:
        return _op(mesh, ("d", 0), 0, 1, lambda: asm.d0(mesh))
    if k == 1:
        return _op(mesh, ("d", 1), 1, 2, lambda: asm.d1(mesh))
    raise DegreeOverflow(f"d is defined on 0- and 1-cochains, not {k}")


# -- wedge -----------------------------------------------------------------

def wedge(alpha: Cochain, beta: Cochain) -> Cochain:
    """Polygonal wedge product of a k-cochain and an l-cochain (k + l <= 2)."""
    if alpha.mesh is not beta.mesh:
        raise DegreeMismatch("cochains live on different meshes")
    k, l = alpha.degree, beta.degree
    if k + l > 2:
        raise DegreeOverflow(f"{k}-form wedge {l}-form exceeds dimension 2")
    mesh = alpha.mesh
    if k > l:
        # only 1^0 and 2^0 get here; both commute with a 0-form
        return wedge(beta, alpha)
    a, b = alpha.values, beta.values
    if k == 0 and l == 0:
        return Cochain(0, a * b, mesh)
    if k == 0 and l == 1:
        return Cochain(1, (asm.edge_average(mesh) @ a) * b, mesh)
    if k == 0 and l == 2:
        return Cochain(2, (asm.face_average(mesh) @ a) * b, mesh)
    S = asm.transfer(mesh)
    per_he = (S @ a) * (asm.wedge_matrix(mesh) @ (S @ b))
    return Cochain(2, asm.face_sum(mesh) @ per_he, mesh)


def wedge_operator(alpha: Cochain, l: int) -> SparseOperator:
    """The linear map beta -> alpha ^ beta on l-cochains."""
    mesh, k = alpha.mesh, alpha.degree
    if k + l > 2:
        raise DegreeOverflow(f"{k}-form wedge {l}-form exceeds dimension 2")
    a = alpha.values
    if k == 0:
        avg = {0: None, 1: asm.edge_average(mesh), 2: asm.face_average(mesh)}[l]
        diag = a if avg is None else avg @ a
        return SparseOperator(sp.diags(diag).tocsr(), l, l, mesh)
    if k == 2:
        return SparseOperator(sp.diags(a).tocsr() @ asm.face_average(mesh), 0, 2, mesh)
    if l == 0:
        return SparseOperator(sp.diags(a).tocsr() @ asm.edge_average(mesh), 0, 1, mesh)
    S, R = asm.transfer(mesh), asm.wedge_matrix(mesh)
    row = sp.diags(S @ a) @ R @ S
    return SparseOperator((asm.face_sum(mesh) @ row).tocsr(), 1, 2, mesh)


# -- Hodge stars and inner products -----------------------------------------

def _star1_halfedge(mesh: PolygonMesh) -> sp.csr_matrix:
    """H x H: W1 R^T, the per-face Hodge star on face-oriented halfedges."""
    return asm._cached(mesh, "star1_he", lambda: (
        asm.metric_matrix(mesh) @ asm.wedge_matrix(mesh).T).tocsr())


def hodge_star(mesh: PolygonMesh, k: int) -> SparseOperator:
    mesh.check_nondegenerate()
    if k == 0:
        return _op(mesh, ("star", 0), 0, 2, lambda:
                   sp.diags(mesh.face_areas) @ asm.face_average(mesh))
    if k == 1:
        return _op(mesh, ("star", 1), 1, 1, lambda:
                   asm.fold(mesh) @ _star1_halfedge(mesh) @ asm.transfer(mesh))
    if k == 2:
        return _op(mesh, ("star", 2), 2, 0, lambda:
                   sp.diags(1.0 / asm.vertex_weights(mesh)) @ asm.face_average(mesh).T)
    raise DegreeOverflow(f"no Hodge star on {k}-forms")


def inner_product_matrix(mesh: PolygonMesh, k: int, scheme: str = "ours") -> SparseOperator:
    """Gram matrix of the discrete L2 inner product on k-cochains."""
    s = _scheme(scheme)
    if s == "aw":
        if k not in (0, 1):
            raise SchemeDegreeUnsupported(f"AW inner product on {k}-forms")
        return _op(mesh, ("M_aw", k), k, k, lambda: aw_mass(mesh, k))
    mesh.check_nondegenerate()
    FV = asm.face_average(mesh)
    if k == 0:
        return _op(mesh, ("M", 0), 0, 0, lambda: FV.T @ sp.diags(mesh.face_areas) @ FV)
    if k == 1:
        S, R = asm.transfer(mesh), asm.wedge_matrix(mesh)
        return _op(mesh, ("M", 1), 1, 1, lambda:
                   S.T @ R @ asm.pairing(mesh) @ _star1_halfedge(mesh) @ S)
    if k == 2:
        return _op(mesh, ("M", 2), 2, 2, lambda:
                   FV @ sp.diags(1.0 / asm.vertex_weights(mesh)) @ FV.T)
    raise DegreeOverflow(f"degree {k}")


def inner_product(alpha: Cochain, beta: Cochain, scheme: str = "ours") -> float:
    if alpha.degree != beta.degree or alpha.mesh is not beta.mesh:
        raise DegreeMismatch("inner product needs cochains of one degree on one mesh")
    M = inner_product_matrix(alpha.mesh, alpha.degree, scheme)
    return float(alpha.values @ M(beta.values))


# -- codifferential and Laplacian --------------------------------------------

def codifferential(mesh: PolygonMesh, k: int, scheme: str = "ours") -> SparseOperator:
    """delta_k: k-cochains to (k-1)-cochains."""
    s = _scheme(scheme)
    if s == "aw":
        if k != 1:
            raise SchemeDegreeUnsupported("AW codifferential exists on 1-forms only")
        def build():
            M0 = aw_mass(mesh, 0)
            return sp.diags(1.0 / M0.diagonal()) @ asm.d0(mesh).T @ aw_mass(mesh, 1)
        return _op(mesh, ("delta_aw", 1), 1, 0, build)
    if k == 1:
        return asm._cached(mesh, ("op", "delta", 1), lambda: -(
            hodge_star(mesh, 2) @ exterior_derivative(mesh, 1) @ hodge_star(mesh, 1)))
    if k == 2:
        return asm._cached(mesh, ("op", "delta", 2), lambda: -(
            hodge_star(mesh, 1) @ exterior_derivative(mesh, 0) @ hodge_star(mesh, 2)))
    raise DegreeOverflow(f"codifferential on {k}-forms")


def laplacian(mesh: PolygonMesh, k: int, scheme: str = "ours") -> SparseOperator:
    """Laplace-deRham operator d delta + delta d on k-cochains."""
    s = _scheme(scheme)
    if s == "aw":
        if k != 0:
            raise SchemeDegreeUnsupported("geometric AW Laplacian exists on 0-forms only")
        return asm._cached(mesh, ("op", "lap_aw", 0), lambda:
                           codifferential(mesh, 1, "aw") @ exterior_derivative(mesh, 0))

    def build():
        if k == 0:
            return codifferential(mesh, 1) @ exterior_derivative(mesh, 0)
        if k == 1:
            return (exterior_derivative(mesh, 0) @ codifferential(mesh, 1)
                    + codifferential(mesh, 2) @ exterior_derivative(mesh, 1))
        if k == 2:
            return exterior_derivative(mesh, 1) @ codifferential(mesh, 2)
        raise DegreeOverflow(f"Laplacian on {k}-forms")
    return asm._cached(mesh, ("op", "lap", k), build)


# -- contraction and Lie derivative ------------------------------------------

def contraction_operator(X_flat: Cochain, k: int) -> SparseOperator:
    """alpha -> i_X alpha on k-cochains, k in {1, 2}."""
    if X_flat.degree != 1:
        raise DegreeMismatch("the vector field enters as a 1-cochain")
    mesh = X_flat.mesh
    x = X_flat.values
    if k == 1:
        # -star2( star1(alpha) ^ X_flat )
        S, R = asm.transfer(mesh), asm.wedge_matrix(mesh)
        right = asm.face_sum(mesh) @ sp.diags(R @ (S @ x)) @ S
        m = -(hodge_star(mesh, 2).matrix @ right @ hodge_star(mesh, 1).matrix)
        return SparseOperator(m.tocsr(), 1, 0, mesh)
    if k == 2:
        # star1( star2(alpha) ^ X_flat )
        m = (hodge_star(mesh, 1).matrix @ sp.diags(x) @ asm.edge_average(mesh)
             @ hodge_star(mesh, 2).matrix)
        return SparseOperator(m.tocsr(), 2, 1, mesh)
    raise DegreeMismatch(f"contraction operator needs k in {{1, 2}}, got {k}")


def contraction(X_flat: Cochain, alpha: Cochain):
    """i_X alpha. On 0-forms this is the zero map and returns ``0.0``."""
    if alpha.degree == 0:
        return 0.0
    return contraction_operator(X_flat, alpha.degree)(alpha)


def lie_derivative_operator(X_flat: Cochain, k: int) -> SparseOperator:
    """Cartan's formula i_X d + d i_X on k-cochains."""
    mesh = X_flat.mesh
    terms = []
    if k < 2:
        terms.append(contraction_operator(X_flat, k + 1) @ exterior_derivative(mesh, k))
    if k > 0:
        terms.append(exterior_derivative(mesh, k - 1) @ contraction_operator(X_flat, k))
    if not terms:
        raise DegreeMismatch(f"Lie derivative on {k}-forms")
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def lie_derivative(X_flat: Cochain, alpha: Cochain) -> Cochain:
    return lie_derivative_operator(X_flat, alpha.degree)(alpha)
