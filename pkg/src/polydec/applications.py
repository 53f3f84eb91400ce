"""Implicit mean curvature flow, Helmholtz-Hodge decomposition, Lie advection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _assembly as asm
from .cochains import Cochain, DegreeMismatch, VectorField, aw_mass, flat, sharp
from .linalg import NoConvergence, SolveReport, solve
from .mesh import PolygonMesh
from .operators import codifferential, exterior_derivative, hodge_star, laplacian, \
    lie_derivative_operator

log = logging.getLogger(__name__)


class SolverFailure(RuntimeError):
    pass


class GeometryCollapse(RuntimeError):
    pass


class NumericalBlowup(RuntimeError):
    """Raised by :func:`lie_advect`; ``partial`` holds the snapshots taken so far."""

    def __init__(self, msg: str, partial: list):
        super().__init__(msg)
        self.partial = partial


# -- mean curvature flow -------------------------------------------------------

@dataclass
class FlowConfig:
    t: float = 1e-4
    iterations: int = 10
    scheme: str = "ours"
    pinned: tuple = ()          # vertex indices held fixed (e.g. a planar boundary)

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t < 0:
            raise ValueError("time step must be finite and nonnegative")
        if self.iterations < 0:
            raise ValueError("iteration count must be nonnegative")


def dirichlet_energy(mesh: PolygonMesh) -> float:
    """Sum over the coordinate functions of (d f)^T M1 (d f), with the
    geometric 1-form mass matrix. Roughly twice the surface area."""
    df = asm.d0(mesh) @ mesh.vertices
    return float(np.sum(df * (aw_mass(mesh, 1) @ df)))


def mean_radius(mesh: PolygonMesh, center=None) -> float:
    c = mesh.vertices.mean(axis=0) if center is None else np.asarray(center)
    return float(np.linalg.norm(mesh.vertices - c, axis=1).mean())


def mean_curvature_flow(mesh: PolygonMesh, config: FlowConfig) -> list:
    """Backward Euler smoothing of vertex positions; returns every mesh, input first.

    Each step solves ``(I + t Delta) f_t = f_0`` per coordinate with
    ``Delta = delta d`` rebuilt on the current geometry. Faces smaller than
    the input mesh's area threshold raise :class:`GeometryCollapse`. Our ``delta d`` is
    the positive (Hodge) Laplacian, so this is the diffusive direction.
    """
    meshes = [mesh]
    n = mesh.n_vertices
    pinned = np.asarray(config.pinned, dtype=int)
    # threshold fixed at the input scale so uniform shrinking is noticed
    area_eps = mesh.area_epsilon
    for it in range(config.iterations):
        cur = meshes[-1]
        A = sp.identity(n, format="csr") + config.t * laplacian(cur, 0, config.scheme).matrix
        if pinned.size:
            keep = np.ones(n)
            keep[pinned] = 0.0
            A = (sp.diags(keep) @ A + sp.diags(1.0 - keep)).tocsr()
        try:
            lu = spla.splu(A.tocsc())
        except RuntimeError as exc:
            raise SolverFailure(f"iteration {it}: {exc}") from None
        new = lu.solve(cur.vertices)
        if not np.all(np.isfinite(new)):
            raise SolverFailure(f"iteration {it}: non-finite positions")
        nxt = cur.with_vertices(new)
        small = nxt.face_areas < area_eps
        if np.any(small):
            raise GeometryCollapse(
                f"iteration {it}: {int(small.sum())} faces fell below the area threshold")
        meshes.append(nxt)
    return meshes


# -- Helmholtz-Hodge decomposition ------------------------------------------------

@dataclass
class HHDResult:
    omega: Cochain                  # input 1-cochain
    potential: Cochain              # beta, a 2-cochain
    rotational: Cochain             # delta beta
    harmonic: Cochain               # gamma = omega - delta beta
    report: SolveReport
    rotational_sharp: np.ndarray | None = None
    harmonic_sharp: np.ndarray | None = None

    @property
    def potential_vertex(self) -> np.ndarray:
        """star2(beta): the stream function as vertex values."""
        return hodge_star(self.potential.mesh, 2)(self.potential.values)


def helmholtz_hodge(mesh: PolygonMesh, field, with_sharps: bool = True,
                    tol: float = 1e-10) -> HHDResult:
    """Split a 1-form into a co-exact part and a remainder: omega = delta beta + gamma.

    ``beta`` is the minimal-norm least-squares solution of d delta beta = d omega.
    ``field`` is a 1-cochain or a tangent vector field (flattened first).
    """
    if isinstance(field, Cochain):
        if field.degree != 1 or field.mesh is not mesh:
            raise DegreeMismatch("HHD needs a 1-cochain on the given mesh")
        omega = field
    else:
        omega = flat(field if isinstance(field, VectorField) else VectorField(field), mesh)
    d1 = exterior_derivative(mesh, 1)
    delta2 = codifferential(mesh, 2)
    A = (d1 @ delta2).matrix
    rhs = d1(omega.values)
    if not np.any(rhs):
        beta = np.zeros(mesh.n_faces)
        report = SolveReport("least-squares", 0, 0.0, True)
    else:
        try:
            beta, report = solve(A, rhs, method="least-squares", tol=tol)
        except NoConvergence as exc:
            raise SolverFailure(str(exc)) from None
    potential = Cochain(2, beta, mesh)
    rot = delta2(potential)
    gamma = omega - rot
    res = HHDResult(omega, potential, rot, gamma, report)
    if with_sharps:
        res.rotational_sharp = sharp(rot)
        res.harmonic_sharp = sharp(gamma)
    return res


# -- Lie advection -------------------------------------------------------------------

def lie_advect(mesh: PolygonMesh, X_flat: Cochain, alpha0: Cochain, t: float,
               iterations: int, snapshot_every: int | None = None) -> list:
    """Forward Euler for d alpha/dt = -L_X alpha.

    Returns ``[(step, cochain), ...]`` with step 0 and the final step always
    included, plus every ``snapshot_every`` steps.
    """
    if alpha0.degree not in (0, 1):
        raise DegreeMismatch("advection is implemented for 0- and 1-forms")
    if X_flat.mesh is not mesh or alpha0.mesh is not mesh:
        raise DegreeMismatch("field and form must live on the given mesh")
    L = lie_derivative_operator(X_flat, alpha0.degree).matrix
    step_matrix = (sp.identity(L.shape[0], format="csr") - t * L).tocsr()
    a = alpha0.values.copy()
    snaps = [(0, alpha0)]
    for k in range(1, iterations + 1):
        a = step_matrix @ a
        if not np.all(np.isfinite(a)) or np.abs(a).max() > 1e12:
            raise NumericalBlowup(f"values exceeded 1e12 at step {k}", snaps)
        if k == iterations or (snapshot_every and k % snapshot_every == 0):
            snaps.append((k, Cochain(alpha0.degree, a.copy(), mesh)))
    return snaps


def relative_distance(a: Cochain, b: Cochain) -> float:
    """Vertex-area-weighted relative L2 distance between the sharps of two 1-cochains
    (or between two 0-cochains)."""
    mesh = a.mesh
    w = asm.vertex_weights(mesh)
    if a.degree == 0:
        va, vb = a.values[:, None], b.values[:, None]
    else:
        va, vb = sharp(a), sharp(b)
    num = np.sum(w * np.sum((va - vb) ** 2, axis=1))
    den = np.sum(w * np.sum(vb ** 2, axis=1))
    return float(np.sqrt(num / den))
