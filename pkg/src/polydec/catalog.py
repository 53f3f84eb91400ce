"""Named analytic forms used by the convergence experiments and applications.

Each :class:`FormSet` lives on one surface. Results of wedge products, Hodge
stars, contractions and norms follow pointwise from the ambient
representations (covector ``B``, flux density ``w``) and the surface normal;
results needing derivatives (codifferential, Laplacian, Lie derivative) are
hand-coded closed forms stored in ``exact``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cochains import CovectorField, ScalarField, TwoFormField, VectorField
from .surfaces import AnalyticSurface, Plane, Sphere, Torus


def _xyz(p):
    return p[:, 0], p[:, 1], p[:, 2]


def _vec(*cols):
    return np.column_stack(cols)


def _dot(a, b):
    return np.einsum("ij,ij->i", a, b)


@dataclass
class FormSet:
    name: str
    surface: AnalyticSurface
    alpha: ScalarField | None = None
    beta: CovectorField | None = None
    gamma: CovectorField | None = None
    omega: TwoFormField | None = None
    X: VectorField | None = None
    exact: dict = field(default_factory=dict)
    note: str = ""


# -- pointwise analytic operations -----------------------------------------

def analytic_wedge(a, b):
    if a.degree > b.degree:
        a, b = b, a
    if a.degree == 0 and b.degree == 0:
        return ScalarField(lambda p: a(p) * b(p))
    if a.degree == 0 and b.degree == 1:
        return CovectorField(lambda p: a(p)[:, None] * b(p))
    if a.degree == 0 and b.degree == 2:
        return TwoFormField(lambda p: a(p)[:, None] * b(p))
    if a.degree == 1 and b.degree == 1:
        return TwoFormField(lambda p: np.cross(a(p), b(p)))
    raise ValueError("degree overflow")


def analytic_star(f, surface: AnalyticSurface):
    n = surface.normal
    if f.degree == 0:
        return TwoFormField(lambda p: f(p)[:, None] * n(p))
    if f.degree == 1:
        return CovectorField(lambda p: np.cross(n(p), f(p)))
    return ScalarField(lambda p: _dot(f(p), n(p)))


def analytic_contraction(X, f):
    if f.degree == 1:
        return ScalarField(lambda p: _dot(f(p), X(p)))
    if f.degree == 2:
        return CovectorField(lambda p: np.cross(f(p), X(p)))
    raise ValueError("contraction needs a 1- or 2-form")


def analytic_norm2(f, surface: AnalyticSurface) -> float:
    """Squared L2 norm of a form over the smooth surface."""
    n = surface.normal
    if f.degree == 0:
        return surface.integrate(lambda p: f(p) ** 2)
    if f.degree == 1:
        def g(p):
            b = f(p)
            nn = n(p)
            t = b - _dot(b, nn)[:, None] * nn
            return _dot(t, t)
        return surface.integrate(g)
    return surface.integrate(lambda p: _dot(f(p), n(p)) ** 2)


def gaussian(center):
    c = np.asarray(center, dtype=float)

    def value(p):
        return np.exp(-np.sum((p - c) ** 2, axis=1))

    def grad(p):
        return -2.0 * (p - c) * value(p)[:, None]
    return value, grad


# -- the catalog -------------------------------------------------------------

def _plane_trig() -> FormSet:
    def alpha(p):
        x, y, _ = _xyz(p)
        return np.sin(x) * np.cos(y) + 1

    def beta(p):
        x, y, _ = _xyz(p)
        return _vec(np.sin(x) ** 2 - 1, 3 * np.cos(x + 2) + np.sin(y), 0 * x)

    def gamma(p):
        x, y, _ = _xyz(p)
        return _vec(np.cos(x) * np.sin(y) + 3, np.cos(y), 0 * x)

    def omega(p):
        x, y, _ = _xyz(p)
        return _vec(0 * x, 0 * x, np.sin(x * y) + np.cos(1))

    return FormSet("plane_trig", Plane(), ScalarField(alpha), CovectorField(beta),
                   CovectorField(gamma), TwoFormField(omega),
                   note="trigonometric forms on [-1,1]^2 (wedge products)")


def _rotation(p):
    x, y, _ = _xyz(p)
    return _vec(-y, x, 0 * x)


def _torus_forms() -> FormSet:
    torus = Torus()

    def alpha(p):
        x, y, _ = _xyz(p)
        return x ** 2 + y ** 2

    def field_y(p):
        x, y, z = _xyz(p)
        rho = np.hypot(x, y)
        return 2 * _vec(-x * z, -y * z, rho ** 2 - rho)

    return FormSet("torus_star", torus, ScalarField(alpha), VectorField(_rotation),
                   omega=TwoFormField(torus.normal), X=VectorField(field_y),
                   note="x^2+y^2, rotation flat, area form on the (1, 1/2) torus")


def _sphere_forms() -> FormSet:
    def alpha(p):
        x, y, _ = _xyz(p)
        return x ** 2 + y ** 2

    def beta(p):
        x, y, z = _xyz(p)
        return _vec(-x * z, -y * z, x ** 2 + y ** 2)

    zero0 = ScalarField(lambda p: np.zeros(len(p)))
    zero1 = CovectorField(lambda p: np.zeros((len(p), 3)))
    zero2 = TwoFormField(lambda p: np.zeros((len(p), 3)))
    # every form is invariant under rotation about z, so L_X vanishes
    return FormSet("sphere_rot", Sphere(), ScalarField(alpha), CovectorField(beta),
                   omega=TwoFormField(lambda p: np.array(p, dtype=float)),
                   X=VectorField(_rotation),
                   exact={"L_X a": zero0, "L_X b": zero1, "L_X w": zero2},
                   note="rotation-invariant forms on the unit sphere, X = (-y, x, 0)")


def _plane_codiff() -> FormSet:
    def beta(p):
        x, y, _ = _xyz(p)
        return _vec(np.sin(2 * x) + np.cos(y / 2), 3 * np.sin(x) - np.cos(y), 0 * x)

    def kappa(p):
        x, y, _ = _xyz(p)
        return _vec(0 * x, 0 * x, np.sin((x + 1) / 4) + np.cos(1 - y / 3))

    def delta_beta(p):
        x, y, _ = _xyz(p)
        return -2 * np.cos(2 * x) - np.sin(y)

    def delta_kappa(p):
        x, y, _ = _xyz(p)
        return _vec(np.sin(1 - y / 3) / 3, -np.cos((x + 1) / 4) / 4, 0 * x)

    return FormSet("plane_codiff", Plane(), beta=CovectorField(beta),
                   omega=TwoFormField(kappa),
                   exact={"delta b": ScalarField(delta_beta),
                          "delta w": CovectorField(delta_kappa)},
                   note="codifferential test forms on [-1,1]^2")


def _plane_laplace() -> FormSet:
    def alpha(p):
        x, y, _ = _xyz(p)
        return np.sin(x - 1) - np.cos(2 * y)

    def lap(p):
        # Hodge sign convention: delta d = -(d^2/dx^2 + d^2/dy^2)
        x, y, _ = _xyz(p)
        return np.sin(x - 1) - 4 * np.cos(2 * y)

    return FormSet("plane_laplace", Plane(), ScalarField(alpha),
                   exact={"Delta a": ScalarField(lap)},
                   note="trigonometric 0-form for the Laplacian")


HHD_CENTERS = ((1.5, 0.0, 0.0), (-np.sqrt(2) / 2, np.sqrt(2) / 2, 0.5))
ADVECT_CENTER = (-np.sqrt(2) / 2, np.sqrt(2) / 2, 0.5)


def hhd_fields(torus: Torus | None = None):
    """(X_H, X_R, potential) for the torus decomposition experiment."""
    torus = torus or Torus()
    g1, dg1 = gaussian(HHD_CENTERS[0])
    g2, dg2 = gaussian(HHD_CENTERS[1])
    X_H = VectorField(_rotation)
    X_R = VectorField(lambda p: np.cross(dg1(p) - dg2(p), torus.normal(p)))
    return X_H, X_R, ScalarField(lambda p: g1(p) - g2(p))


def advection_field(torus: Torus | None = None) -> VectorField:
    torus = torus or Torus()
    _, dg = gaussian(ADVECT_CENTER)
    return VectorField(lambda p: -np.cross(dg(p), torus.normal(p)))


def _torus_hhd() -> FormSet:
    X_H, X_R, psi = hhd_fields()
    X = VectorField(lambda p: X_H(p) + X_R(p))
    return FormSet("torus_hhd", Torus(), alpha=psi, beta=X, X=X,
                   exact={"harmonic": X_H, "rotational": X_R},
                   note="solenoidal field X_H + X_R on the torus")


def _torus_advect() -> FormSet:
    return FormSet("torus_advect", Torus(), beta=advection_field(),
                   X=VectorField(_rotation),
                   note="vortex field Y advected by the rotation (-y, x, 0)")


CATALOG = {
    "plane_trig": _plane_trig,
    "torus_star": _torus_forms,
    "sphere_rot": _sphere_forms,
    "plane_codiff": _plane_codiff,
    "plane_laplace": _plane_laplace,
    "torus_hhd": _torus_hhd,
    "torus_advect": _torus_advect,
}


def get(name: str) -> FormSet:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown form set {name!r}; known: {sorted(CATALOG)}") from None
