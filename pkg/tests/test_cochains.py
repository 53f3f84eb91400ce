import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydec.cochains import (Cochain, CovectorField, DegreeMismatch, IsolatedVertex,
                              QuadratureOrderInvalid, ScalarField, TwoFormField,
                              VectorField, aw_mass, constant, discretize, error_norms,
                              flat, gauss_legendre, interior_mask, sharp, triangle_rule,
                              zeros)
from polydec.mesh import build_mesh
from polydec.operators import exterior_derivative
from polydec.surfaces import gen_regular, generate, make_surface


def rotation(p):
    return np.column_stack([-p[:, 1], p[:, 0], np.zeros(len(p))])


def test_constant_zero_form(grid4):
    c = discretize(ScalarField(lambda p: 2.5), grid4)
    assert c.degree == 0 and np.all(c.values == 2.5)


def test_dx_on_diagonal_edge():
    m = build_mesh([[0, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2]])
    dx = discretize(CovectorField(lambda p: np.array([1.0, 0, 0])), m)
    assert dx.values[m.edge_index(0, 1)] == pytest.approx(1.0, abs=1e-15)


def test_area_form_on_unit_square(unit_square):
    omega = discretize(TwoFormField(lambda p: np.array([0, 0, 1.0])), unit_square)
    assert omega.values[0] == pytest.approx(1.0, abs=1e-14)


def test_quadrature_rules():
    t, w = gauss_legendre(4)
    for k in range(8):
        assert np.dot(w, t ** k) == pytest.approx(1 / (k + 1), abs=1e-14)
    bary, w = triangle_rule(4)
    # int over the unit right triangle of x^a y^b = a! b! / (a+b+2)!, normalized by area 1/2
    from math import factorial
    for a in range(5):
        for b in range(5 - a):
            exact = 2 * factorial(a) * factorial(b) / factorial(a + b + 2)
            approx = np.dot(w, bary[:, 1] ** a * bary[:, 2] ** b)
            assert approx == pytest.approx(exact, abs=1e-12)
    with pytest.raises(QuadratureOrderInvalid):
        gauss_legendre(0)
    with pytest.raises(QuadratureOrderInvalid):
        triangle_rule(3)


def test_exact_forms_commute_with_d():
    m = generate(make_surface("plane"), 9, jitter_r=0.3, fraction=0.2, seed=2)

    def A(p):
        x, y = p[:, 0], p[:, 1]
        return x ** 3 - 2 * x * y ** 2 + y + 1

    def dA(p):
        x, y = p[:, 0], p[:, 1]
        return np.column_stack([3 * x ** 2 - 2 * y ** 2, -4 * x * y + 1, 0 * x])

    lhs = discretize(CovectorField(dA), m)
    rhs = exterior_derivative(m, 0)(discretize(ScalarField(A), m))
    np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-10)


def test_flat_examples():
    m = build_mesh([[1, 0, 0], [0, 1, 0], [0, 0, 0]], [[0, 1, 2]])
    f = flat(rotation, m)
    assert f.values[m.edge_index(0, 1)] == pytest.approx(1.0, abs=1e-15)
    X = np.array([0.3, -1.2, 2.0])
    fc = flat(VectorField(lambda p: X), m)
    w = m.vertices[m.edges[:, 1]] - m.vertices[m.edges[:, 0]]
    np.testing.assert_allclose(fc.values, w @ X, atol=1e-15)
    assert not np.any(flat(lambda p: np.zeros(3), m).values)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1e3, 1e3))
def test_flat_is_linear_in_the_field(c):
    m = generate(make_surface("sphere"), 3, jitter_r=0.2, seed=1)
    a = flat(lambda p: c * rotation(p), m).values
    b = c * flat(rotation, m).values
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_sharp_of_zero(grid4):
    assert not np.any(sharp(zeros(grid4, 1)))


def test_sharp_recovers_constant_field_on_square(unit_square):
    X = np.array([0.7, -1.3, 0.0])
    rec = sharp(flat(lambda p: X, unit_square))
    np.testing.assert_allclose(rec, np.tile(X, (4, 1)), atol=1e-15)


def test_sharp_parallel_on_planar_polygon():
    rng = np.random.default_rng(3)
    ang = np.sort(rng.uniform(0, 2 * np.pi, 7))
    pts = np.column_stack([np.cos(ang), 0.6 * np.sin(ang), np.zeros(7)])
    m = build_mesh(pts, [list(range(7))])
    X = np.array([1.0, 2.0, 0.0])
    rec = sharp(flat(lambda p: X, m))
    cross = np.cross(rec, X)
    np.testing.assert_allclose(cross, 0, atol=1e-13)
    assert np.all(rec @ X > 0)


def test_sharp_isolated_vertex():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 5]], [[0, 1, 2]])
    with pytest.raises(IsolatedVertex):
        sharp(zeros(m, 1))


def test_error_norm_examples(unit_square):
    c = constant(unit_square, 1.0)
    assert error_norms(c, c) == (0.0, 0.0)
    a = Cochain(2, [-3.0], unit_square)
    assert error_norms(a, zeros(unit_square, 2)) == (3.0, 3.0)
    # edge (0,1): midpoint minus centroid is (0, -1/2), so M_f[0, 0] = 1/4
    assert aw_mass(unit_square, 1)[0, 0] == pytest.approx(0.25)
    e = Cochain(1, [1.0, 0, 0, 0], unit_square)
    assert error_norms(e, zeros(unit_square, 1)) == pytest.approx((0.5, 1.0))


def test_error_norms_degree_mismatch(unit_square):
    with pytest.raises(DegreeMismatch):
        error_norms(zeros(unit_square, 0), zeros(unit_square, 1))


def test_cochain_validation(unit_square):
    with pytest.raises(DegreeMismatch):
        Cochain(1, np.zeros(3), unit_square)
    with pytest.raises(DegreeMismatch):
        Cochain(3, np.zeros(1), unit_square)
    with pytest.raises(ValueError):
        Cochain(0, [np.nan, 0, 0, 0], unit_square)
    with pytest.raises(DegreeMismatch):
        discretize(ScalarField(lambda p: 1.0), unit_square, degree=1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2 ** 31))
def test_mass_forms_nonnegative(k, seed):
    m = generate(make_surface("torus"), 18, jitter_r=0.2, fraction=0.2, seed=seed % 1000)
    x = np.random.default_rng(seed).normal(size=m.n_cells(k))
    l2, _ = error_norms(Cochain(k, x, m), zeros(m, k))
    assert l2 >= 0
    assert x @ (aw_mass(m, k) @ x) >= -1e-12 * (x @ x)


def test_interior_mask(grid4):
    assert interior_mask(grid4, 0).sum() == 9
    assert interior_mask(grid4, 1).sum() == grid4.n_edges - 16
    assert interior_mask(grid4, 2).sum() == 4
    full = Cochain(0, np.r_[1.0, np.zeros(24)], grid4)
    assert error_norms(full, zeros(grid4, 0), interior_mask(grid4, 0)) == (0.0, 0.0)
