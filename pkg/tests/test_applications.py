import numpy as np
import pytest

from polydec.applications import (FlowConfig, GeometryCollapse, NumericalBlowup,
                                  dirichlet_energy, helmholtz_hodge, lie_advect,
                                  mean_curvature_flow, mean_radius, relative_distance)
from polydec.catalog import advection_field, get
from polydec.cochains import (Cochain, DegreeMismatch, ScalarField, aw_mass, constant,
                              discretize, flat, zeros)
from polydec.operators import codifferential, exterior_derivative
from polydec.surfaces import gen_regular, generate, make_surface

SPHERE, TORUS, PLANE = (make_surface(s) for s in ("sphere", "torus", "plane"))


@pytest.fixture(scope="module")
def sphere_mesh():
    return generate(SPHERE, 8, jitter_r=0.2, fraction=0.1, seed=3)


@pytest.fixture(scope="module")
def torus_mesh():
    return generate(TORUS, 36, jitter_r=0.2, fraction=0.2, seed=2)


# -- mean curvature flow ---------------------------------------------------------

def test_zero_step_is_identity(sphere_mesh):
    out = mean_curvature_flow(sphere_mesh, FlowConfig(t=0.0, iterations=3))
    assert len(out) == 4 and out[0] is sphere_mesh
    for m in out:
        np.testing.assert_allclose(m.vertices, sphere_mesh.vertices, atol=1e-14)


@pytest.mark.parametrize("scheme", ["ours", "aw0"])
def test_flow_shrinks_sphere(sphere_mesh, scheme):
    out = mean_curvature_flow(sphere_mesh, FlowConfig(t=1e-3, iterations=5, scheme=scheme))
    radii = [mean_radius(m, np.zeros(3)) for m in out]
    energy = [dirichlet_energy(m) for m in out]
    assert all(b < a for a, b in zip(radii, radii[1:]))
    assert all(b < a for a, b in zip(energy, energy[1:]))


def test_dirichlet_energy_is_about_twice_the_area(sphere_mesh):
    assert dirichlet_energy(sphere_mesh) == pytest.approx(8 * np.pi, rel=0.05)


def test_planar_mesh_with_pinned_boundary_stays(rng):
    m = generate(PLANE, 10, jitter_r=0.3, fraction=0.2, seed=5)
    pinned = tuple(np.flatnonzero(m.boundary_vertices))
    out = mean_curvature_flow(m, FlowConfig(t=1e-2, iterations=4, pinned=pinned))
    np.testing.assert_allclose(out[-1].vertices, m.vertices, atol=1e-12)


def test_huge_step_collapses(sphere_mesh):
    # the geometric Laplacian's kernel is the constants, so t -> inf maps to a point
    with pytest.raises(GeometryCollapse):
        mean_curvature_flow(sphere_mesh, FlowConfig(t=1e8, iterations=2, scheme="aw0"))


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(t=-1.0)
    with pytest.raises(ValueError):
        FlowConfig(iterations=-2)


# -- Helmholtz-Hodge -------------------------------------------------------------

def test_zero_field(torus_mesh):
    res = helmholtz_hodge(torus_mesh, zeros(torus_mesh, 1))
    assert not np.any(res.potential.values)
    assert not np.any(res.harmonic.values)


def test_coexact_input(torus_mesh, rng):
    beta0 = Cochain(2, rng.normal(size=torus_mesh.n_faces), torus_mesh)
    omega = codifferential(torus_mesh, 2)(beta0)
    res = helmholtz_hodge(torus_mesh, omega, with_sharps=False)
    d_gamma = exterior_derivative(torus_mesh, 1)(res.harmonic).values
    scale = np.abs(exterior_derivative(torus_mesh, 1)(omega).values).max()
    assert np.sqrt(d_gamma @ (aw_mass(torus_mesh, 2) @ d_gamma)) <= 1e-8 * scale
    np.testing.assert_allclose(res.harmonic.values, 0, atol=1e-8 * np.abs(omega.values).max())
    assert res.rotational_sharp is None


def test_reconstruction_is_exact(torus_mesh):
    res = helmholtz_hodge(torus_mesh, get("torus_hhd").X)
    np.testing.assert_allclose((res.rotational + res.harmonic).values, res.omega.values,
                               atol=1e-14)
    assert res.rotational_sharp.shape == (torus_mesh.n_vertices, 3)
    assert res.potential_vertex.shape == (torus_mesh.n_vertices,)


def test_hhd_input_checks(torus_mesh, sphere_mesh):
    with pytest.raises(DegreeMismatch):
        helmholtz_hodge(torus_mesh, zeros(torus_mesh, 0))
    with pytest.raises(DegreeMismatch):
        helmholtz_hodge(torus_mesh, zeros(sphere_mesh, 1))


# -- Lie advection ----------------------------------------------------------------

def test_zero_field_leaves_form(torus_mesh, rng):
    alpha = Cochain(1, rng.normal(size=torus_mesh.n_edges), torus_mesh)
    snaps = lie_advect(torus_mesh, zeros(torus_mesh, 1), alpha, 1e-2, 20, snapshot_every=5)
    assert [s for s, _ in snaps] == [0, 5, 10, 15, 20]
    for _, c in snaps:
        np.testing.assert_array_equal(c.values, alpha.values)


def test_constant_is_invariant(torus_mesh):
    X = flat(advection_field(), torus_mesh)
    snaps = lie_advect(torus_mesh, X, constant(torus_mesh, 2.0), 1e-3, 50)
    np.testing.assert_allclose(snaps[-1][1].values, 2.0, atol=1e-12)


def test_zero_form_max_norm_growth():
    m = gen_regular(TORUS, 60)
    X = flat(advection_field(), m)
    f = discretize(ScalarField(lambda p: np.exp(-4 * ((p[:, 0] - 1.5) ** 2 + p[:, 1] ** 2))), m)
    t = 1e-3
    snaps = lie_advect(m, X, f, t, 200, snapshot_every=1)
    peaks = np.array([np.abs(c.values).max() for _, c in snaps])
    growth = peaks[1:] / peaks[:-1]
    assert growth.max() <= 1 + 10 * t


def test_blowup_reports_partial_results(torus_mesh, rng):
    X = flat(advection_field(), torus_mesh)
    alpha = Cochain(1, rng.normal(size=torus_mesh.n_edges), torus_mesh)
    with pytest.raises(NumericalBlowup) as info:
        lie_advect(torus_mesh, X, alpha, 5.0, 500, snapshot_every=1)
    assert info.value.partial[0][0] == 0
    assert len(info.value.partial) >= 1


def test_advection_degree_checks(torus_mesh):
    with pytest.raises(DegreeMismatch):
        lie_advect(torus_mesh, zeros(torus_mesh, 1), zeros(torus_mesh, 2), 1e-3, 1)


def test_relative_distance(torus_mesh, rng):
    a = Cochain(1, rng.normal(size=torus_mesh.n_edges), torus_mesh)
    assert relative_distance(a, a) == 0.0
    assert relative_distance(2 * a, a) == pytest.approx(1.0)
    c = constant(torus_mesh, 1.0)
    assert relative_distance(3 * c, c) == pytest.approx(2.0)
