import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydec import _assembly as asm
from polydec.mesh import (DegenerateFace, IndexOutOfRange, InconsistentOrientation,
                          NonManifoldEdge, ZeroArea, build_mesh, face_geometry,
                          incidence, mesh_spacing)
from polydec.surfaces import gen_regular, generate, make_surface

PENTAGON = np.array([[np.cos(a), np.sin(a), 0.0]
                     for a in np.linspace(0, 2 * np.pi, 5, endpoint=False)])


def test_single_quad_counts(unit_square):
    m = unit_square
    assert (m.n_vertices, m.n_edges, m.n_faces) == (4, 4, 1)
    assert m.boundary_edges.all()
    cycle = [m.edge_index(i, (i + 1) % 4) for i in range(4)]
    # canonical lo -> hi orientation; only the closing edge 3 -> 0 runs backwards
    assert [incidence(m, 0, e) for e in cycle] == [1, 1, 1, -1]


def test_shared_edge_opposite_signs():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], [[0, 1, 2], [1, 3, 2]])
    e = m.edge_index(1, 2)
    assert incidence(m, 0, e) == -incidence(m, 1, e) != 0


def test_repeated_vertex_is_degenerate():
    with pytest.raises(DegenerateFace):
        build_mesh(np.eye(3), [[0, 1, 1, 2]])


def test_build_errors():
    with pytest.raises(DegenerateFace):
        build_mesh(np.eye(3), [[0, 1]])
    with pytest.raises(IndexOutOfRange):
        build_mesh(np.eye(3), [[0, 1, 3]])
    with pytest.raises(NonManifoldEdge):
        build_mesh(np.vstack([np.eye(3), [1, 1, 1], [0, 0, 0]]),
                   [[0, 1, 2], [1, 0, 3], [0, 1, 4]])
    with pytest.raises(InconsistentOrientation):
        build_mesh(np.vstack([np.eye(3), [1, 1, 1]]), [[0, 1, 2], [0, 1, 3]])


def test_pentagon_boundary_signs():
    m = build_mesh(PENTAGON, [[0, 1, 2, 3, 4]])
    order = [m.edge_index(i, (i + 1) % 5) for i in range(5)]
    assert [incidence(m, 0, e) for e in order] == [1, 1, 1, 1, -1]


def test_edge_not_on_face_has_zero_incidence():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], [[0, 1, 2], [1, 3, 2]])
    assert incidence(m, 0, m.edge_index(1, 3)) == 0
    with pytest.raises(IndexOutOfRange):
        incidence(m, 0, 99)


def test_reversed_face_flips_signs():
    a = build_mesh(PENTAGON, [[0, 1, 2, 3, 4]])
    b = build_mesh(PENTAGON, [[4, 3, 2, 1, 0]])
    for e in range(5):
        assert incidence(a, 0, e) == -incidence(b, 0, e)


def test_unit_square_geometry(unit_square):
    g = face_geometry(unit_square, 0)
    np.testing.assert_allclose(g.unit_normal, [0, 0, 1])
    assert g.area == pytest.approx(1.0)
    np.testing.assert_allclose(g.centroid, [0.5, 0.5, 0])
    cw = build_mesh(unit_square.vertices, [[3, 2, 1, 0]])
    np.testing.assert_allclose(face_geometry(cw, 0).unit_normal, [0, 0, -1])


def test_nonplanar_quad_vector_area():
    # hand sum: v1 x v2 = (0,-1,1), v2 x v3 = (-1,0,1), the other two vanish
    m = build_mesh([[0, 0, 0], [1, 0, 0], [1, 1, 1], [0, 1, 0]], [[0, 1, 2, 3]])
    g = face_geometry(m, 0)
    np.testing.assert_allclose(g.vector_area, [-0.5, -0.5, 1.0])
    assert g.area == pytest.approx(np.sqrt(1.5))
    np.testing.assert_allclose(g.unit_normal, np.array([-1, -1, 2]) / np.sqrt(6))


def test_zero_area_face():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])
    with pytest.raises(ZeroArea):
        face_geometry(m, 0)
    with pytest.raises(ZeroArea):
        m.check_nondegenerate()


def test_spacing(unit_square):
    assert mesh_spacing(unit_square) == 1.0
    for n in (2, 5, 8):
        assert mesh_spacing(gen_regular(make_surface("plane"), n)) == pytest.approx(2 / n)


def test_spacing_without_edges():
    m = build_mesh(np.eye(3), [])
    with pytest.raises(ValueError):
        mesh_spacing(m)


def test_mesh_is_immutable(unit_square):
    with pytest.raises(AttributeError):
        unit_square.vertices = np.zeros((4, 3))
    with pytest.raises(ValueError):
        unit_square.vertices[0, 0] = 3.0


def test_halfedge_cycle_follows_face_order(grid4):
    m = grid4
    for f, verts in enumerate(m.faces):
        hes = m.face_halfedges(f)
        assert list(m.he_src[hes]) == list(verts)
        assert list(m.he_dst[hes]) == list(verts[1:]) + [verts[0]]
        np.testing.assert_array_equal(m.he_next[hes], np.roll(hes, -1))


MESHES = [("plane", 5, 0.3, 0.2), ("sphere", 4, 0.2, 0.2), ("torus", 18, 0.2, 0.1)]


@pytest.mark.parametrize("surface,res,fraction,r", MESHES)
def test_generated_mesh_invariants(surface, res, fraction, r):
    m = generate(make_surface(surface), res, jitter_r=r, fraction=fraction, seed=4)
    chi = {"plane": 1, "sphere": 2, "torus": 0}[surface]
    assert m.euler_characteristic == chi
    interior = m.edge_face_count == 2
    sign_sum = np.bincount(m.he_edge, weights=m.he_sign, minlength=m.n_edges)
    assert np.all(sign_sum[interior] == 0)
    d0, d1 = asm.d0(m), asm.d1(m)
    assert abs(d1 @ d0).max() == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_normals_translation_invariant(shift):
    m = generate(make_surface("sphere"), 3, jitter_r=0.2, seed=1)
    moved = m.with_vertices(m.vertices + np.array(shift))
    np.testing.assert_allclose(moved.face_normals, m.face_normals, atol=1e-9)
    np.testing.assert_allclose(moved.face_areas, m.face_areas, rtol=1e-9)


def test_planar_area_is_polygon_area():
    m = build_mesh(PENTAGON, [[0, 1, 2, 3, 4]])
    assert m.face_areas[0] == pytest.approx(2.5 * np.sin(2 * np.pi / 5))
