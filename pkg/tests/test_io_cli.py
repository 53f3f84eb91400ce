import numpy as np
import pytest

from polydec import io as pio
from polydec.cli import load_field, main
from polydec.cochains import Cochain, DegreeMismatch, flat
from polydec.linalg import read_mtx
from polydec.operators import exterior_derivative
from polydec.surfaces import generate, make_surface


@pytest.fixture
def mesh():
    return generate(make_surface("torus"), 24, jitter_r=0.2, fraction=0.2, seed=1)


def test_obj_round_trip(tmp_path, mesh):
    pio.write_obj(tmp_path / "m.obj", mesh)
    back = pio.read_obj(tmp_path / "m.obj")
    assert back.faces == mesh.faces
    np.testing.assert_array_equal(back.vertices, mesh.vertices)


def test_obj_face_tokens(tmp_path):
    (tmp_path / "q.obj").write_text(
        "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\n"
        "f 1/1/1 2//1 -2 -1\n")
    m = pio.read_obj(tmp_path / "q.obj")
    assert m.faces == ((0, 1, 2, 3),)


def test_ply_layout(tmp_path, mesh):
    pio.write_ply(tmp_path / "m.ply", mesh, scalar=mesh.vertices[:, 2],
                  vectors={"field": mesh.vertices})
    lines = (tmp_path / "m.ply").read_text().splitlines()
    end = lines.index("end_header")
    assert f"element vertex {mesh.n_vertices}" in lines
    assert "property double field_z" in lines and "property uchar red" in lines
    first = lines[end + 1].split()
    assert len(first) == 3 + 1 + 3 + 3
    assert all(0 <= int(c) <= 255 for c in first[-3:])
    assert len(lines) == end + 1 + mesh.n_vertices + mesh.n_faces
    with pytest.raises(ValueError):
        pio.write_ply(tmp_path / "bad.ply", mesh, scalar=np.zeros(3))


def test_cochain_csv(tmp_path, mesh, rng):
    c = Cochain(1, rng.normal(size=mesh.n_edges), mesh)
    pio.save_cochain(tmp_path / "c.csv", c)
    back = pio.load_cochain(tmp_path / "c.csv", mesh, 1)
    np.testing.assert_array_equal(back.values, c.values)
    with pytest.raises(DegreeMismatch):
        pio.load_cochain(tmp_path / "c.csv", mesh, 0)


def test_vertex_field_csv(tmp_path, mesh):
    pio.save_vertex_field(tmp_path / "v.csv", mesh.vertices)
    np.testing.assert_array_equal(pio.load_vertex_field(tmp_path / "v.csv"), mesh.vertices)


def test_load_field(tmp_path, mesh):
    X = load_field("builtin:torus_advect", mesh)
    assert X.degree == 1
    beta = load_field("builtin:torus_advect.beta", mesh)
    assert beta.degree == 1
    # a constant vertex field flattens exactly under the trapezoid rule
    const = np.tile([1.0, 2.0, 0.0], (mesh.n_vertices, 1))
    pio.save_vertex_field(tmp_path / "f.csv", const)
    got = load_field(f"csv:{tmp_path / 'f.csv'}", mesh)
    np.testing.assert_allclose(got.values, flat(lambda p: np.array([1.0, 2, 0]), mesh).values,
                               atol=1e-14)
    with pytest.raises(ValueError):
        load_field("http://example", mesh)


def test_cli_pipeline(tmp_path, capsys):
    obj = tmp_path / "t.obj"
    assert main(["gen", "--surface", "torus", "--res", "30", "--jitter", "0.2",
                 "--unstructure", "0.2", "--seed", "4", "-o", str(obj)]) == 0
    m = pio.read_obj(obj)
    assert m.euler_characteristic == 0

    assert main(["op", "--which", "d0", "-m", str(obj), "-o", str(tmp_path / "d0.mtx")]) == 0
    d0 = read_mtx(tmp_path / "d0.mtx")
    assert abs(d0 - exterior_derivative(m, 0).matrix).max() == 0

    assert main(["hhd", "-m", str(obj), "--field", "builtin:torus_hhd",
                 "-o", str(tmp_path / "hhd")]) == 0
    for name in ("omega", "delta_beta", "gamma", "beta"):
        assert (tmp_path / "hhd" / f"{name}.csv").is_file()
    assert (tmp_path / "hhd" / "hhd.ply").is_file()

    assert main(["advect", "-m", str(obj), "--field", "builtin:torus_advect",
                 "--form", "builtin:torus_advect.beta", "-t", "1e-3", "-n", "20",
                 "--snapshot-every", "10", "-o", str(tmp_path / "adv")]) == 0
    assert sorted(p.name for p in (tmp_path / "adv").glob("*.csv")) == [
        "step_000000.csv", "step_000010.csv", "step_000020.csv"]


def test_cli_mcf(tmp_path):
    obj = tmp_path / "s.obj"
    main(["gen", "--surface", "sphere", "--res", "6", "--jitter", "0.2", "-o", str(obj)])
    out = tmp_path / "s_flow.obj"
    assert main(["mcf", "-m", str(obj), "-t", "1e-3", "-n", "3", "-o", str(out)]) == 0
    r0 = np.linalg.norm(pio.read_obj(obj).vertices, axis=1).mean()
    r1 = np.linalg.norm(pio.read_obj(out).vertices, axis=1).mean()
    assert r1 < r0


def test_cli_converge(tmp_path, capsys):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text("surface = plane\nprotocol = jitter\njitter = 0.2\nladder = 8,12,16\n"
                   "operator = codiff\nforms = plane_codiff\nscheme = ours,aw\nseed = 1\n")
    out = tmp_path / "tiny.csv"
    assert main(["converge", "--config", str(cfg), "-o", str(out),
                 "--gnuplot", str(tmp_path / "tiny.dat")]) == 0
    assert (tmp_path / "tiny_ours.csv").is_file() and (tmp_path / "tiny_aw.csv").is_file()
    assert "plateau ratio aw/ours" in capsys.readouterr().out


def test_cli_selftest_and_check(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3
    assert main(["check", "2"]) == 0


def test_cli_errors(tmp_path, capsys):
    assert main(["op", "--which", "d0", "-m", str(tmp_path / "nope.obj"),
                 "-o", str(tmp_path / "x.mtx")]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["gen", "--surface", "klein", "--res", "3", "-o", "x.obj"])
