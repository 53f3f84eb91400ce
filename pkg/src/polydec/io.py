"""Mesh, cochain and field files: OBJ, PLY, CSV, Matrix Market."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .cochains import Cochain, DegreeMismatch
from .linalg import read_mtx, write_mtx
from .mesh import MeshError, PolygonMesh, build_mesh

__all__ = ["read_obj", "write_obj", "write_ply", "save_cochain", "load_cochain",
           "save_vertex_field", "load_vertex_field", "read_mtx", "write_mtx"]


# -- OBJ -----------------------------------------------------------------------

def read_obj(path) -> PolygonMesh:
    """Read ``v`` and ``f`` records; face entries may be ``i``, ``i/t`` or ``i/t/n``,
    and negative (relative) indices are resolved."""
    verts, faces = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                face = []
                for tok in parts[1:]:
                    i = int(tok.split("/")[0])
                    face.append(i - 1 if i > 0 else len(verts) + i)
                if len(face) < 3:
                    raise MeshError(f"{path}:{lineno}: face with fewer than 3 vertices")
                faces.append(face)
    return build_mesh(np.array(verts, dtype=float).reshape(-1, 3), faces)


def write_obj(path, mesh: PolygonMesh) -> None:
    with open(path, "w") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for f in mesh.faces:
            fh.write("f " + " ".join(str(i + 1) for i in f) + "\n")


# -- PLY -------------------------------------------------------------------------

def _colormap(values: np.ndarray) -> np.ndarray:
    """Blue-white-red map of values scaled to [-1, 1] by their max magnitude."""
    v = np.asarray(values, dtype=float)
    s = np.abs(v).max()
    t = v / s if s > 0 else np.zeros_like(v)
    rgb = np.empty((len(v), 3))
    neg, pos = t < 0, t >= 0
    rgb[neg] = np.column_stack([1 + t[neg], 1 + t[neg], np.ones(neg.sum())])
    rgb[pos] = np.column_stack([np.ones(pos.sum()), 1 - t[pos], 1 - t[pos]])
    return np.round(255 * rgb).astype(int)


def write_ply(path, mesh: PolygonMesh, scalar=None, vectors: dict | None = None) -> None:
    """ASCII PLY with optional per-vertex scalar (stored raw and as colors) and
    named per-vertex 3-vector properties (``<name>_x`` etc.)."""
    n = mesh.n_vertices
    cols = [mesh.vertices]
    props = ["x", "y", "z"]
    if scalar is not None:
        scalar = np.asarray(scalar, dtype=float).reshape(-1)
        if scalar.shape != (n,):
            raise ValueError("scalar needs one value per vertex")
        cols.append(scalar[:, None])
        props.append("value")
    for name, vec in (vectors or {}).items():
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (n, 3):
            raise ValueError(f"vector property {name!r} needs shape ({n}, 3)")
        cols.append(vec)
        props += [f"{name}_x", f"{name}_y", f"{name}_z"]
    data = np.hstack(cols)
    header = ["ply", "format ascii 1.0", f"element vertex {n}"]
    header += [f"property double {p}" for p in props]
    if scalar is not None:
        header += ["property uchar red", "property uchar green", "property uchar blue"]
        colors = _colormap(scalar)
    header += [f"element face {mesh.n_faces}", "property list uchar int vertex_indices",
               "end_header"]
    with open(path, "w") as fh:
        fh.write("\n".join(header) + "\n")
        for i in range(n):
            row = " ".join(f"{x:.17g}" for x in data[i])
            if scalar is not None:
                row += " " + " ".join(str(c) for c in colors[i])
            fh.write(row + "\n")
        for f in mesh.faces:
            fh.write(f"{len(f)} " + " ".join(str(i) for i in f) + "\n")


# -- CSV ---------------------------------------------------------------------------

def save_cochain(path, c: Cochain) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell_index", "value"])
        for i, v in enumerate(c.values):
            w.writerow([i, f"{v:.17g}"])


def load_cochain(path, mesh: PolygonMesh, degree: int) -> Cochain:
    """Read ``cell_index,value`` rows; every cell must appear exactly once."""
    n = mesh.n_cells(degree)
    values = np.full(n, np.nan)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            i = int(row["cell_index"])
            if not 0 <= i < n:
                raise DegreeMismatch(f"cell index {i} out of range for {degree}-cells ({n})")
            values[i] = float(row["value"])
    if np.isnan(values).any():
        raise DegreeMismatch(f"{path}: {int(np.isnan(values).sum())} cells missing")
    return Cochain(degree, values, mesh)


def save_vertex_field(path, field: np.ndarray) -> None:
    field = np.asarray(field, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex_index", "x", "y", "z"])
        for i, (x, y, z) in enumerate(field):
            w.writerow([i, f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])


def load_vertex_field(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    out = np.zeros((int(data[:, 0].max()) + 1, 3))
    out[data[:, 0].astype(int)] = data[:, 1:4]
    return out


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
