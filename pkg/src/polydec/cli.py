"""Command-line entry point: ``polydec <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import catalog
from . import io as pio
from .applications import (FlowConfig, helmholtz_hodge, lie_advect, mean_curvature_flow)
from .checks import CHECKS, run_check
from .cochains import Cochain, CovectorField, aw_mass, discretize, flat, sharp
from .harness import compare_schemes, load_config, run_convergence
from .linalg import write_mtx
from .operators import (codifferential, exterior_derivative, hodge_star,
                        inner_product_matrix, laplacian)
from .surfaces import generate, make_surface

log = logging.getLogger("polydec")

OPERATORS = {
    "d0": lambda m: exterior_derivative(m, 0).matrix,
    "d1": lambda m: exterior_derivative(m, 1).matrix,
    "star0": lambda m: hodge_star(m, 0).matrix,
    "star1": lambda m: hodge_star(m, 1).matrix,
    "star2": lambda m: hodge_star(m, 2).matrix,
    "delta1": lambda m: codifferential(m, 1).matrix,
    "delta2": lambda m: codifferential(m, 2).matrix,
    "lap0": lambda m: laplacian(m, 0).matrix,
    "lap1": lambda m: laplacian(m, 1).matrix,
    "lap2": lambda m: laplacian(m, 2).matrix,
    "M0": lambda m: inner_product_matrix(m, 0).matrix,
    "M1": lambda m: inner_product_matrix(m, 1).matrix,
    "M2": lambda m: inner_product_matrix(m, 2).matrix,
    "M0_aw": lambda m: aw_mass(m, 0),
    "M1_aw": lambda m: aw_mass(m, 1),
    "delta1_aw": lambda m: codifferential(m, 1, "aw").matrix,
    "lap0_aw": lambda m: laplacian(m, 0, "aw").matrix,
}


# -- field arguments ------------------------------------------------------------------

def _flat_vertex_field(mesh, X: np.ndarray) -> Cochain:
    """Trapezoid-rule flat of a per-vertex vector field."""
    e = mesh.edges
    seg = mesh.vertices[e[:, 1]] - mesh.vertices[e[:, 0]]
    avg = 0.5 * (X[e[:, 0]] + X[e[:, 1]])
    return Cochain(1, np.einsum("ij,ij->i", seg, avg), mesh)


def load_field(spec: str, mesh, degree: int = 1, use: str = "X") -> Cochain:
    """Resolve ``builtin:<name>[.<attr>]`` or ``csv:<file>`` to a cochain.

    Builtin names are catalog form sets; the attribute (default ``use``) picks
    the field, e.g. ``builtin:torus_advect.beta``. CSV files are either
    ``cell_index,value`` cochains or ``vertex_index,x,y,z`` vertex fields
    (flattened with the trapezoid rule).
    """
    kind, _, ref = spec.partition(":")
    if kind == "builtin":
        name, _, attr = ref.partition(".")
        fs = catalog.get(name)
        f = getattr(fs, attr or use)
        if f is None:
            raise ValueError(f"form set {name} has no field {attr or use!r}")
        if isinstance(f, CovectorField):
            return flat(f, mesh)
        return discretize(f, mesh)
    if kind == "csv":
        header = Path(ref).read_text().splitlines()[0].strip()
        if header.startswith("vertex_index"):
            return _flat_vertex_field(mesh, pio.load_vertex_field(ref))
        return pio.load_cochain(ref, mesh, degree)
    raise ValueError(f"field spec must be builtin:<name> or csv:<file>, got {spec!r}")


# -- commands -----------------------------------------------------------------------

def cmd_gen(a):
    surf = make_surface(a.surface)
    mesh = generate(surf, a.res, jitter_r=a.jitter, fraction=a.unstructure, seed=a.seed)
    pio.write_obj(a.output, mesh)
    print(f"wrote {a.output}: {mesh.n_vertices} vertices, {mesh.n_edges} edges, "
          f"{mesh.n_faces} faces")


def cmd_op(a):
    mesh = pio.read_obj(a.mesh)
    M = OPERATORS[a.which](mesh)
    write_mtx(a.output, M, comment=f"polydec {a.which} on {Path(a.mesh).name}")
    print(f"wrote {a.output}: {a.which} {M.shape[0]}x{M.shape[1]}, {M.nnz} nonzeros")


def cmd_mcf(a):
    mesh = pio.read_obj(a.mesh)
    pinned = np.flatnonzero(mesh.boundary_vertices) if a.pin_boundary else ()
    meshes = mean_curvature_flow(mesh, FlowConfig(a.t, a.n, a.scheme, tuple(pinned)))
    pio.write_obj(a.output, meshes[-1])
    print(f"wrote {a.output} after {a.n} iterations")


def cmd_hhd(a):
    mesh = pio.read_obj(a.mesh)
    out = pio.ensure_dir(a.output)
    res = helmholtz_hodge(mesh, load_field(a.field, mesh))
    pio.save_cochain(out / "omega.csv", res.omega)
    pio.save_cochain(out / "delta_beta.csv", res.rotational)
    pio.save_cochain(out / "gamma.csv", res.harmonic)
    pio.save_cochain(out / "beta.csv", res.potential)
    pio.save_vertex_field(out / "delta_beta_sharp.csv", res.rotational_sharp)
    pio.save_vertex_field(out / "gamma_sharp.csv", res.harmonic_sharp)
    pio.write_ply(out / "hhd.ply", mesh, scalar=res.potential_vertex,
                  vectors={"rot": res.rotational_sharp, "harm": res.harmonic_sharp,
                           "field": sharp(res.omega)})
    print(f"wrote decomposition to {out}/ (solver: {res.report.method}, "
          f"{res.report.iterations} iterations, residual {res.report.residual:.2e})")


def cmd_advect(a):
    mesh = pio.read_obj(a.mesh)
    out = pio.ensure_dir(a.output)
    X = load_field(a.field, mesh)
    alpha0 = load_field(a.form, mesh, degree=a.degree, use="beta")
    snaps = lie_advect(mesh, X, alpha0, a.t, a.n, a.snapshot_every)
    for step, c in snaps:
        pio.save_cochain(out / f"step_{step:06d}.csv", c)
        if c.degree == 1:
            pio.write_ply(out / f"step_{step:06d}.ply", mesh, vectors={"field": sharp(c)})
        else:
            pio.write_ply(out / f"step_{step:06d}.ply", mesh, scalar=c.values)
    print(f"wrote {len(snaps)} snapshots to {out}/")


def cmd_converge(a):
    cfg = load_config(a.config)
    out = Path(a.output)
    if len(cfg.scheme) > 1:
        reports, ratios = compare_schemes(cfg, cfg.scheme)
        for s, rep in reports.items():
            path = out.with_name(f"{out.stem}_{s}{out.suffix}")
            path.write_text(rep.to_csv())
            print(rep.summary())
            print(f"  -> {path}")
        for (case, s), r in ratios.items():
            print(f"plateau ratio {s}/{cfg.scheme[0]} [{case}]: {r:.3f}")
    else:
        rep = run_convergence(cfg)
        out.write_text(rep.to_csv())
        print(rep.summary())
        print(f"  -> {out}")
        reports = {cfg.scheme[0]: rep}
    if a.gnuplot:
        text = "\n".join(f"# scheme {s}\n{r.to_gnuplot()}" for s, r in reports.items())
        Path(a.gnuplot).write_text(text)


def _run_checks(numbers) -> int:
    failed = 0
    for n in numbers:
        res = run_check(n)
        print(res.report(), flush=True)
        failed += not res.passed
    return 1 if failed else 0


def cmd_selftest(a):
    return _run_checks([1, 2, 3])


def cmd_check(a):
    return _run_checks(a.criteria or sorted(CHECKS))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polydec", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a test mesh")
    g.add_argument("--surface", choices=["plane", "sphere", "torus"], required=True)
    g.add_argument("--res", type=int, required=True)
    g.add_argument("--jitter", type=float, default=0.0)
    g.add_argument("--unstructure", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("op", help="export an operator as Matrix Market")
    o.add_argument("--which", choices=sorted(OPERATORS), required=True)
    o.add_argument("-m", "--mesh", required=True)
    o.add_argument("-o", "--output", required=True)
    o.set_defaults(func=cmd_op)

    m = sub.add_parser("mcf", help="implicit mean curvature flow")
    m.add_argument("-m", "--mesh", required=True)
    m.add_argument("-t", type=float, default=1e-4)
    m.add_argument("-n", type=int, default=10)
    m.add_argument("--scheme", choices=["ours", "aw0"], default="ours")
    m.add_argument("--pin-boundary", action="store_true")
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=cmd_mcf)

    h = sub.add_parser("hhd", help="two-component Helmholtz-Hodge decomposition")
    h.add_argument("-m", "--mesh", required=True)
    h.add_argument("--field", required=True, help="builtin:<name> or csv:<file>")
    h.add_argument("-o", "--output", required=True)
    h.set_defaults(func=cmd_hhd)

    ad = sub.add_parser("advect", help="forward-Euler Lie advection")
    ad.add_argument("-m", "--mesh", required=True)
    ad.add_argument("--field", required=True, help="advecting field, builtin:<name> or csv:<file>")
    ad.add_argument("--form", required=True, help="initial form, builtin:<name> or csv:<file>")
    ad.add_argument("--degree", type=int, choices=[0, 1], default=1)
    ad.add_argument("-t", type=float, default=1e-3)
    ad.add_argument("-n", type=int, default=5000)
    ad.add_argument("--snapshot-every", type=int, default=1000)
    ad.add_argument("-o", "--output", required=True)
    ad.set_defaults(func=cmd_advect)

    c = sub.add_parser("converge", help="run a convergence experiment")
    c.add_argument("--config", required=True, help="config file or builtin config name")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--gnuplot", help="also write gnuplot-ready data here")
    c.set_defaults(func=cmd_converge)

    s = sub.add_parser("selftest", help="exact-identity checks")
    s.set_defaults(func=cmd_selftest)

    k = sub.add_parser("check", help="run acceptance checks")
    k.add_argument("criteria", nargs="*", type=int, choices=sorted(CHECKS))
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.func(args) or 0)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"polydec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
