"""Forward-Euler Lie advection of a 1-form by the rotation (-y, x, 0) on a torus.

One full turn takes 2 pi / t steps; the script prints the relative distance
to the initial form every 500 steps and writes PLY snapshots.

    python scripts/advect_torus.py [t] [outdir]
"""

import sys
from pathlib import Path

import numpy as np

from polydec import catalog, io as pio
from polydec.applications import lie_advect, relative_distance
from polydec.checks import advection_mesh
from polydec.cochains import flat, sharp


def main(t=1e-3, outdir="results/advect"):
    t = float(t)
    out = pio.ensure_dir(outdir)
    mesh = advection_mesh()
    fs = catalog.get("torus_advect")
    X = flat(fs.X, mesh)
    beta0 = flat(fs.beta, mesh)
    steps = int(round(2 * np.pi / t))
    snaps = lie_advect(mesh, X, beta0, t, steps, snapshot_every=500)
    for k, c in snaps:
        print(f"step {k:5d}  distance {relative_distance(c, beta0):.4f}")
        pio.write_ply(Path(out) / f"step_{k:05d}.ply", mesh, vectors={"field": sharp(c)})


if __name__ == "__main__":
    main(*sys.argv[1:])
