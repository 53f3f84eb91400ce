"""Executable acceptance checks, shared by ``polydec check`` and the test suite.

Each check returns a :class:`CheckResult` with a pass flag, the measured
quantities and human-readable detail lines. Checks whose criterion is known
to be out of reach carry a ``known_gap`` explanation; they still report the
measured outcome as a failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .applications import (FlowConfig, dirichlet_energy, helmholtz_hodge, lie_advect,
                           mean_curvature_flow, mean_radius, relative_distance)
from .cochains import Cochain, VectorField, flat
from .harness import compare_schemes, load_config, run_convergence
from .mesh import PolygonMesh
from .operators import exterior_derivative, hodge_star, laplacian, lie_derivative, wedge
from .surfaces import (Plane, Sphere, Torus, gen_regular, generate, remove_edges)


@dataclass
class CheckResult:
    criterion: int
    title: str
    passed: bool
    details: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    known_gap: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.criterion}: {self.title}"

    def report(self) -> str:
        out = [self.line()] + [f"    {d}" for d in self.details]
        if not self.passed and self.known_gap:
            out.append(f"    known gap: {self.known_gap}")
        return "\n".join(out)


def _rel(a, b) -> float:
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1.0)
    return float(np.abs(a - b).max(initial=0.0) / scale)


def random_meshes(count: int = 24, seed: int = 2024) -> list:
    """Small polygonal meshes of mixed type: unstructured and jittered grids on
    all three surfaces."""
    rng = np.random.default_rng(seed)
    surfaces = [(Plane(), (4, 9)), (Sphere(), (3, 6)), (Torus(), (16, 24))]
    out = []
    for i in range(count):
        surf, (lo, hi) = surfaces[i % 3]
        res = int(rng.integers(lo, hi))
        frac = float(rng.uniform(0.1, 0.3))
        r = float(rng.uniform(0.05, 0.3))
        out.append(generate(surf, res, jitter_r=r, fraction=frac, seed=int(rng.integers(1 << 30))))
    return out


def _random_cochain(mesh, k, rng):
    return Cochain(k, rng.standard_normal(mesh.n_cells(k)), mesh)


# -- criteria 1-3: exact identities -------------------------------------------

def check_identities(count: int = 24, seed: int = 7, tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    meshes = random_meshes(count, seed)
    worst = {"d1 d0": 0.0, "skew": 0.0, "leibniz": 0.0, "L_X const": 0.0, "hhd": 0.0}
    for m in meshes:
        d0, d1 = exterior_derivative(m, 0), exterior_derivative(m, 1)
        worst["d1 d0"] = max(worst["d1 d0"], float(np.abs((d1 @ d0).matrix.toarray()).max(initial=0.0)))
        a, b = _random_cochain(m, 0, rng), _random_cochain(m, 0, rng)
        p, q = _random_cochain(m, 1, rng), _random_cochain(m, 1, rng)
        w = _random_cochain(m, 2, rng)
        for x, y, sign in ((a, b, 1), (a, p, 1), (a, w, 1), (p, q, -1)):
            worst["skew"] = max(worst["skew"],
                                _rel(wedge(x, y).values, sign * wedge(y, x).values))
        # d(x ^ y) = dx ^ y + (-1)^k x ^ dy
        for x, y, k in ((a, b, 0), (a, p, 0), (p, a, 1)):
            lhs = exterior_derivative(m, x.degree + y.degree)(wedge(x, y)).values
            rhs = (wedge(exterior_derivative(m, k)(x), y).values
                   + (-1) ** k * wedge(x, exterior_derivative(m, y.degree)(y)).values)
            worst["leibniz"] = max(worst["leibniz"], _rel(lhs, rhs))
        X = Cochain(1, rng.standard_normal(m.n_edges), m)
        const = Cochain(0, np.full(m.n_vertices, 3.7), m)
        worst["L_X const"] = max(worst["L_X const"],
                                 np.abs(lie_derivative(X, const).values).max() / 3.7)
        h = helmholtz_hodge(m, p, with_sharps=False)
        worst["hhd"] = max(worst["hhd"], _rel(h.rotational.values + h.harmonic.values, p.values))
    ok = all(v <= tol for v in worst.values())
    return CheckResult(1, f"exact identities on {count} random polygonal meshes", ok,
                       [f"max relative defect {k}: {v:.2e}" for k, v in worst.items()],
                       dict(worst))


def _planar_meshes(seed: int = 3) -> list:
    plane = Plane()
    return [generate(plane, 12, jitter_r=0.3, fraction=0.25, seed=seed),
            generate(plane, 20, jitter_r=0.2, fraction=0.1, seed=seed + 1),
            generate(plane, 9, jitter_r=0.4, seed=seed + 2),
            gen_regular(plane, 7)]


def check_planar_hodge(tol: float = 1e-12) -> CheckResult:
    worst_2, worst_0 = 0.0, 0.0
    for m in _planar_meshes():
        mu = Cochain(2, m.face_areas, m)
        one = Cochain(0, np.ones(m.n_vertices), m)
        worst_2 = max(worst_2, np.abs(hodge_star(m, 2)(mu).values - 1.0).max())
        worst_0 = max(worst_0, _rel(hodge_star(m, 0)(one).values, m.face_areas))
    ok = worst_2 <= tol and worst_0 <= tol
    return CheckResult(2, "planar Hodge exactness (star mu = 1, star 1 = mu)", ok,
                       [f"max |star2 mu - 1| = {worst_2:.2e}",
                        f"max rel |star0 1 - mu| = {worst_0:.2e}"],
                       {"star2": worst_2, "star0": worst_0})


def check_linear_precision(tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(5)
    worst = 0.0
    for m in _planar_meshes(11):
        inner = ~m.boundary_vertices
        for _ in range(3):
            c = rng.standard_normal(3)
            f = c[0] + c[1] * m.vertices[:, 0] + c[2] * m.vertices[:, 1]
            lap = laplacian(m, 0)(f)
            worst = max(worst, np.abs(lap[inner]).max() / np.abs(f).max())
    return CheckResult(3, "linear precision of Delta0 at interior vertices", worst <= tol,
                       [f"max |Delta0 f| / max |f| over interior vertices: {worst:.2e}"],
                       {"defect": worst})


# -- criteria 4-7: convergence regimes ----------------------------------------

def _slope_lines(report, prefix=""):
    out = []
    for c, s in report.slopes().items():
        out.append(f"{prefix}{c}: vs h L2 {s['l2_vs_h']:.3f} Linf {s['linf_vs_h']:.3f}"
                   f" | vs |V| L2 {s['l2_vs_V']:.3f} Linf {s['linf_vs_V']:.3f}")
    return out


CONVERGENCE_CONFIGS = ("wedge_plane_unstructured", "star_torus_unstructured",
                       "inner_sphere_jitter02", "inner_sphere_jitter04")


def check_convergence(threshold: float = 0.8) -> CheckResult:
    details, values, ok = [], {}, True
    for name in CONVERGENCE_CONFIGS:
        cfg = load_config(name)
        reports = ([run_convergence(cfg)] if len(cfg.scheme) == 1
                   else list(compare_schemes(cfg, cfg.scheme)[0].values()))
        for rep in reports:
            for c, s in rep.slopes().items():
                lo = min(s["l2_vs_h"], s["linf_vs_h"])
                values[(name, rep.scheme, c)] = lo
                ok &= lo >= threshold
            details += _slope_lines(rep, f"{name} [{rep.scheme}] ")
    return CheckResult(4, f"wedge/star/inner slopes >= {threshold} vs log h (L2 and Linf)",
                       ok, details, values)


def check_contraction() -> CheckResult:
    details, values, ok = [], {}, True
    for name in ("contraction_sphere_jitter04", "contraction_torus_unstructured"):
        rep = run_convergence(load_config(name))
        s = rep.slopes()
        w, b = s["i_X w"], s["i_X b"]
        checks = {"i_X w L2 >= 0.8": w["l2_vs_h"] >= 0.8,
                  "i_X w Linf >= 0.8": w["linf_vs_h"] >= 0.8,
                  "i_X b L2 >= 0.8": b["l2_vs_h"] >= 0.8,
                  "i_X b Linf in 0.5 +/- 0.25": abs(b["linf_vs_h"] - 0.5) <= 0.25}
        for k, v in checks.items():
            values[(name, k)] = v
            ok &= v
        details += _slope_lines(rep, f"{name} ")
        details.append(f"{name} sub-checks (vs log h): "
                       + ", ".join(f"{k} {'ok' if v else 'FAIL'}" for k, v in checks.items()))
    gap = ("L_inf slope of i_X on 1-forms on the jittered sphere is ~0.9 vs log h "
           "(noisy across seeds, 0.73-0.98); the torus matches 0.5")
    return CheckResult(5, "contraction slopes (2-forms >= 0.8; 1-forms L2 >= 0.8, Linf 0.5 +/- 0.25)",
                       ok, details, values, known_gap=gap)


def check_lie() -> CheckResult:
    reg = run_convergence(load_config("lie_sphere_regular"))
    jit = run_convergence(load_config("lie_sphere_jitter04"))
    s_reg = reg.slope("L_X b", "l2", "V")[0]
    s_jit = jit.slope("L_X b", "l2", "V")[0]
    ok_reg = abs(-s_reg - 0.5) <= 0.2
    ok_jit = abs(s_jit) < 0.15
    details = (_slope_lines(reg, "regular ") + _slope_lines(jit, "jitter0.4 ")
               + [f"regular L_X b L2 slope vs log|V| {s_reg:.3f} (target -0.5 +/- 0.2): "
                  f"{'ok' if ok_reg else 'FAIL'}",
                  f"jittered L_X b L2 slope vs log|V| {s_jit:.3f} (target |s| < 0.15): "
                  f"{'ok' if ok_jit else 'FAIL'}"])
    gap = ("on regular cube-sphere quads L_X b converges faster than reported "
           "(about -0.85 vs log|V|, i.e. ~1.7 vs log h)")
    return CheckResult(6, "Lie derivative regime split (regular decays, jittered plateaus)",
                       ok_reg and ok_jit, details,
                       {"regular": s_reg, "jittered": s_jit}, known_gap=gap)


def check_codifferential(ratio_min: float = 3.0, plateau: float = 0.25) -> CheckResult:
    cfg = load_config("codiff_plane_jitter04")
    reports, ratios = compare_schemes(cfg, cfg.scheme)
    ours, aw = reports["ours"], reports["aw"]
    s_ours = ours.slope("delta b", "l2", "h")[0]
    s_aw = aw.slope("delta b", "l2", "h")[0]
    ratio = ratios[("delta b", "aw")]
    ratio_q = aw.plateau("delta b", "l2sq") / ours.plateau("delta b", "l2sq")
    ok = abs(s_ours) < plateau and abs(s_aw) < plateau and ratio >= ratio_min
    details = (_slope_lines(ours, "ours ") + _slope_lines(aw, "aw ")
               + [f"plateaus (L2, root): ours {ours.plateau('delta b'):.3e}, "
                  f"aw {aw.plateau('delta b'):.3e}",
                  f"AW/ours plateau ratio (root L2) {ratio:.2f} (target >= {ratio_min})",
                  f"AW/ours plateau ratio (unrooted quadratic form) {ratio_q:.2f}"])
    gap = ("the >= 3 target comes from the unrooted quadratic-form ratio (~5); "
           "in the root convention the same data give ~sqrt(5)")
    return CheckResult(7, "codifferential comparison (both plateau, AW/ours >= 3)", ok,
                       details, {"ratio": ratio, "ratio_quadratic": ratio_q,
                                 "slope_ours": s_ours, "slope_aw": s_aw}, known_gap=gap)


# -- criterion 8: applications ----------------------------------------------------

def mcf_check(mesh: PolygonMesh | None = None, t: float = 1e-4, iterations: int = 10):
    mesh = mesh or generate(Sphere(), 24, jitter_r=0.2, fraction=0.1, seed=17)
    meshes = mean_curvature_flow(mesh, FlowConfig(t=t, iterations=iterations))
    radii = [mean_radius(m, (0, 0, 0)) for m in meshes]
    energy = [dirichlet_energy(m) for m in meshes]
    ok = bool(np.all(np.diff(radii) < 0) and np.all(np.diff(energy) < 0))
    return ok, radii, energy


def hhd_check(resolution: int = 200, fraction: float = 0.2, seed: int = 5,
              exclusion: float = 1.0, max_angle: float = 15.0, near: float = 0.5):
    torus = Torus()
    mesh = generate(torus, resolution, fraction=fraction, seed=seed)
    X_H, X_R, _ = catalog.hhd_fields(torus)
    res = helmholtz_hodge(mesh, VectorField(lambda p: X_H(p) + X_R(p)))
    v = mesh.vertices
    dist = np.min([np.linalg.norm(v - np.asarray(c), axis=1) for c in catalog.HHD_CENTERS], axis=0)
    far = dist > exclusion
    g, h = res.harmonic_sharp[far], X_H(v[far])
    cos = np.sum(g * h, 1) / (np.linalg.norm(g, axis=1) * np.linalg.norm(h, axis=1))
    angle = float(np.degrees(np.arccos(np.clip(cos, -1, 1))).mean())
    pot = res.potential_vertex
    vmax, vmin = v[np.argmax(pot)], v[np.argmin(pot)]
    d_max = float(np.linalg.norm(vmax - catalog.HHD_CENTERS[0]))
    d_min = float(np.linalg.norm(vmin - catalog.HHD_CENTERS[1]))
    oracle_max, oracle_min = hhd_oracle_extrema(torus)
    return dict(n_vertices=mesh.n_vertices, angle=angle, angle_ok=angle < max_angle,
                argmax=vmax, argmin=vmin, d_max=d_max, d_min=d_min,
                extrema_ok=d_max < near and d_min < near,
                oracle_max=oracle_max, oracle_min=oracle_min,
                d_oracle=(float(np.linalg.norm(vmax - oracle_max)),
                          float(np.linalg.norm(vmin - oracle_min))),
                mesh=mesh, result=res)


def hhd_oracle_extrema(torus: Torus, n: int = 721):
    """Extrema of the continuous stream function psi + chi of X_H + X_R.

    X_H = (-y, x, 0) has flat rho^2 dtheta; its harmonic part is c dtheta with
    c = R sqrt(R^2 - r^2) and its co-exact part is delta(chi mu) with
    chi'(phi) = r (rho^2 - c) / rho.
    """
    R, r = torus.major, torus.minor
    c = R * np.sqrt(R * R - r * r)
    phi = np.linspace(-np.pi, np.pi, 4 * n + 1)
    rho = R + r * np.cos(phi)
    dchi = r * (rho ** 2 - c) / rho
    chi = np.concatenate([[0.0], np.cumsum(0.5 * (dchi[1:] + dchi[:-1]) * np.diff(phi))])
    theta = np.linspace(-np.pi, np.pi, n)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    pts = torus.point(T, P).reshape(-1, 3)
    _, _, psi = catalog.hhd_fields(torus)
    total = psi(pts) + np.tile(chi, n)
    return pts[np.argmax(total)], pts[np.argmin(total)]


def advection_mesh(resolution: int = 126, fraction: float = 0.2, radius: float = 0.1,
                   seed: int = 1) -> PolygonMesh:
    """Regular torus with a small irregularity near (sqrt2/2, -sqrt2/2, 1/2)."""
    spot = (np.sqrt(2) / 2, -np.sqrt(2) / 2, 0.5)
    return remove_edges(gen_regular(Torus(), resolution), fraction, seed, region=(spot, radius))[0]


def advection_check(mesh: PolygonMesh | None = None, t: float = 1e-3, steps: int = 6283):
    mesh = mesh or advection_mesh()
    X = flat(VectorField(lambda p: np.column_stack([-p[:, 1], p[:, 0], 0 * p[:, 0]])), mesh)
    b0 = flat(catalog.advection_field(), mesh)
    half = steps // 2 + 1
    snaps = dict(lie_advect(mesh, X, b0, t, steps, snapshot_every=half))
    d_half = relative_distance(snaps[half], b0)
    d_full = relative_distance(snaps[steps], b0)
    return d_full * 2 <= d_half, d_half, d_full, mesh.n_vertices


def check_applications() -> CheckResult:
    mcf_ok, radii, energy = mcf_check()
    hhd = hhd_check()
    adv_ok, d_half, d_full, nv = advection_check()
    details = [
        f"MCF t=1e-4, 10 iterations: mean radius {radii[0]:.6f} -> {radii[-1]:.6f}, "
        f"energy {energy[0]:.4f} -> {energy[-1]:.4f}, strictly decreasing: {mcf_ok}",
        f"HHD on {hhd['n_vertices']}-vertex torus: mean angle(gamma#, X_H) away from bumps "
        f"{hhd['angle']:.2f} deg (< 15): {hhd['angle_ok']}",
        f"HHD potential argmax {np.round(hhd['argmax'], 3)} is {hhd['d_max']:.2f} from "
        f"(1.5, 0, 0); argmin {np.round(hhd['argmin'], 3)} is {hhd['d_min']:.2f} from "
        f"the CW center (< 0.5 each): {hhd['extrema_ok']}",
        f"HHD continuous-oracle extrema {np.round(hhd['oracle_max'], 3)}, "
        f"{np.round(hhd['oracle_min'], 3)}; discrete distance to them "
        f"{hhd['d_oracle'][0]:.2f}, {hhd['d_oracle'][1]:.2f}",
        f"advection on {nv}-vertex torus: distance half period {d_half:.3f}, "
        f"full period {d_full:.3f}, full <= half/2: {adv_ok}",
    ]
    ok = mcf_ok and hhd["angle_ok"] and hhd["extrema_ok"] and adv_ok
    gap = ("X_H = (-y, x, 0) is not harmonic on a torus of revolution; its co-exact part "
           "moves the exact stream-function minimum to the far side of the tube, and the "
           "discrete result follows the exact decomposition")
    return CheckResult(8, "applications (MCF, HHD, Lie advection)", ok, details,
                       {"radii": radii, "energy": energy, "hhd": hhd,
                        "advection": (d_half, d_full)}, known_gap=gap)


CHECKS = {1: check_identities, 2: check_planar_hodge, 3: check_linear_precision,
          4: check_convergence, 5: check_contraction, 6: check_lie,
          7: check_codifferential, 8: check_applications}


def run_check(n: int) -> CheckResult:
    t0 = time.perf_counter()
    res = CHECKS[n]()
    res.seconds = time.perf_counter() - t0
    return res
