"""Convergence experiments: refinement ladders, error tables, log-log slopes."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import catalog
from .catalog import (analytic_contraction, analytic_norm2, analytic_star,
                      analytic_wedge)
from .cochains import Cochain, discretize, error_norms, flat, interior_mask
from .mesh import PolygonMesh
from .operators import (codifferential, contraction, hodge_star, inner_product,
                        laplacian, lie_derivative, wedge)
from .surfaces import make_surface, refinement_sequence

log = logging.getLogger(__name__)

OPERATORS = ("identity", "wedge", "star", "inner", "contraction", "lie", "codiff", "laplacian")


class InsufficientPoints(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    surface: str = "plane"
    protocol: str = "regular"
    ladder: tuple = (8, 16, 32)
    operator: str = "identity"
    forms: str = "plane_trig"
    scheme: tuple = ("ours",)
    seed: int = 0
    jitter: float = 0.0
    fraction: float = 0.0
    edge_order: int = 4
    tri_degree: int = 4
    boundary: str = "include"

    def __post_init__(self):
        self.ladder = tuple(self.ladder)
        if self.boundary not in ("include", "exclude"):
            raise ValueError("boundary must be 'include' or 'exclude'")
        if isinstance(self.scheme, str):
            self.scheme = tuple(s.strip() for s in self.scheme.split(","))
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.forms not in catalog.CATALOG:
            raise ValueError(f"unknown form set {self.forms!r}")
        if any(b <= a for a, b in zip(self._sizes(), self._sizes()[1:])):
            raise ValueError("ladder must increase strictly")
        if self.protocol == "regular" and (self.jitter or self.fraction):
            raise ValueError("regular protocol takes neither jitter nor fraction")
        if "jitter" in self.protocol and self.jitter <= 0:
            raise ValueError("jitter protocol needs jitter > 0")
        if "unstructure" in self.protocol and self.fraction <= 0:
            raise ValueError("unstructure protocol needs fraction > 0")

    def _sizes(self):
        return [r if np.ndim(r) == 0 else r[0] for r in self.ladder]

    @classmethod
    def from_text(cls, text: str, name: str = "experiment") -> "ExperimentConfig":
        kw: dict = {"name": name}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = (s.strip() for s in line.partition("="))
            if key == "ladder":
                kw[key] = tuple(int(v) for v in value.split(","))
            elif key in ("seed", "edge_order", "tri_degree"):
                kw[key] = int(value)
            elif key in ("jitter", "fraction"):
                kw[key] = float(value)
            elif key == "quadrature":
                e, _, t = value.partition(",")
                kw["edge_order"], kw["tri_degree"] = int(e), int(t or 4)
            elif key in ("name", "surface", "protocol", "operator", "forms", "scheme",
                         "boundary"):
                kw[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**kw)

    def to_text(self) -> str:
        return "\n".join([
            f"name = {self.name}", f"surface = {self.surface}",
            f"protocol = {self.protocol}",
            f"ladder = {','.join(str(r) for r in self.ladder)}",
            f"operator = {self.operator}", f"forms = {self.forms}",
            f"scheme = {','.join(self.scheme)}", f"seed = {self.seed}",
            f"jitter = {self.jitter}", f"fraction = {self.fraction}",
            f"quadrature = {self.edge_order},{self.tri_degree}",
            f"boundary = {self.boundary}", ""])


def builtin_configs() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files("polydec.configs").iterdir()
                  if p.name.endswith(".cfg"))


def load_config(ref: str) -> ExperimentConfig:
    """Load a config from a path, or by name from the bundled configs."""
    path = Path(ref)
    if path.is_file():
        return ExperimentConfig.from_text(path.read_text(), path.stem)
    name = ref[:-4] if ref.endswith(".cfg") else ref
    res = resources.files("polydec.configs") / f"{name}.cfg"
    if not res.is_file():
        raise FileNotFoundError(f"no config file or builtin config named {ref!r}")
    return ExperimentConfig.from_text(res.read_text(), name)


# -- per-level evaluation ---------------------------------------------------

def _scalar_case(exact: float, approx: float):
    e = abs(exact - approx)
    return e, e


def evaluate_cases(operator: str, forms: catalog.FormSet, mesh: PolygonMesh,
                   scheme: str = "ours", edge_order: int = 4, tri_degree: int = 4,
                   boundary: str = "include") -> dict:
    """Map case label -> (L2 error, Linf error) on one mesh.

    With ``boundary="exclude"`` errors are measured away from the boundary only.
    """
    def disc(f):
        return discretize(f, mesh, edge_order=edge_order, tri_degree=tri_degree)

    def compare(xi: Cochain, f):
        mask = interior_mask(mesh, xi.degree) if boundary == "exclude" else None
        return error_norms(xi, disc(f), mask)

    fs = forms
    named = [(s, f) for s, f in (("a", fs.alpha), ("b", fs.beta), ("g", fs.gamma),
                                  ("w", fs.omega)) if f is not None]
    out: dict = {}
    if operator == "identity":
        for s, f in named:
            out[s] = compare(disc(f), f)
    elif operator == "wedge":
        pairs = [("a", "b"), ("a", "w"), ("b", "g"), ("a", "g")]
        fields = dict(named)
        for s, t in pairs:
            if s in fields and t in fields:
                f, g = fields[s], fields[t]
                out[f"{s}^{t}"] = compare(wedge(disc(f), disc(g)), analytic_wedge(f, g))
    elif operator == "star":
        for s, f in named:
            if s == "g":
                continue
            xi = hodge_star(mesh, f.degree)(disc(f))
            out[f"*{s}"] = compare(xi, analytic_star(f, fs.surface))
    elif operator == "inner":
        for s, f in named:
            if s == "g" or (scheme != "ours" and f.degree == 2):
                continue
            c = disc(f)
            out[f"({s},{s})"] = _scalar_case(analytic_norm2(f, fs.surface),
                                             inner_product(c, c, scheme))
    elif operator == "contraction":
        xf = flat(fs.X, mesh, order=edge_order)
        for s, f in named:
            if f.degree in (1, 2) and s != "g":
                out[f"i_X {s}"] = compare(contraction(xf, disc(f)),
                                          analytic_contraction(fs.X, f))
    elif operator == "lie":
        xf = flat(fs.X, mesh, order=edge_order)
        for s, f in named:
            key = f"L_X {s}"
            if key in fs.exact:
                out[key] = compare(lie_derivative(xf, disc(f)), fs.exact[key])
    elif operator == "codiff":
        for s, f in named:
            key = f"delta {s}"
            if key not in fs.exact or (scheme != "ours" and f.degree != 1):
                continue
            out[key] = compare(codifferential(mesh, f.degree, scheme)(disc(f)), fs.exact[key])
    elif operator == "laplacian":
        for s, f in named:
            key = f"Delta {s}"
            if key in fs.exact:
                out[key] = compare(laplacian(mesh, f.degree, scheme)(disc(f)), fs.exact[key])
    else:
        raise ValueError(f"unknown operator {operator!r}")
    return out


# -- slopes and reports -------------------------------------------------------

def fit_slope(points) -> tuple[float, float]:
    """Least-squares line through (log10 x, log10 err); returns (slope, rms residual)."""
    pts = np.asarray(list(points), dtype=float)
    if len(pts) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(pts)}")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise ValueError("slope fit needs positive finite values")
    lx, ly = np.log10(pts[:, 0]), np.log10(pts[:, 1])
    coef = np.polyfit(lx, ly, 1)
    resid = ly - np.polyval(coef, lx)
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    scheme: str
    rows: list = field(default_factory=list)        # dicts: case, level, h, nV, l2, linf
    failures: list = field(default_factory=list)

    def cases(self) -> list[str]:
        seen: dict = {}
        for r in self.rows:
            seen.setdefault(r["case"], None)
        return list(seen)

    def series(self, case: str, column: str):
        """(h, nV, values) for one case; ``l2sq`` is the unrooted quadratic form."""
        rows = [r for r in self.rows if r["case"] == case]
        vals = np.array([r["l2" if column == "l2sq" else column] for r in rows])
        if column == "l2sq":
            vals = vals ** 2
        return np.array([r["h"] for r in rows]), np.array([r["nV"] for r in rows]), vals

    def slope(self, case: str, norm: str = "l2", against: str = "h") -> tuple[float, float]:
        h, nv, err = self.series(case, norm)
        x = h if against == "h" else nv
        try:
            return fit_slope(zip(x, err))
        except ValueError:
            return math.nan, math.nan

    def slopes(self) -> dict:
        return {c: {f"{n}_vs_{a}": self.slope(c, n, a)[0]
                    for n in ("l2", "linf") for a in ("h", "V")}
                for c in self.cases()}

    def plateau(self, case: str, norm: str = "l2", last: int = 2) -> float:
        return float(np.mean(self.series(case, norm)[2][-last:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["case", "level", "h", "nV", "l2", "linf"])
        for r in self.rows:
            w.writerow([r["case"], r["level"], f"{r['h']:.12e}", r["nV"],
                        f"{r['l2']:.12e}", f"{r['linf']:.12e}"])
        return buf.getvalue()

    def to_gnuplot(self) -> str:
        out = []
        for c in self.cases():
            out.append(f"# case {c}  (columns: h nV l2 linf)")
            for r in (r for r in self.rows if r["case"] == c):
                out.append(f"{r['h']:.12e} {r['nV']} {r['l2']:.12e} {r['linf']:.12e}")
            out += ["", ""]
        return "\n".join(out)

    def summary(self) -> str:
        lines = [f"{self.config.name} [{self.scheme}] {self.config.operator} on "
                 f"{self.config.surface} ({self.config.protocol})"]
        for c, s in self.slopes().items():
            lines.append(f"  {c:12s} slope vs h: L2 {s['l2_vs_h']:+.3f}  Linf {s['linf_vs_h']:+.3f}"
                         f" | vs |V|: L2 {s['l2_vs_V']:+.3f}  Linf {s['linf_vs_V']:+.3f}")
        for f in self.failures:
            lines.append(f"  level {f[0]} failed: {f[1]}")
        return "\n".join(lines)

    def metadata(self) -> dict:
        d = asdict(self.config)
        d["scheme"] = self.scheme
        d["rng"] = "numpy PCG64"
        return d


def run_convergence(config: ExperimentConfig, scheme: str | None = None,
                    sequence=None) -> ExperimentReport:
    """Run one operator over the config's refinement ladder."""
    scheme = scheme or config.scheme[0]
    forms = catalog.get(config.forms)
    if forms.surface.kind != config.surface:
        raise ValueError(f"form set {config.forms} lives on {forms.surface.kind}, "
                         f"config asks for {config.surface}")
    if sequence is None:
        sequence = refinement_sequence(make_surface(config.surface), config.ladder,
                                       config.jitter, config.fraction, config.seed)
    report = ExperimentReport(config, scheme)
    for level, (mesh, h) in enumerate(zip(sequence.meshes, sequence.spacings)):
        try:
            errs = evaluate_cases(config.operator, forms, mesh, scheme,
                                  config.edge_order, config.tri_degree, config.boundary)
        except Exception as exc:  # partial report on per-level failure
            log.warning("level %d failed: %s", level, exc)
            report.failures.append((level, repr(exc)))
            continue
        for case, (l2, linf) in errs.items():
            report.rows.append(dict(case=case, level=level, h=h, nV=mesh.n_vertices,
                                    l2=l2, linf=linf))
    return report


def compare_schemes(config: ExperimentConfig, schemes=("ours", "aw"), norm: str = "l2"):
    """Run the same ladder under several schemes.

    Returns ``(reports, ratios)`` where ``ratios[(case, scheme)]`` is the
    plateau of ``norm`` under each later scheme divided by that of the first.
    """
    sequence = refinement_sequence(make_surface(config.surface), config.ladder,
                                   config.jitter, config.fraction, config.seed)
    reports = {s: run_convergence(config, s, sequence) for s in schemes}
    base = reports[schemes[0]]
    ratios: dict = {}
    for s in schemes[1:]:
        for case in reports[s].cases():
            if case in base.cases():
                ratios[(case, s)] = reports[s].plateau(case, norm) / base.plateau(case, norm)
    return reports, ratios
