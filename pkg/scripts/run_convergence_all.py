"""Run every bundled convergence config and write CSV tables plus a slope summary.

    python scripts/run_convergence_all.py [outdir]
"""

import sys
from pathlib import Path

from polydec.harness import builtin_configs, compare_schemes, load_config, run_convergence


def main(outdir="results/convergence"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in builtin_configs():
        cfg = load_config(name)
        if len(cfg.scheme) > 1:
            reports, ratios = compare_schemes(cfg, cfg.scheme)
        else:
            reports, ratios = {cfg.scheme[0]: run_convergence(cfg)}, {}
        for scheme, rep in reports.items():
            (out / f"{name}_{scheme}.csv").write_text(rep.to_csv())
            print(rep.summary())
        for (case, scheme), r in ratios.items():
            print(f"  plateau ratio {scheme}/{cfg.scheme[0]} [{case}]: {r:.3f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
