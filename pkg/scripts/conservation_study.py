#!/usr/bin/env python3
"""Landau-run conservation experiment.

Integrates the cosine-perturbed Maxwellian with the penalty on, reports
the relative L2 drift at each step size, and fits the observed time order
from Richardson differences of the final states.

    python3 scripts/conservation_study.py --t-end 10 --out out/conservation
"""
import argparse
import json
import time
from pathlib import Path

import numpy as np

from vpspectral import (
    Domain,
    FourierBasis,
    PenaltyConfig,
    TimeGrid,
    VlasovRhs,
    build_velocity_basis,
    builtin_initial_conditions,
    project_initial,
    run,
)
from vpspectral.diagnostics import fit_loglog_slope, l2_norm_sq


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=16, help="modes per direction")
    parser.add_argument("--alpha", type=float, default=0.1)
    parser.add_argument("--t-end", type=float, default=10.0)
    parser.add_argument("--dts", default="2e-3,1e-3,5e-4,2.5e-4")
    parser.add_argument("--out", default="out/conservation")
    args = parser.parse_args()

    basis = build_velocity_basis("legendre", Domain(-6.0, 6.0), args.n)
    fourier = FourierBasis(args.n)
    op = VlasovRhs(basis, fourier, PenaltyConfig(True))
    f0 = builtin_initial_conditions("landau", {"alpha": args.alpha, "k": 1}, basis)
    s0 = project_initial(f0, basis, fourier)

    dts = [float(tok) for tok in args.dts.split(",")]
    finals, rows = {}, []
    for dt in dts:
        grid = TimeGrid.from_step(dt, args.t_end)
        t0 = time.perf_counter()
        final, recs = run(s0, grid, op, stride=max(1, grid.n_steps // 100),
                          recorder=lambda s: l2_norm_sq(s))
        wall = time.perf_counter() - t0
        drift = max(abs(r - recs[0]) for r in recs) / recs[0]
        finals[dt] = final.coeff
        rows.append({"dt": dt, "n_steps": grid.n_steps, "drift": drift,
                     "wall_time_s": wall})
        print(f"dt={dt:9.2e}  steps={grid.n_steps:6d}  drift={drift:.3e}  "
              f"wall={wall:6.1f}s")

    pairs = [dt for dt in dts if dt / 2 in finals]
    errs = [float(np.linalg.norm(finals[dt] - finals[dt / 2])) for dt in pairs]
    order = fit_loglog_slope(pairs, errs) if len(pairs) >= 2 else None
    print(f"observed time order from Richardson differences: {order}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "conservation.json").write_text(json.dumps(
        {"rows": rows, "richardson_errs": dict(zip(map(str, pairs), errs)),
         "observed_order": order}, indent=2) + "\n")
    print(f"wrote {out / 'conservation.json'}")


if __name__ == "__main__":
    main()
