#!/usr/bin/env python3
"""Self-convergence experiment against a refined reference run.

    python3 scripts/convergence_study.py --sweep 8,16,32 --out out/convergence

Writes the convergence CSV/JSON and prints the error table; pair with the
plotting tool:

    python3 plots/plots.py --kind convergence \
        --in out/convergence/convergence.csv --out out/convergence/fig.png
"""
import argparse
from pathlib import Path

from vpspectral import RunConfig
from vpspectral.harness import convergence_study


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sweep", default="8,16,32")
    parser.add_argument("--ref-mult", type=int, default=2)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--t-end", type=float, default=1.0)
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--out", default="out/convergence")
    args = parser.parse_args()

    config = RunConfig(basis_kind="legendre", v_min=-5.0, v_max=5.0,
                       dt=args.dt, t_end=args.t_end, ic_name="landau",
                       ic_params={"alpha": args.alpha, "k": 1})
    result = convergence_study(config, sweep=[int(n) for n in args.sweep.split(",")],
                               ref_mult=args.ref_mult, output_dir=Path(args.out))
    print(f"reference: ({result['ref']['n_s']}, {result['ref']['n_f']}) "
          f"at dt={result['ref']['dt']:.2e}")
    for row in result["rows"]:
        print(f"({row['n_s']:3d},{row['n_f']:3d})  err_l2={row['err_l2']:.3e}  "
              f"err_field={row['err_field']:.3e}  [{row['runtime_s']:.1f}s]")
    print(f"strictly decreasing: {result['strictly_decreasing']}")


if __name__ == "__main__":
    main()
