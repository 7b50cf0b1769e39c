#!/usr/bin/env python3
"""Publication-style figures from solver CSV/JSON artifacts.

Reads only files emitted by the `vps` CLI (no in-process coupling):

* ``drift``        -- relative L2 drift vs time, from a diagnostics CSV
* ``field_energy`` -- field energy vs time (log y), from a diagnostics CSV
* ``convergence``  -- error vs mode count on log-log axes with the fitted
                      slope annotated, from a convergence CSV
* ``kernel_tail``  -- kernel tail sum vs Fourier width with the 2/N bound,
                      from one or more kernel-check JSON records

Usage:
    python3 plots.py --kind convergence --in conv.csv --out fig.png

Exits nonzero on schema mismatches or empty data; output is deterministic
for fixed input (fixed style, no timestamps).  A JSON record with the
output path and any fitted slope is printed to stdout.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

DIAGNOSTICS_COLUMNS = [
    "t", "l2_sq", "mass", "momentum", "kinetic_energy",
    "field_energy", "boundary_flux", "hermitian_residual",
]
CONVERGENCE_COLUMNS = ["n_s", "n_f", "err_l2", "err_field", "runtime_s"]
KERNEL_KEYS = {"nf", "norm_kn_sq", "tail_sq", "bound_2_over_nf", "sup_abs_kn"}

FIGURE_KINDS = ("drift", "field_energy", "convergence", "kernel_tail")

EXIT_OK = 0
EXIT_SCHEMA = 2


class SchemaError(ValueError):
    """Input file does not match the locked schema."""


def read_csv_columns(path: Path, required: list[str]) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}; header was {header}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {c: [float(r[c]) for r in rows] for c in required}


def read_kernel_records(paths: list[Path]) -> list[dict]:
    records = []
    for path in paths:
        payload = json.loads(Path(path).read_text())
        items = payload if isinstance(payload, list) else [payload]
        for item in items:
            missing = KERNEL_KEYS - set(item)
            if missing:
                raise SchemaError(f"{path}: kernel record missing keys {sorted(missing)}")
            records.append(item)
    if not records:
        raise SchemaError("no kernel records found")
    return sorted(records, key=lambda r: r["nf"])


def fit_slope(xs: list[float], ys: list[float]) -> float | None:
    """Least-squares slope of log(y) vs log(x); None when under-determined
    or any value is non-positive (degenerate-fit guard)."""
    if len(xs) < 2 or any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
        return None
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((a - mx) ** 2 for a in lx)
    if sxx == 0.0:
        return None
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sxx


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def plot_drift(inputs: list[Path], out: Path, title: str) -> dict:
    data = read_csv_columns(inputs[0], ["t", "l2_sq"])
    base = data["l2_sq"][0]
    if base <= 0:
        raise SchemaError(f"{inputs[0]}: l2_sq(0) must be positive")
    drift = [abs(v - base) / base for v in data["l2_sq"]]
    fig, ax = _new_axes(title or "relative L2 drift")
    ax.plot(data["t"], drift, "k.-", lw=1.0, ms=3)
    ax.set_xlabel("t")
    ax.set_ylabel("|l2_sq(t) - l2_sq(0)| / l2_sq(0)")
    ax.set_yscale("symlog", linthresh=1e-16)
    fig.savefig(out)
    plt.close(fig)
    return {"out": str(out), "kind": "drift", "slope": None}


def plot_field_energy(inputs: list[Path], out: Path, title: str) -> dict:
    data = read_csv_columns(inputs[0], ["t", "field_energy"])
    fig, ax = _new_axes(title or "field energy")
    ax.plot(data["t"], data["field_energy"], "b-", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("field energy")
    ax.set_yscale("log")
    fig.savefig(out)
    plt.close(fig)
    return {"out": str(out), "kind": "field_energy", "slope": None}


def plot_convergence(inputs: list[Path], out: Path, title: str) -> dict:
    data = read_csv_columns(inputs[0], ["n_s", "err_l2", "err_field"])
    ns = data["n_s"]
    slope = fit_slope(ns, data["err_l2"])
    fig, ax = _new_axes(title or "self-convergence")
    ax.loglog(ns, data["err_l2"], "ko-", label="err_l2")
    ax.loglog(ns, data["err_field"], "rs--", label="err_field")
    if slope is not None:
        ax.annotate(f"slope = {slope:.3f}", xy=(0.05, 0.08), xycoords="axes fraction")
    ax.set_xlabel("modes per direction")
    ax.set_ylabel("error vs reference")
    ax.legend()
    fig.savefig(out)
    plt.close(fig)
    return {"out": str(out), "kind": "convergence", "slope": slope}


def plot_kernel_tail(inputs: list[Path], out: Path, title: str) -> dict:
    records = read_kernel_records(inputs)
    nfs = [r["nf"] for r in records]
    tails = [r["tail_sq"] for r in records]
    bounds = [r["bound_2_over_nf"] for r in records]
    slope = fit_slope(nfs, tails)
    fig, ax = _new_axes(title or "kernel tail decay")
    ax.loglog(nfs, tails, "ko-", label="tail")
    ax.loglog(nfs, bounds, "r--", label="2 / n_f bound")
    if slope is not None:
        ax.annotate(f"slope = {slope:.3f}", xy=(0.05, 0.08), xycoords="axes fraction")
    ax.set_xlabel("n_f")
    ax.set_ylabel("sum of 1/k^2 beyond n_f")
    ax.legend()
    fig.savefig(out)
    plt.close(fig)
    return {"out": str(out), "kind": "kernel_tail", "slope": slope}


PLOTTERS = {
    "drift": plot_drift,
    "field_energy": plot_field_energy,
    "convergence": plot_convergence,
    "kernel_tail": plot_kernel_tail,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV/JSON path(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    try:
        inputs = [Path(p) for p in args.inputs]
        for p in inputs:
            if not p.exists():
                raise SchemaError(f"input not found: {p}")
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        record = PLOTTERS[args.kind](inputs, out, args.title)
    except (SchemaError, json.JSONDecodeError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_SCHEMA
    json.dump(record, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
