"""Problem assembly and the study drivers behind the CLI subcommands.

Each driver is a pure-ish function returning a JSON-serializable summary;
file emission (CSV/JSON) happens only when an output directory is given,
so studies are reusable from tests without touching the filesystem.
"""
from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .basis import (
    FourierBasis,
    HERMITE,
    LEGENDRE,
    Resolution,
    build_velocity_basis,
    project_initial,
)
from .config import RunConfig, builtin_initial_conditions
from .diagnostics import (
    DIAGNOSTICS_COLUMNS,
    field_error,
    fit_loglog_slope,
    inverse_inequality_table,
    kink_function,
    l2_error_between,
    project_exact,
    velocity_projection_errors,
    write_diagnostics_csv,
)
from .integrator import TimeGrid, run
from .poisson import kernel_norms
from .rhs import PenaltyConfig, VlasovRhs
from .state import SpectralState

CONVERGENCE_COLUMNS = ["n_s", "n_f", "err_l2", "err_field", "runtime_s"]


def build_operator(config: RunConfig, n_s: Optional[int] = None,
                   n_f: Optional[int] = None) -> VlasovRhs:
    basis = build_velocity_basis(config.basis_kind, config.domain(),
                                 n_s if n_s is not None else config.n_s)
    fourier = FourierBasis(n_f if n_f is not None else config.n_f)
    return VlasovRhs(basis, fourier, PenaltyConfig(config.resolved_penalty()))


def initial_state(config: RunConfig, operator: VlasovRhs) -> SpectralState:
    f0 = builtin_initial_conditions(config.ic_name, config.ic_params, operator.basis)
    return project_initial(f0, operator.basis, operator.fourier)


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, default=float) + "\n")


def run_simulation(config: RunConfig, output_dir: Optional[Path] = None) -> dict:
    """Integrate the configured problem; emit diagnostics CSV + summary JSON."""
    operator = build_operator(config)
    state0 = initial_state(config, operator)
    grid = TimeGrid.from_step(config.dt, config.t_end)

    t_start = time.perf_counter()
    final, records = run(state0, grid, operator, stride=config.stride)
    wall = time.perf_counter() - t_start

    l2_0 = records[0].l2_sq
    drift = max(abs(r.l2_sq - l2_0) for r in records) / l2_0 if l2_0 > 0 else 0.0
    herm = max(r.hermitian_residual for r in records)
    summary = {
        "config": config.as_dict(),
        "final": dict(zip(DIAGNOSTICS_COLUMNS, records[-1].as_row())),
        "n_steps": grid.n_steps,
        "n_records": len(records),
        "relative_l2_drift": drift,
        "max_hermitian_residual": herm,
        "wall_time_s": wall,
    }
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        write_diagnostics_csv(records, output_dir / "diagnostics.csv")
        _write_json(summary, output_dir / "summary.json")
        summary["outputs"] = {
            "diagnostics_csv": str(output_dir / "diagnostics.csv"),
            "summary_json": str(output_dir / "summary.json"),
        }
    summary["_records"] = records
    summary["_final_state"] = final
    return summary


def convergence_study(config: RunConfig, sweep: Sequence[int], ref_mult: int = 2,
                      output_dir: Optional[Path] = None) -> dict:
    """Self-convergence against a refined reference run.

    Each sweep entry n is run at (n_s, n_f) = (n, n) with the configured dt;
    the reference uses ref_mult * max(sweep) modes and dt/4.  Errors are
    final-time L2 distances with the coarse state embedded into the
    reference index set.
    """
    sweep = sorted(int(n) for n in sweep)
    if not sweep:
        raise ValueError("empty sweep")
    n_ref = ref_mult * sweep[-1]
    grid_ref = TimeGrid.from_step(config.dt / 4.0, config.t_end)

    op_ref = build_operator(config, n_s=n_ref, n_f=n_ref)
    ref_final, _ = run(initial_state(config, op_ref), grid_ref, op_ref,
                       stride=max(1, grid_ref.n_steps), recorder=lambda s: None,
                       warn_cfl=False)
    field_ref = op_ref.field(ref_final.coeff)

    rows = []
    for n in sweep:
        op = build_operator(config, n_s=n, n_f=n)
        grid = TimeGrid.from_step(config.dt, config.t_end)
        t0 = time.perf_counter()
        final, _ = run(initial_state(config, op), grid, op,
                       stride=max(1, grid.n_steps), recorder=lambda s: None,
                       warn_cfl=False)
        runtime = time.perf_counter() - t0
        rows.append({
            "n_s": n, "n_f": n,
            "err_l2": l2_error_between(final, ref_final),
            "err_field": field_error(op.field(final.coeff), field_ref),
            "runtime_s": runtime,
        })

    errs = [r["err_l2"] for r in rows]
    result = {
        "config": config.as_dict(),
        "sweep": sweep,
        "ref": {"n_s": n_ref, "n_f": n_ref, "dt": config.dt / 4.0},
        "rows": rows,
        "strictly_decreasing": all(a > b for a, b in zip(errs, errs[1:])),
    }
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(output_dir / "convergence.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CONVERGENCE_COLUMNS)
            for r in rows:
                writer.writerow([r["n_s"], r["n_f"], repr(r["err_l2"]),
                                 repr(r["err_field"]), repr(r["runtime_s"])])
        _write_json(result, output_dir / "convergence.json")
        result["outputs"] = {"convergence_csv": str(output_dir / "convergence.csv")}
    return result


def kernel_check(n_f: int, out_path: Optional[Path] = None) -> dict:
    record = kernel_norms(n_f)
    record["tail_within_bound"] = record["tail_sq"] <= record["bound_2_over_nf"]
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _write_json(record, out_path)
    return record


ANALYTIC_GRID = (4, 8, 16, 32)
KINK_POWER = 3.5
KINK_CENTER = 0.6
KINK_GRIDS = {LEGENDRE: (8, 16, 32, 64), HERMITE: (32, 64, 128)}

# entire-function velocity profiles with non-terminating expansions: a plain
# Gaussian is a single Hermite mode, so the Hermite study modulates it
ANALYTIC_V_PROFILE = {
    LEGENDRE: lambda v: np.exp(-0.5 * v * v),
    HERMITE: lambda v: np.cos(2.0 * v) * np.exp(-0.5 * v * v),
}


def projection_check(config: RunConfig, output_dir: Optional[Path] = None) -> dict:
    """Projection-rate study for the configured basis kind.

    * analytic target exp(sin x) exp(-v^2/2): successive log-log slopes of
      the L2 error must steepen (super-algebraic decay);
    * |v - v0|^p kink (Sobolev index m = p + 1/2): fitted slope must sit
      within +-0.5 of the predicted -m (Legendre) or -m/2 (Hermite).
    """
    kind = config.basis_kind
    domain = config.domain()

    profile = ANALYTIC_V_PROFILE[kind]
    analytic = lambda x, v: np.exp(np.sin(x)) * profile(v)
    analytic_rows = []
    for n in ANALYTIC_GRID:
        _, errs = project_exact(analytic, kind, domain, Resolution(n, n),
                                Resolution(2 * n, 2 * n))
        analytic_rows.append({"n": n, "err_l2": errs["l2"], "err_h1": errs["h1"],
                              "err_h2": errs["h2"]})
    pair_slopes = [
        math.log(analytic_rows[i]["err_l2"] / analytic_rows[i + 1]["err_l2"])
        / math.log(ANALYTIC_GRID[i + 1] / ANALYTIC_GRID[i])
        for i in range(len(ANALYTIC_GRID) - 1)
    ]
    steepening = all(a < b for a, b in zip(pair_slopes, pair_slopes[1:]))

    m_index = KINK_POWER + 0.5
    predicted = -m_index if kind == LEGENDRE else -0.5 * m_index
    kink = kink_function(KINK_POWER, KINK_CENTER)
    kink_rows = []
    for n in KINK_GRIDS[kind]:
        errs = velocity_projection_errors(kink, kind, domain, n, 2 * n)
        kink_rows.append({"n": n, "err_l2": errs["l2"]})
    kink_slope = fit_loglog_slope([r["n"] for r in kink_rows],
                                  [r["err_l2"] for r in kink_rows])

    result = {
        "kind": kind,
        "analytic": analytic_rows,
        "analytic_pair_slopes": pair_slopes,
        "analytic_steepening": steepening,
        "kink_power": KINK_POWER,
        "kink_sobolev_index": m_index,
        "kink": kink_rows,
        "kink_slope": kink_slope,
        "kink_predicted_slope": predicted,
        "kink_within_half": abs(kink_slope - predicted) <= 0.5,
    }
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        with open(output_dir / "project_check.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["study", "n", "err_l2"])
            for r in analytic_rows:
                writer.writerow(["analytic", r["n"], repr(r["err_l2"])])
            for r in kink_rows:
                writer.writerow(["kink", r["n"], repr(r["err_l2"])])
        _write_json(result, output_dir / "project_check.json")
    return result


INVINEQ_BOUNDS = {HERMITE: (0.4, 0.6), LEGENDRE: (None, 2.2), "fourier": (0.999, 1.001)}


def invineq_check(kind: str, max_n: int = 128, config: Optional[RunConfig] = None,
                  out_path: Optional[Path] = None) -> dict:
    """Inverse-inequality growth of ||d/dv phi|| / ||phi|| (or |k| for Fourier)."""
    if kind == "fourier":
        ks = [k for k in (1, 2, 4, 8, 16, 32, 64, 128) if k <= max_n]
        rows = [{"n": k, "ratio": float(k)} for k in ks]
        exponent = fit_loglog_slope(ks, [r["ratio"] for r in rows])
        result = {"kind": kind, "rows": rows, "exponent": exponent}
    else:
        cfg = config if config is not None else RunConfig()
        domain = cfg.domain()
        n_values = [n for n in (8, 16, 32, 64, 128, 256) if n <= max_n]
        rng = np.random.default_rng(cfg.seed)
        result = inverse_inequality_table(kind, domain, n_values, rng=rng)

    lo, hi = INVINEQ_BOUNDS[kind]
    exponent = result["exponent"]
    result["within_bounds"] = (lo is None or exponent >= lo) and (hi is None or exponent <= hi)
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _write_json(result, out_path)
    return result
