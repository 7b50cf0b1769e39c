"""`vps` command-line entry point.

Subcommands::

    vps run -c config.txt                 integrate and emit diagnostics CSV
    vps converge -c config.txt --sweep 8,16,32 --ref-mult 2
    vps kernel-check --nf 10 [--out kernel.json]
    vps project-check -c config.txt
    vps invineq-check --basis hermite --max-n 128 [--out invineq.json]

Config files are flat ``key = value`` text (see config.py for the schema).
Failures print a machine-readable JSON error record to stderr; the exit
status is 0 only when all invariants hold and outputs were written.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .basis import ConfigurationError
from .config import ConfigError, parse_config
from .harness import (
    convergence_study,
    invineq_check,
    kernel_check,
    projection_check,
    run_simulation,
)
from .integrator import BlowUpError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_CHECK_FAILED = 4


def _error_record(exc: Exception) -> dict:
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        record["violations"] = exc.violations
    return record


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")


def _parse_sweep(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError([f"cannot parse sweep list {text!r}; expected e.g. 8,16,32"])
    if not values:
        raise ConfigError([f"empty sweep list {text!r}"])
    return values


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="vps", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a configured problem")
    p_run.add_argument("-c", "--config", required=True)
    p_run.add_argument("--output-dir", default=None, help="override config output_dir")

    p_conv = sub.add_parser("converge", help="self-convergence study")
    p_conv.add_argument("-c", "--config", required=True)
    p_conv.add_argument("--sweep", required=True, help="comma list of mode counts, e.g. 8,16,32")
    p_conv.add_argument("--ref-mult", type=int, default=2)
    p_conv.add_argument("--output-dir", default=None)

    p_kern = sub.add_parser("kernel-check", help="Poisson-kernel norm identities")
    p_kern.add_argument("--nf", type=int, required=True)
    p_kern.add_argument("--out", default=None, help="optional JSON output path")

    p_proj = sub.add_parser("project-check", help="projection-rate study")
    p_proj.add_argument("-c", "--config", required=True)
    p_proj.add_argument("--output-dir", default=None)

    p_inv = sub.add_parser("invineq-check", help="inverse-inequality growth study")
    p_inv.add_argument("--basis", required=True, choices=["hermite", "legendre", "fourier"])
    p_inv.add_argument("--max-n", type=int, default=128)
    p_inv.add_argument("--out", default=None, help="optional JSON output path")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        json.dump(_error_record(exc), sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except BlowUpError as exc:
        json.dump(_error_record(exc), sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_BLOWUP
    except (ConfigurationError, ValueError, OSError) as exc:
        json.dump(_error_record(exc), sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_ERROR


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        config = parse_config(args.config)
        outdir = Path(args.output_dir) if args.output_dir else Path(config.output_dir)
        summary = run_simulation(config, outdir)
        summary.pop("_records", None)
        summary.pop("_final_state", None)
        _emit(summary)
        return EXIT_OK

    if args.command == "converge":
        config = parse_config(args.config)
        outdir = Path(args.output_dir) if args.output_dir else Path(config.output_dir)
        result = convergence_study(config, _parse_sweep(args.sweep),
                                   ref_mult=args.ref_mult, output_dir=outdir)
        _emit(result)
        return EXIT_OK if result["strictly_decreasing"] else EXIT_CHECK_FAILED

    if args.command == "kernel-check":
        record = kernel_check(args.nf, Path(args.out) if args.out else None)
        _emit(record)
        return EXIT_OK if record["tail_within_bound"] else EXIT_CHECK_FAILED

    if args.command == "project-check":
        config = parse_config(args.config)
        outdir = Path(args.output_dir) if args.output_dir else Path(config.output_dir)
        result = projection_check(config, outdir)
        _emit(result)
        ok = result["analytic_steepening"] and result["kink_within_half"]
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    if args.command == "invineq-check":
        result = invineq_check(args.basis, max_n=args.max_n,
                               out_path=Path(args.out) if args.out else None)
        _emit(result)
        return EXIT_OK if result["within_bounds"] else EXIT_CHECK_FAILED

    raise ValueError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
