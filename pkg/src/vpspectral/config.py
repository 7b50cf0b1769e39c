"""Run configuration: flat key=value files, validation, built-in ICs.

The config format is one ``key = value`` pair per line with ``#`` comments.
All violations are collected and reported together, each naming the
offending line.  Built-in initial conditions:

``maxwellian``   exp(-(v-u)^2 / (2 vt^2)) / (vt sqrt(2 pi));
                 params: vt > 0 (default 1), u (default 0)
``landau``       (1 + alpha cos(k x)) * maxwellian;
                 params: alpha in [0, 1) (default 0.1), integer k >= 1
                 (default 1), vt, u
``two_stream``   half-sum of counter-drifting Maxwellians at +-u0 times
                 (1 + alpha cos(k x)); params: u0 (default 2), alpha, k, vt
``single_mode``  amplitude * cos(k x) * phi_n(v); test-only (signed),
                 params: integer n >= 0, integer k >= 1, amplitude

All return nonnegative densities for default parameters except
``single_mode``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .basis import (
    BASIS_KINDS,
    HERMITE,
    LEGENDRE,
    ConfigurationError,
    Domain,
    Resolution,
    VelocityBasis,
)

IC_NAMES = ("maxwellian", "landau", "two_stream", "single_mode")


class ConfigError(ConfigurationError):
    """Carries the full list of violations found while parsing a config."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass
class RunConfig:
    basis_kind: str = LEGENDRE
    v_min: Optional[float] = -6.0
    v_max: Optional[float] = 6.0
    v_unbounded: bool = False
    n_s: int = 8
    n_f: int = 8
    dt: float = 1e-3
    t_end: float = 1.0
    stride: int = 10
    penalty_enabled: Optional[bool] = None  # None = auto (on unless unbounded Hermite)
    ic_name: str = "landau"
    ic_params: dict = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0

    def resolved_penalty(self) -> bool:
        if self.penalty_enabled is not None:
            return self.penalty_enabled
        return not (self.basis_kind == HERMITE and self.v_unbounded)

    def domain(self) -> Domain:
        return Domain(v_min=self.v_min, v_max=self.v_max, v_unbounded=self.v_unbounded)

    def resolution(self) -> Resolution:
        return Resolution(self.n_s, self.n_f)

    def as_dict(self) -> dict:
        d = {
            "basis_kind": self.basis_kind, "v_min": self.v_min, "v_max": self.v_max,
            "v_unbounded": self.v_unbounded, "n_s": self.n_s, "n_f": self.n_f,
            "dt": self.dt, "t_end": self.t_end, "stride": self.stride,
            "penalty_enabled": self.resolved_penalty(), "ic_name": self.ic_name,
            "output_dir": self.output_dir, "seed": self.seed,
        }
        d.update({f"ic_{k}": v for k, v in self.ic_params.items()})
        return d


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_SCALAR_KEYS = {
    "basis_kind": str,
    "v_min": float,
    "v_max": float,
    "v_unbounded": _parse_bool,
    "n_s": int,
    "n_f": int,
    "dt": float,
    "t_end": float,
    "stride": int,
    "ic_name": str,
    "output_dir": str,
    "seed": int,
}


def parse_config(path) -> RunConfig:
    """Parse and fully validate a flat key=value config file.

    Raises :class:`ConfigError` listing every violation (unknown keys,
    type mismatches, invariant breaches), each tagged with its line.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    violations: list[str] = []
    raw: dict[str, object] = {}
    ic_params: dict[str, float] = {}

    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            violations.append(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key == "penalty_enabled":
            if value.lower() == "auto":
                raw[key] = None
            else:
                try:
                    raw[key] = _parse_bool(value)
                except ValueError:
                    violations.append(f"line {lineno}: penalty_enabled must be auto/true/false")
        elif key in _SCALAR_KEYS:
            try:
                raw[key] = _SCALAR_KEYS[key](value)
            except ValueError:
                violations.append(
                    f"line {lineno}: cannot parse {key} = {value!r} as "
                    f"{_SCALAR_KEYS[key].__name__}"
                )
        elif key.startswith("ic_"):
            try:
                ic_params[key[3:]] = float(value)
            except ValueError:
                violations.append(f"line {lineno}: cannot parse {key} = {value!r} as float")
        else:
            violations.append(f"line {lineno}: unknown key {key!r}")

    cfg = RunConfig()
    for key, value in raw.items():
        setattr(cfg, key, value)
    cfg.ic_params = ic_params
    cfg.penalty_enabled = raw.get("penalty_enabled", None)

    violations.extend(validate_config(cfg))
    if violations:
        raise ConfigError(violations)
    return cfg


def validate_config(cfg: RunConfig) -> list[str]:
    """All invariant violations of a RunConfig (empty list when valid)."""
    problems: list[str] = []
    if cfg.basis_kind not in BASIS_KINDS:
        problems.append(
            f"unknown basis kind {cfg.basis_kind!r}; allowed: {', '.join(BASIS_KINDS)}"
        )
    if cfg.basis_kind == LEGENDRE and cfg.v_unbounded:
        problems.append("legendre basis requires a bounded velocity domain")
    bounded_needed = not cfg.v_unbounded
    if bounded_needed and (cfg.v_min is None or cfg.v_max is None):
        problems.append("bounded velocity domain needs v_min and v_max")
    if cfg.v_min is not None and cfg.v_max is not None and not (cfg.v_min < cfg.v_max):
        problems.append(f"need v_min < v_max, got v_min={cfg.v_min}, v_max={cfg.v_max}")
    if cfg.n_s < 1:
        problems.append(f"n_s must be >= 1, got {cfg.n_s}")
    if cfg.n_f < 1:
        problems.append(f"n_f must be >= 1, got {cfg.n_f}")
    if cfg.dt <= 0:
        problems.append(f"dt must be > 0, got {cfg.dt}")
    if cfg.t_end < 0:
        problems.append(f"t_end must be >= 0, got {cfg.t_end}")
    if cfg.stride < 1:
        problems.append(f"stride must be >= 1, got {cfg.stride}")
    if cfg.resolved_penalty() and (cfg.v_min is None or cfg.v_max is None):
        problems.append("penalty_enabled requires a v_min/v_max boundary interval")
    problems.extend(validate_ic(cfg.ic_name, cfg.ic_params))
    return problems


def validate_ic(name: str, params: dict) -> list[str]:
    problems: list[str] = []
    if name not in IC_NAMES:
        problems.append(f"unknown initial condition {name!r}; allowed: {', '.join(IC_NAMES)}")
        return problems
    allowed = {
        "maxwellian": {"vt", "u"},
        "landau": {"alpha", "k", "vt", "u"},
        "two_stream": {"alpha", "k", "vt", "u0"},
        "single_mode": {"n", "k", "amplitude"},
    }[name]
    for key in params:
        if key not in allowed:
            problems.append(f"initial condition {name!r} has no parameter {key!r}")
    vt = params.get("vt", 1.0)
    if "vt" in allowed and vt <= 0:
        problems.append(f"ic_vt must be > 0, got {vt}")
    alpha = params.get("alpha", 0.1)
    if "alpha" in allowed and not (0.0 <= alpha < 1.0):
        problems.append(f"ic_alpha must be in [0, 1), got {alpha}")
    k = params.get("k", 1.0)
    if "k" in allowed and (k < 1 or k != int(k)):
        problems.append(f"ic_k must be a positive integer, got {k}")
    n = params.get("n", 0.0)
    if name == "single_mode" and (n < 0 or n != int(n)):
        problems.append(f"ic_n must be a nonnegative integer, got {n}")
    return problems


def builtin_initial_conditions(name: str, params: dict,
                               basis: VelocityBasis | None = None,
                               ) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Callable f0(x, v) for a named built-in initial condition."""
    problems = validate_ic(name, params)
    if problems:
        raise ConfigError(problems)

    vt = params.get("vt", 1.0)
    u = params.get("u", 0.0)

    def maxwellian(v, center=0.0):
        return np.exp(-0.5 * ((v - center) / vt) ** 2) / (vt * math.sqrt(2.0 * math.pi))

    if name == "maxwellian":
        return lambda x, v: np.broadcast_to(maxwellian(v, u), np.broadcast(x, v).shape).copy()
    if name == "landau":
        alpha = params.get("alpha", 0.1)
        k = int(params.get("k", 1))
        return lambda x, v: (1.0 + alpha * np.cos(k * x)) * maxwellian(v, u)
    if name == "two_stream":
        alpha = params.get("alpha", 0.05)
        k = int(params.get("k", 1))
        u0 = params.get("u0", 2.0)
        return lambda x, v: (1.0 + alpha * np.cos(k * x)) * 0.5 * (
            maxwellian(v, u0) + maxwellian(v, -u0))
    # single_mode
    if basis is None:
        raise ConfigError(["single_mode initial condition needs the velocity basis"])
    n = int(params.get("n", 0))
    if n >= basis.n_s:
        raise ConfigError([f"ic_n={n} outside the basis range [0, {basis.n_s - 1}]"])
    k = int(params.get("k", 1))
    amp = params.get("amplitude", 1.0)

    def f0(x, v):
        phi_flat = basis.eval(np.ravel(np.broadcast_to(v, np.broadcast(x, v).shape)))[n]
        return amp * np.cos(k * np.broadcast_to(x, np.broadcast(x, v).shape)) \
            * phi_flat.reshape(np.broadcast(x, v).shape)

    return f0
