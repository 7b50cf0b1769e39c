"""Conserved quantities, projection errors, and inverse-inequality ratios.

Everything here is a pure computation on snapshots; the CSV schema emitted
by :func:`write_diagnostics_csv` is locked (the plotting side re-parses it).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import (
    Domain,
    FourierBasis,
    Resolution,
    VelocityBasis,
    build_velocity_basis,
    project_initial,
)
from .poisson import FieldModes
from .state import SpectralState, hermitian_residual

TWO_PI = 2.0 * math.pi

#: Theorem constant in ||E_a - E_b|| <= FIELD_ERROR_CONSTANT * sqrt(|Omega_v|) * ||f_a - f_b||
FIELD_ERROR_CONSTANT = 2.0 * math.pi * math.sqrt(6.0) / 3.0

DIAGNOSTICS_COLUMNS = [
    "t", "l2_sq", "mass", "momentum", "kinetic_energy",
    "field_energy", "boundary_flux", "hermitian_residual",
]


@dataclass
class DiagnosticsRecord:
    t: float
    l2_sq: float
    mass: float
    momentum: float
    kinetic_energy: float
    field_energy: float
    boundary_flux: float
    hermitian_residual: float

    def as_row(self) -> list[float]:
        return [getattr(self, c) for c in DIAGNOSTICS_COLUMNS]


def l2_norm_sq(state: SpectralState) -> float:
    """sum |C|^2 = ||f||^2 over the phase-space domain (Parseval)."""
    return float(np.sum(np.abs(state.coeff) ** 2))


def compute_record(state: SpectralState, operator) -> DiagnosticsRecord:
    """Snapshot of the conserved/monitored quantities for one state."""
    basis: VelocityBasis = operator.basis
    fourier: FourierBasis = operator.fourier
    coeff = state.coeff
    n_f = fourier.n_f
    sqrt_2pi = math.sqrt(TWO_PI)

    col0 = coeff[:, n_f].real
    mass = sqrt_2pi * float(basis.moments @ col0)
    momentum = sqrt_2pi * float(basis.moment1 @ col0)
    kinetic = 0.5 * sqrt_2pi * float(basis.moment2 @ col0)

    field = operator.field(coeff)
    flux = 0.0
    if basis.domain.has_interval:
        xq, xw = fourier.x_nodes()
        eta = fourier.eval(xq)
        e_x = (field.modes @ eta).real
        ftop = ((basis.boundary_top @ coeff) @ eta).real
        fbot = ((basis.boundary_bot @ coeff) @ eta).real
        flux = 0.5 * float(np.sum(xw * e_x * (ftop ** 2 - fbot ** 2)))

    return DiagnosticsRecord(
        t=state.t,
        l2_sq=l2_norm_sq(state),
        mass=mass,
        momentum=momentum,
        kinetic_energy=kinetic,
        field_energy=field.l2_norm_sq(),
        boundary_flux=flux,
        hermitian_residual=hermitian_residual(coeff),
    )


def write_diagnostics_csv(records: Sequence[DiagnosticsRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for rec in records:
            writer.writerow([repr(float(v)) for v in rec.as_row()])


# ----------------------------------------------------------------------
# inter-solution errors
# ----------------------------------------------------------------------

def embed_coefficients(coeff: np.ndarray, res_hi: Resolution) -> np.ndarray:
    """Zero-pad a coefficient array into a finer index set (same modes)."""
    n_s, width = coeff.shape
    n_f = (width - 1) // 2
    if n_s > res_hi.n_s or n_f > res_hi.n_f:
        raise ValueError("target resolution is smaller than the source")
    out = np.zeros((res_hi.n_s, 2 * res_hi.n_f + 1), dtype=np.complex128)
    off = res_hi.n_f - n_f
    out[:n_s, off:off + width] = coeff
    return out


def l2_error_between(state_lo: SpectralState, state_hi: SpectralState) -> float:
    """||f_lo - f_hi|| with the coarse state embedded into the fine index set."""
    res_hi = Resolution(state_hi.n_s, state_hi.n_f)
    diff = embed_coefficients(state_lo.coeff, res_hi) - state_hi.coeff
    return float(np.linalg.norm(diff))


def field_error(field_a: FieldModes, field_b: FieldModes) -> float:
    """||E_a - E_b|| over [0, 2*pi) via mode differences."""
    na, nb = field_a.n_f, field_b.n_f
    if na == nb:
        return float(np.linalg.norm(field_a.modes - field_b.modes))
    if na > nb:
        field_a, field_b = field_b, field_a
        na, nb = nb, na
    padded = np.zeros(2 * nb + 1, dtype=np.complex128)
    padded[nb - na:nb + na + 1] = field_a.modes
    return float(np.linalg.norm(padded - field_b.modes))


# ----------------------------------------------------------------------
# projection operators and their error norms
# ----------------------------------------------------------------------

def velocity_deriv_map(kind: str, domain: Domain, n: int) -> np.ndarray:
    """Exact coefficient map of d/dv on an n-mode family.

    Hermite leaks one mode up (shape (n+1, n)); Legendre is closed
    (shape (n, n)).
    """
    return build_velocity_basis(kind, domain, n).deriv_map_full()


def velocity_projection_errors(g: Callable[[np.ndarray], np.ndarray], kind: str,
                               domain: Domain, n_lo: int, n_hi: int) -> dict:
    """L2/H1/H2 norms of (P_hi - P_lo) g, the standard tail surrogate for
    the projection error of g onto the n_lo-mode family.

    Requires n_hi >= 2 * n_lo so the unresolved remainder beyond n_hi is
    dominated by the measured tail for decaying spectra.
    """
    if n_hi < 2 * n_lo:
        raise ValueError(f"need n_hi >= 2*n_lo, got {n_hi} < {2 * n_lo}")
    basis_hi = build_velocity_basis(kind, domain, n_hi)
    samples = np.asarray(g(basis_hi.quad_v), dtype=float)
    coeff = (basis_hi.eval(basis_hi.quad_v) * basis_hi.quad_w) @ samples
    tail = coeff.copy()
    tail[:n_lo] = 0.0

    g1 = velocity_deriv_map(kind, domain, n_hi)
    d1 = g1 @ tail
    g2 = velocity_deriv_map(kind, domain, g1.shape[0])  # consumes d1's span exactly
    d2 = g2 @ d1

    l2_sq = float(np.sum(tail ** 2))
    h1_sq = l2_sq + float(np.sum(d1 ** 2))
    h2_sq = h1_sq + float(np.sum(d2 ** 2))
    return {"l2": math.sqrt(l2_sq), "h1": math.sqrt(h1_sq), "h2": math.sqrt(h2_sq),
            "coeff_lo": coeff[:n_lo]}


def project_exact(f: Callable[[np.ndarray, np.ndarray], np.ndarray], kind: str,
                  domain: Domain, res_lo: Resolution, res_hi: Resolution):
    """Project f on the fine grid and measure the coarse-truncation error.

    Returns ``(state_lo, errors)`` where errors holds the L2/H1/H2 norms of
    the tail (the fine-resolution surrogate of f - P_lo f).  Derivatives are
    applied spectrally: ik in x, the exact coefficient map in v.
    """
    if res_hi.n_s < 2 * res_lo.n_s or res_hi.n_f < 2 * res_lo.n_f:
        raise ValueError("need res_hi >= 2 * res_lo in both directions")
    basis_hi = build_velocity_basis(kind, domain, res_hi.n_s)
    fourier_hi = FourierBasis(res_hi.n_f)
    state_hi = project_initial(f, basis_hi, fourier_hi)

    off = res_hi.n_f - res_lo.n_f
    lo_block = state_hi.coeff[:res_lo.n_s, off:off + 2 * res_lo.n_f + 1].copy()
    state_lo = SpectralState(lo_block, 0.0)

    tail = state_hi.coeff.copy()
    tail[:res_lo.n_s, off:off + 2 * res_lo.n_f + 1] = 0.0

    ik = 1j * np.arange(-res_hi.n_f, res_hi.n_f + 1, dtype=float)
    g1 = velocity_deriv_map(kind, domain, res_hi.n_s)
    g2 = velocity_deriv_map(kind, domain, g1.shape[0])

    dx1 = tail * ik
    dv1 = g1 @ tail
    l2_sq = float(np.sum(np.abs(tail) ** 2))
    h1_sq = l2_sq + float(np.sum(np.abs(dx1) ** 2)) + float(np.sum(np.abs(dv1) ** 2))
    dx2 = dx1 * ik
    dxdv = g1 @ dx1
    dv2 = g2 @ dv1
    h2_sq = h1_sq + float(np.sum(np.abs(dx2) ** 2)) + 2.0 * float(np.sum(np.abs(dxdv) ** 2)) \
        + float(np.sum(np.abs(dv2) ** 2))
    errors = {"l2": math.sqrt(l2_sq), "h1": math.sqrt(h1_sq), "h2": math.sqrt(h2_sq)}
    return state_lo, errors


def kink_function(p: float, v0: float, width: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """|v - v0|^p profile with a Gaussian envelope: finite Sobolev index
    p + 1/2, used as the regularity-limited projection test function."""
    def g(v: np.ndarray) -> np.ndarray:
        r = np.abs(v - v0)
        if width > 0.0:
            r = np.sqrt(r * r + width * width)
        return r ** p * np.exp(-0.25 * (v - v0) ** 2)
    return g


def fit_loglog_slope(ns: Sequence[float], errs: Sequence[float]) -> float:
    """Least-squares slope of log(err) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if len(ns) < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(np.log(ns), np.log(errs), 1)[0])


# ----------------------------------------------------------------------
# inverse-inequality ratios
# ----------------------------------------------------------------------

def velocity_deriv_ratio(kind: str, domain: Domain, n: int) -> float:
    """Exact operator norm of d/dv on the n-mode family: max ||dg/dv||/||g||."""
    return float(np.linalg.svd(velocity_deriv_map(kind, domain, n), compute_uv=False)[0])


def inverse_inequality_table(kind: str, domain: Domain, n_values: Sequence[int],
                             rng: np.random.Generator | None = None,
                             n_samples: int = 16) -> dict:
    """Derivative-to-function norm ratios and their fitted growth exponent.

    For each n the exact operator norm is reported together with the max
    ratio over random members (always <= the operator norm).
    """
    rows = []
    for n in n_values:
        op_norm = velocity_deriv_ratio(kind, domain, n)
        sampled = 0.0
        if rng is not None:
            gmap = velocity_deriv_map(kind, domain, n)
            for _ in range(n_samples):
                c = rng.standard_normal(n)
                sampled = max(sampled, float(np.linalg.norm(gmap @ c) / np.linalg.norm(c)))
        rows.append({"n": int(n), "ratio": op_norm, "sampled_ratio": sampled})
    exponent = fit_loglog_slope([r["n"] for r in rows], [r["ratio"] for r in rows])
    return {"kind": kind, "rows": rows, "exponent": exponent}


def fourier_mode_ratio(k: int) -> float:
    """||d(eta_k)/dx|| / ||eta_k|| = |k| exactly (eigenfunction of d/dx)."""
    return float(abs(k))
