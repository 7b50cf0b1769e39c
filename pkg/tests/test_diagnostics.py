"""Moments, Parseval, projection errors, inverse inequalities, field errors."""
import csv
import math

import numpy as np
import pytest

from vpspectral import (
    Domain,
    FieldModes,
    FourierBasis,
    PenaltyConfig,
    Resolution,
    SpectralState,
    VlasovRhs,
    build_velocity_basis,
    builtin_initial_conditions,
    compute_record,
    field_error,
    l2_norm_sq,
    project_exact,
    project_initial,
    write_diagnostics_csv,
)
from vpspectral.diagnostics import (
    DIAGNOSTICS_COLUMNS,
    FIELD_ERROR_CONSTANT,
    embed_coefficients,
    fit_loglog_slope,
    inverse_inequality_table,
    fourier_mode_ratio,
    kink_function,
    l2_error_between,
    velocity_deriv_map,
    velocity_projection_errors,
)
from vpspectral.state import random_hermitian_state, reconstruct

DOM = Domain(-6.0, 6.0)
DOM_UNB = Domain(-6.0, 6.0, v_unbounded=True)


def make_op(kind="legendre", n_s=8, n_f=6):
    domain = DOM if kind == "legendre" else DOM_UNB
    basis = build_velocity_basis(kind, domain, n_s)
    return VlasovRhs(basis, FourierBasis(n_f),
                     PenaltyConfig(kind == "legendre"))


# ----------------------------------------------------------------------
# norms and moments
# ----------------------------------------------------------------------

def test_l2_norm_trivial():
    assert l2_norm_sq(SpectralState(np.zeros((3, 5), dtype=complex))) == 0.0
    coeff = np.zeros((3, 5), dtype=complex)
    coeff[1, 2] = 1.0
    assert l2_norm_sq(SpectralState(coeff)) == 1.0


@pytest.mark.parametrize("kind", ["legendre", "hermite"])
def test_parseval_against_quadrature(kind):
    rng = np.random.default_rng(0)
    op = make_op(kind)
    b, fo = op.basis, op.fourier
    xq, xw = fo.x_nodes()
    for _ in range(25):
        s = random_hermitian_state(b.n_s, fo.n_f, rng)
        fvals = reconstruct(s.coeff, b, fo, xq, b.quad_v)
        quad = np.einsum("x,xv,v->", xw, np.abs(fvals) ** 2, b.quad_w)
        assert l2_norm_sq(s) == pytest.approx(float(quad), abs=1e-10 * max(1.0, quad))


@pytest.mark.parametrize("kind", ["legendre", "hermite"])
def test_mass_matches_quadrature_of_f0(kind):
    op = make_op(kind)
    b, fo = op.basis, op.fourier
    f0 = builtin_initial_conditions("landau", {"alpha": 0.1, "k": 1}, b)
    state = project_initial(f0, b, fo)
    rec = compute_record(state, op)
    xq, xw = fo.x_nodes()
    xx, vv = np.meshgrid(xq, b.quad_v, indexing="ij")
    mass_quad = float(np.einsum("x,xv,v->", xw, f0(xx, vv), b.quad_w))
    assert rec.mass == pytest.approx(mass_quad, abs=1e-10)


def test_record_physical_values_uniform_maxwellian():
    op = make_op("hermite")
    b, fo = op.basis, op.fourier
    f0 = builtin_initial_conditions("maxwellian", {}, b)
    state = project_initial(f0, b, fo)
    rec = compute_record(state, op)
    assert rec.mass == pytest.approx(2 * math.pi, rel=1e-12)
    assert rec.momentum == pytest.approx(0.0, abs=1e-12)
    assert rec.kinetic_energy == pytest.approx(math.pi, rel=1e-12)
    assert rec.field_energy == pytest.approx(0.0, abs=1e-24)


def test_boundary_flux_tracks_l2_rate_without_penalty():
    rng = np.random.default_rng(1)
    basis = build_velocity_basis("legendre", DOM, 6)
    op_off = VlasovRhs(basis, FourierBasis(4), PenaltyConfig(False))
    s = random_hermitian_state(6, 4, rng)
    rec = compute_record(s, op_off)
    d_l2 = 2.0 * np.vdot(s.coeff, op_off.apply(s.coeff)).real
    assert d_l2 == pytest.approx(2.0 * rec.boundary_flux, rel=1e-9)


def test_csv_schema_lock(tmp_path):
    op = make_op()
    s = SpectralState(np.zeros((8, 13), dtype=complex))
    recs = [compute_record(s, op)]
    path = tmp_path / "diag.csv"
    write_diagnostics_csv(recs, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == DIAGNOSTICS_COLUMNS
    assert len(rows) == 2
    assert [float(v) for v in rows[1]] == recs[0].as_row()


# ----------------------------------------------------------------------
# projection errors
# ----------------------------------------------------------------------

def test_project_exact_in_span_is_zero():
    rng = np.random.default_rng(2)
    b = build_velocity_basis("legendre", DOM, 4)
    fo = FourierBasis(3)
    coeff = random_hermitian_state(4, 3, rng).coeff

    def f(x, v):
        return reconstruct(coeff, b, fo, x[:, 0], v[0, :]).real

    state_lo, errs = project_exact(f, "legendre", DOM, Resolution(4, 3), Resolution(8, 6))
    assert errs["l2"] < 1e-12
    assert errs["h2"] < 1e-10
    assert np.max(np.abs(state_lo.coeff - coeff)) < 1e-12


def test_projection_errors_decrease_for_smooth_target():
    f = lambda x, v: np.exp(np.sin(x)) * np.exp(-0.5 * v * v)
    errs = []
    for n in (4, 8, 16):
        _, e = project_exact(f, "legendre", DOM, Resolution(n, n), Resolution(2 * n, 2 * n))
        errs.append(e["l2"])
    assert errs[0] > errs[1] > errs[2]
    # H1/H2 dominate L2
    _, e = project_exact(f, "legendre", DOM, Resolution(8, 8), Resolution(16, 16))
    assert e["l2"] <= e["h1"] <= e["h2"]


def test_velocity_kink_rate_legendre():
    g = kink_function(3.5, 0.6)
    ns = (8, 16, 32)
    errs = [velocity_projection_errors(g, "legendre", DOM, n, 2 * n)["l2"] for n in ns]
    slope = fit_loglog_slope(ns, errs)
    assert abs(slope - (-4.0)) <= 0.5


def test_projection_requires_refinement_margin():
    with pytest.raises(ValueError):
        velocity_projection_errors(lambda v: v, "legendre", DOM, 8, 12)


# ----------------------------------------------------------------------
# inverse inequalities
# ----------------------------------------------------------------------

def test_constant_mode_has_zero_ratio():
    gmap = velocity_deriv_map("legendre", DOM, 4)
    e0 = np.zeros(4)
    e0[0] = 1.0
    assert np.linalg.norm(gmap @ e0) == 0.0


def test_fourier_single_mode_ratio_exact():
    for k in (1, 3, 8, 21):
        assert fourier_mode_ratio(k) == float(k)


def test_hermite_single_top_mode_ratio():
    # ||phi_n'||^2 = n + 1/2 for a single Hermite mode
    gmap = velocity_deriv_map("hermite", DOM_UNB, 8)
    e7 = np.zeros(8)
    e7[7] = 1.0
    assert np.linalg.norm(gmap @ e7) == pytest.approx(math.sqrt(7.5), abs=1e-13)


def test_growth_exponents():
    tab_h = inverse_inequality_table("hermite", DOM_UNB, (8, 16, 32, 64, 128))
    assert 0.4 <= tab_h["exponent"] <= 0.6
    tab_l = inverse_inequality_table("legendre", DOM, (8, 16, 32, 64, 128))
    assert tab_l["exponent"] <= 2.2
    # sampled ratios never exceed the operator norm
    rng = np.random.default_rng(3)
    tab = inverse_inequality_table("legendre", DOM, (8, 16), rng=rng)
    for row in tab["rows"]:
        assert row["sampled_ratio"] <= row["ratio"] * (1 + 1e-12)


# ----------------------------------------------------------------------
# field-error control
# ----------------------------------------------------------------------

def test_field_error_trivial_and_single_mode():
    e = FieldModes(np.zeros(9, dtype=complex))
    assert field_error(e, e) == 0.0
    basis = build_velocity_basis("legendre", DOM, 6)
    op = VlasovRhs(basis, FourierBasis(4), PenaltyConfig(True))
    rng = np.random.default_rng(4)
    s = random_hermitian_state(6, 4, rng)
    eps = 1e-3
    bumped = s.coeff.copy()
    bumped[0, 4 + 1] += eps
    diff = field_error(op.field(s.coeff), op.field(bumped))
    # single-mode perturbation maps through gamma[0, 1] = i sqrt(12)
    assert diff == pytest.approx(math.sqrt(12.0) * eps, rel=1e-10)


def test_field_error_bound_random_pairs():
    rng = np.random.default_rng(5)
    basis = build_velocity_basis("legendre", DOM, 8)
    op = VlasovRhs(basis, FourierBasis(8), PenaltyConfig(True))
    bound = FIELD_ERROR_CONSTANT * math.sqrt(DOM.v_size)
    for _ in range(25):
        a = random_hermitian_state(8, 8, rng)
        b = random_hermitian_state(8, 8, rng)
        lhs = field_error(op.field(a.coeff), op.field(b.coeff))
        assert lhs <= bound * np.linalg.norm(a.coeff - b.coeff)


def test_embedding_and_l2_error():
    rng = np.random.default_rng(6)
    lo = random_hermitian_state(3, 2, rng)
    hi_coeff = embed_coefficients(lo.coeff, Resolution(6, 4))
    assert hi_coeff.shape == (6, 9)
    assert np.max(np.abs(hi_coeff[:3, 2:7] - lo.coeff)) == 0.0
    assert l2_error_between(lo, SpectralState(hi_coeff)) == 0.0
    with pytest.raises(ValueError):
        embed_coefficients(hi_coeff, Resolution(3, 2))
