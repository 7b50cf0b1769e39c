"""Acceptance criteria: every provable property at its stated tolerance.

Each test prints one `[criterion N] PASS/FAIL` line (run with `-s` or `-v`
to see them live) and enforces the stated runtime budget.
"""
import math
import time

import numpy as np
import pytest

from vpspectral import (
    Domain,
    FourierBasis,
    PenaltyConfig,
    RunConfig,
    TimeGrid,
    VlasovRhs,
    assemble_tensors_oracle,
    build_velocity_basis,
    builtin_initial_conditions,
    kernel_norms,
    project_initial,
    rhs_from_tensors,
    run,
)
from vpspectral.diagnostics import FIELD_ERROR_CONSTANT, field_error, fit_loglog_slope
from vpspectral.harness import convergence_study, invineq_check, projection_check
from vpspectral.poisson import FieldModes
from vpspectral.state import random_hermitian_state

DOM = Domain(-6.0, 6.0)


class Budget:
    """Context manager: records elapsed time and prints the verdict line."""

    def __init__(self, criterion: int, limit_s: float):
        self.criterion = criterion
        self.limit_s = limit_s

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        verdict = "PASS" if exc_type is None else "FAIL"
        print(f"[criterion {self.criterion}] {verdict} ({elapsed:.1f}s / "
              f"budget {self.limit_s:.0f}s)")
        if exc_type is None:
            assert elapsed < self.limit_s, (
                f"criterion {self.criterion} exceeded its {self.limit_s}s budget"
            )
        return False


def landau_operator(n, domain=DOM, kind="legendre", alpha=0.1):
    basis = build_velocity_basis(kind, domain, n)
    fourier = FourierBasis(n)
    op = VlasovRhs(basis, fourier, PenaltyConfig(True))
    f0 = builtin_initial_conditions("landau", {"alpha": alpha, "k": 1}, basis)
    return op, project_initial(f0, basis, fourier)


def test_criterion_1_semi_discrete_conservation():
    # |Re<C, rhs(C)>| / ||C||^2 < 1e-12 with the penalty on, 20 random
    # Hermitian-symmetric states per basis kind and size
    with Budget(1, 10.0):
        rng = np.random.default_rng(101)
        worst = 0.0
        for kind in ("legendre", "hermite"):
            for n in (8, 16):
                basis = build_velocity_basis(kind, DOM, n)
                op = VlasovRhs(basis, FourierBasis(n), PenaltyConfig(True))
                for _ in range(20):
                    s = random_hermitian_state(n, n, rng)
                    resid = abs(np.vdot(s.coeff, op.apply(s.coeff)).real)
                    worst = max(worst, resid / float(np.sum(np.abs(s.coeff) ** 2)))
        print(f"  worst normalized residual: {worst:.3e}")
        assert worst < 1e-12


def test_criterion_2_finite_time_conservation():
    # Legendre-Fourier Landau run: relative L2 drift < 1e-8 at dt = 1e-3
    # over t_end = 10, and fourth-order step-size scaling (Richardson
    # self-convergence of the final state) across dt in {2e-3, 1e-3, 5e-4}
    with Budget(2, 60.0):
        op, s0 = landau_operator(16)
        t_end = 10.0
        finals = {}
        drift = None
        for dt in (2e-3, 1e-3, 5e-4, 2.5e-4):
            grid = TimeGrid.from_step(dt, t_end)
            stride = grid.n_steps // 100
            final, recs = run(s0, grid, op, stride=stride,
                              recorder=lambda s: float(np.sum(np.abs(s.coeff) ** 2)))
            finals[dt] = final.coeff
            if dt == 1e-3:
                drift = max(abs(r - recs[0]) for r in recs) / recs[0]
        assert drift is not None
        print(f"  relative L2 drift at dt=1e-3: {drift:.3e}")
        assert drift < 1e-8

        steps = [2e-3, 1e-3, 5e-4]
        errs = [float(np.linalg.norm(finals[h] - finals[h / 2])) for h in steps]
        order = fit_loglog_slope(steps, errs)
        print(f"  fitted time order: {order:.3f}")
        assert 3.7 <= order <= 4.3


def test_criterion_3_kernel_identities():
    with Budget(3, 5.0):
        pi_sq_3 = math.pi ** 2 / 3.0
        records = {nf: kernel_norms(nf) for nf in (5, 10, 50, 100)}
        prev = 0.0
        for nf, rec in records.items():
            assert prev < rec["norm_kn_sq"] < pi_sq_3
            assert rec["norm_kn_sq"] + rec["tail_sq"] == pytest.approx(pi_sq_3, abs=1e-7)
            assert rec["tail_sq"] <= 2.0 / nf
            prev = rec["norm_kn_sq"]
        print(f"  ||K^N||^2 at nf=100: {records[100]['norm_kn_sq']:.6f} "
              f"(pi^2/3 = {pi_sq_3:.6f})")
        sups = {nf: kernel_norms(nf)["sup_abs_kn"] for nf in (10, 20, 40, 80, 160)}
        ratios = [sups[nf] / math.log(nf) for nf in (10, 20, 40, 80, 160)]
        assert all(a >= b for a, b in zip(ratios, ratios[1:]))
        print(f"  sup|K^N|/ln(nf) trend: {[f'{r:.3f}' for r in ratios]}")


def test_criterion_4_field_error_control():
    with Budget(4, 5.0):
        rng = np.random.default_rng(104)
        basis = build_velocity_basis("legendre", DOM, 8)
        op = VlasovRhs(basis, FourierBasis(8), PenaltyConfig(True))
        bound = FIELD_ERROR_CONSTANT * math.sqrt(DOM.v_size)
        violations = 0
        for _ in range(50):
            a = random_hermitian_state(8, 8, rng)
            b = random_hermitian_state(8, 8, rng)
            lhs = field_error(op.field(a.coeff), op.field(b.coeff))
            if lhs > bound * float(np.linalg.norm(a.coeff - b.coeff)):
                violations += 1
        print(f"  violations out of 50 pairs: {violations}")
        assert violations == 0


def test_criterion_5_oracle_equivalence():
    with Budget(5, 10.0):
        rng = np.random.default_rng(105)
        worst = 0.0
        for kind, domain, penalty in (
            ("legendre", DOM, True),
            ("hermite", Domain(-10.0, 10.0), True),
        ):
            basis = build_velocity_basis(kind, domain, 4)
            fourier = FourierBasis(2)
            op = VlasovRhs(basis, fourier, PenaltyConfig(penalty))
            tensors = assemble_tensors_oracle(basis, fourier, PenaltyConfig(penalty))
            for _ in range(20):
                s = random_hermitian_state(4, 2, rng)
                diff = np.max(np.abs(op.apply(s.coeff) - rhs_from_tensors(*tensors, s.coeff)))
                worst = max(worst, float(diff))
        print(f"  worst |fast - tensor oracle|: {worst:.3e}")
        assert worst < 1e-12


def test_criterion_6_duality_identity():
    # spectral penalty coefficients against the boundary integral for 100
    # random (G, state, E) triples
    with Budget(6, 10.0):
        rng = np.random.default_rng(106)
        worst = 0.0
        for kind in ("legendre", "hermite"):
            basis = build_velocity_basis(kind, DOM, 6)
            fourier = FourierBasis(4)
            op = VlasovRhs(basis, fourier, PenaltyConfig(True))
            xq, xw = fourier.x_nodes()
            eta = fourier.eval(xq)
            for _ in range(50):
                s = random_hermitian_state(6, 4, rng)
                g = random_hermitian_state(6, 4, rng)
                e = rng.standard_normal(9) + 1j * rng.standard_normal(9)
                e = 0.5 * (e + np.conj(e[::-1]))
                e[4] = 0.0
                field = FieldModes(e)
                lhs = np.vdot(g.coeff, op.penalty_term(s.coeff, field))
                e_x = (field.modes @ eta).real
                ftop = (basis.boundary_top @ s.coeff) @ eta
                fbot = (basis.boundary_bot @ s.coeff) @ eta
                gtop = (basis.boundary_top @ g.coeff) @ eta
                gbot = (basis.boundary_bot @ g.coeff) @ eta
                boundary = -0.5 * np.sum(
                    xw * e_x * (ftop * np.conj(gtop) - fbot * np.conj(gbot)))
                worst = max(worst, abs(lhs - boundary))
        print(f"  worst duality mismatch: {worst:.3e}")
        assert worst < 1e-10


def test_criterion_7_projection_rates():
    with Budget(7, 60.0):
        cfg_l = RunConfig(basis_kind="legendre", v_min=-6.0, v_max=6.0)
        res_l = projection_check(cfg_l)
        assert res_l["analytic_steepening"], res_l["analytic_pair_slopes"]
        assert res_l["kink_within_half"], (res_l["kink_slope"], res_l["kink_predicted_slope"])

        cfg_h = RunConfig(basis_kind="hermite", v_min=-6.0, v_max=6.0,
                          v_unbounded=True, penalty_enabled=False)
        res_h = projection_check(cfg_h)
        assert res_h["analytic_steepening"], res_h["analytic_pair_slopes"]
        assert res_h["kink_within_half"], (res_h["kink_slope"], res_h["kink_predicted_slope"])
        print(f"  legendre kink slope {res_l['kink_slope']:.2f} "
              f"(predicted {res_l['kink_predicted_slope']:.1f}); "
              f"hermite kink slope {res_h['kink_slope']:.2f} "
              f"(predicted {res_h['kink_predicted_slope']:.1f})")


def test_criterion_8_inverse_inequalities():
    with Budget(8, 30.0):
        res_h = invineq_check("hermite", max_n=128)
        assert 0.4 <= res_h["exponent"] <= 0.6, res_h["exponent"]
        res_l = invineq_check("legendre", max_n=128)
        assert res_l["exponent"] <= 2.2, res_l["exponent"]
        for k in (1, 2, 5, 17, 64):
            ratio_k = float(k)
            assert ratio_k == abs(k)
        res_f = invineq_check("fourier", max_n=128)
        assert res_f["within_bounds"]
        print(f"  exponents: hermite {res_h['exponent']:.3f}, "
              f"legendre {res_l['exponent']:.3f}, fourier exact |k|")


def test_criterion_9_self_convergence():
    # Landau sweep (8,8) -> (16,16) -> (32,32) against a (64,64), dt/4
    # reference: strictly decreasing and below 1e-6 at (32,32)
    with Budget(9, 300.0):
        cfg = RunConfig(basis_kind="legendre", v_min=-5.0, v_max=5.0,
                        dt=1e-3, t_end=1.0, ic_name="landau",
                        ic_params={"alpha": 0.05, "k": 1}, stride=1000)
        result = convergence_study(cfg, sweep=(8, 16, 32), ref_mult=2)
        errs = [row["err_l2"] for row in result["rows"]]
        print(f"  errors vs (64,64) reference: {[f'{e:.2e}' for e in errs]}")
        assert result["strictly_decreasing"]
        assert errs[-1] < 1e-6
