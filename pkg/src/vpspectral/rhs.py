"""Right-hand side of the truncated spectral Vlasov system.

With coefficients tested against the conjugate Fourier modes, the retained
modes evolve as

    dC[n,k]/dt = -i k (V C)[n,k]                                (streaming)
                 + (2 pi)^(-1/2) sum_k' E_k' (D C)[n, k-k']     (field)
                 + R[n,k]                                       (boundary penalty)

where V and D are the velocity multiplication/derivative tables and the
penalty weakly enforces zero traces at v_min and v_max:

    R[n,k] = -1/2 (2 pi)^(-1/2) sum_k' E_k' ( top_n ftop[k-k']
                                            - bot_n fbot[k-k'] ),
    ftop[k] = sum_n top_n C[n,k]   (and fbot analogously).

Out-of-range mode sums are truncated, which is exactly the projection onto
the retained space.  When the penalty is on, the derivative table is
symmetrized so that D + D^T equals the boundary outer-product matrix
exactly in floating point; that pins the semi-discrete identity
Re<C, rhs(C)> = 0 (L2 conservation) to roundoff.

A dense-tensor assembly of the same operators by direct quadrature of the
defining integrals is provided as a test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (
    INV_SQRT_2PI,
    ConfigurationError,
    FourierBasis,
    Resolution,
    VelocityBasis,
)
from .poisson import FieldModes, gamma_table
from .state import SpectralState

ORACLE_MODE_GUARD = 64


@dataclass(frozen=True)
class PenaltyConfig:
    """Whether the weak-boundary penalty term is applied."""

    enabled: bool = True


def default_penalty(basis: VelocityBasis) -> PenaltyConfig:
    """Penalty on except for Hermite on the unbounded domain."""
    return PenaltyConfig(enabled=not (basis.kind == "hermite" and basis.domain.v_unbounded))


class VlasovRhs:
    """Precomputed spectral operator; evaluation is pure and reusable.

    Instances are immutable after construction and never mutate the
    coefficient arrays handed to them.
    """

    def __init__(self, basis: VelocityBasis, fourier: FourierBasis,
                 penalty: PenaltyConfig | None = None):
        self.basis = basis
        self.fourier = fourier
        self.resolution = Resolution(basis.n_s, fourier.n_f)
        self.penalty = penalty if penalty is not None else default_penalty(basis)
        if self.penalty.enabled and not basis.domain.has_interval:
            raise ConfigurationError(
                "penalty requires a boundary interval: configure v_min/v_max"
            )
        self.gamma = gamma_table(basis, self.resolution)

        n_f = fourier.n_f
        self._ik = 1j * np.arange(-n_f, n_f + 1, dtype=float)
        self._vmul = basis.vmul.astype(np.complex128)
        self._top = basis.boundary_top.copy()
        self._bot = basis.boundary_bot.copy()
        if self.penalty.enabled:
            # exact-IBP symmetrization: sym part of D pinned to the boundary
            # outer products so the conservation identity holds to roundoff
            skew = 0.5 * (basis.deriv - basis.deriv.T)
            sym = 0.5 * (np.outer(self._top, self._top) - np.outer(self._bot, self._bot))
            self._deriv = (skew + sym).astype(np.complex128)
        else:
            self._deriv = basis.deriv.astype(np.complex128)

        j = np.arange(2 * n_f + 1)
        diff = j[None, :] - j[:, None]          # k_out - k_in
        self._conv_valid = np.abs(diff) <= n_f
        self._conv_idx = np.where(self._conv_valid, diff + n_f, 0)

    # -- parts ---------------------------------------------------------

    def field(self, coeff: np.ndarray) -> FieldModes:
        modes = np.sum(self.gamma.gamma * coeff, axis=0)
        modes[self.fourier.n_f] = 0.0
        return FieldModes(modes)

    def _conv_matrix(self, field: FieldModes) -> np.ndarray:
        # M[j_in, j_out] = E_{k_out - k_in}, zero where the shift leaves
        # the retained range (the projection truncation)
        return np.where(self._conv_valid, field.modes[self._conv_idx], 0.0)

    def streaming_term(self, coeff: np.ndarray) -> np.ndarray:
        """Contribution of -v df/dx."""
        return -(self._vmul @ coeff) * self._ik

    def field_term(self, coeff: np.ndarray, field: FieldModes) -> np.ndarray:
        """Contribution of +E df/dv."""
        return INV_SQRT_2PI * ((self._deriv @ coeff) @ self._conv_matrix(field))

    def penalty_term(self, coeff: np.ndarray, field: FieldModes) -> np.ndarray:
        """Weak-boundary term; exactly zero when disabled."""
        if not self.penalty.enabled:
            return np.zeros_like(coeff)
        conv = self._conv_matrix(field)
        ftop = (self._top @ coeff) @ conv
        fbot = (self._bot @ coeff) @ conv
        return -0.5 * INV_SQRT_2PI * (np.outer(self._top, ftop) - np.outer(self._bot, fbot))

    def apply(self, coeff: np.ndarray) -> np.ndarray:
        """dC/dt for a coefficient array."""
        field = self.field(coeff)
        out = self.streaming_term(coeff)
        out += self.field_term(coeff, field)
        if self.penalty.enabled:
            out += self.penalty_term(coeff, field)
        return out

    def rhs(self, state: SpectralState) -> np.ndarray:
        if state.coeff.shape != (self.resolution.n_s, 2 * self.resolution.n_f + 1):
            raise ValueError(f"state shape {state.coeff.shape} does not match operator")
        return self.apply(state.coeff)

    __call__ = rhs


# ----------------------------------------------------------------------
# dense-tensor oracle (tests only)
# ----------------------------------------------------------------------

def assemble_tensors_oracle(basis: VelocityBasis, fourier: FourierBasis,
                            penalty: PenaltyConfig | None = None):
    """Dense (A, B, Btilde) by direct quadrature of the defining integrals.

    Index convention matches the fast path (conjugate testing), so the
    linear tensor is diagonal in the Fourier index:

    * ``A[n,j,m,l]``       from int phi_n eta_{-k_j} v d/dx(phi_m eta_{k_l})
    * ``B[n,j,a,l,s,m]``   from -int phi_n eta_{-k_j} Ehat_{a,l} d/dv(phi_s eta_{k_m})
    * ``Bt[n,j,a,l,s,m]``  the penalty tensor, from the boundary-trace
      integral with g = phi_n eta_{-k_j}

    and the truncated system reads dC/dt = -A.C - (B - Bt):CC.
    Refuses resolutions above the oracle guard.
    """
    resolution = Resolution(basis.n_s, fourier.n_f)
    if resolution.n_modes > ORACLE_MODE_GUARD:
        raise ValueError(
            f"oracle limited to {ORACLE_MODE_GUARD} modes, got {resolution.n_modes}"
        )
    penalty = penalty if penalty is not None else default_penalty(basis)
    gamma = gamma_table(basis, resolution).gamma

    xq, xw = fourier.x_nodes()
    vq, vw = basis.quad_v, basis.quad_w
    phi = basis.eval(vq)
    dphi = basis.eval_deriv(vq)
    eta = fourier.eval(xq)                  # eta[l, x] = eta_{k_l}(x)
    eta_c = np.conj(eta)                    # eta_{-k_j}(x)
    ik = 1j * np.arange(-fourier.n_f, fourier.n_f + 1, dtype=float)

    vmat = np.einsum("nv,mv,v->nm", phi, phi, vw * vq)
    x2 = np.einsum("jx,lx,x->jl", eta_c, eta, xw)
    a_tensor = np.einsum("nm,jl,l->njml", vmat, x2, ik)

    dmat = np.einsum("nv,sv,v->ns", phi, dphi, vw)
    x3 = np.einsum("jx,lx,mx,x->jlm", eta_c, eta, eta, xw)
    # Ehat_{a,l}(x) = gamma[a,l] eta_{k_l}(x); d/dv contributes dmat
    b_tensor = -np.einsum("ns,al,jlm->njalsm", dmat, gamma, x3)

    if penalty.enabled:
        if not basis.domain.has_interval:
            raise ConfigurationError("penalty oracle needs a boundary interval")
        top, bot = basis.boundary_top, basis.boundary_bot
        trace = np.einsum("n,a->na", top, top) - np.einsum("n,a->na", bot, bot)
        bt_tensor = -0.5 * np.einsum("na,sm,jlm->njalsm", trace, gamma, x3)
    else:
        bt_tensor = np.zeros_like(b_tensor)
    return a_tensor, b_tensor, bt_tensor


def rhs_from_tensors(a_tensor: np.ndarray, b_tensor: np.ndarray,
                     bt_tensor: np.ndarray, coeff: np.ndarray) -> np.ndarray:
    """dC/dt = -A.C - (B - Bt):CC, the oracle-side evaluation."""
    lin = np.einsum("njml,ml->nj", a_tensor, coeff)
    quad = np.einsum("njalsm,al,sm->nj", b_tensor - bt_tensor, coeff, coeff)
    return -lin - quad
