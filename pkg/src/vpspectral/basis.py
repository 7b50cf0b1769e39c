"""Orthonormal velocity bases and Fourier spatial modes.

Two velocity families are supported:

* ``hermite`` -- symmetrically weighted Hermite functions
  ``phi_n(v) = H_n(v) exp(-v^2/2) / sqrt(2^n n! sqrt(pi))``, orthonormal on
  the whole real line.  Streaming/derivative/moment tables come from the
  closed three-term recursions and are exact.
* ``legendre`` -- Legendre polynomials affinely mapped to ``[v_min, v_max]``
  and normalized to unit L2 norm there.  Tables are computed with Gauss
  quadrature, which is exact for these polynomial integrands.

Spatial modes are ``eta_k(x) = exp(ikx)/sqrt(2 pi)`` on ``[0, 2 pi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .state import SpectralState, enforce_hermitian

TWO_PI = 2.0 * math.pi
INV_SQRT_2PI = 1.0 / math.sqrt(TWO_PI)

HERMITE = "hermite"
LEGENDRE = "legendre"
BASIS_KINDS = (HERMITE, LEGENDRE)


class ConfigurationError(ValueError):
    """Raised for inconsistent domain/basis/penalty configurations."""


@dataclass(frozen=True)
class Domain:
    """Phase-space domain: x on [0, 2*pi), v on (v_min, v_max) or all of R.

    ``v_unbounded=True`` selects the Hermite-on-R mode; ``v_min``/``v_max``
    may then be omitted, or kept to define the weak-boundary interval used
    by the penalty term.
    """

    v_min: Optional[float] = None
    v_max: Optional[float] = None
    v_unbounded: bool = False
    x_period: float = TWO_PI

    def __post_init__(self) -> None:
        if not math.isclose(self.x_period, TWO_PI, rel_tol=0.0, abs_tol=1e-15):
            raise ConfigurationError(f"x_period must be 2*pi, got {self.x_period}")
        if not self.v_unbounded:
            if self.v_min is None or self.v_max is None:
                raise ConfigurationError("bounded velocity domain needs v_min and v_max")
            if not (self.v_min < self.v_max):
                raise ConfigurationError(
                    f"need v_min < v_max, got v_min={self.v_min}, v_max={self.v_max}"
                )
        elif (self.v_min is None) != (self.v_max is None):
            raise ConfigurationError("give both v_min and v_max or neither")
        elif self.v_min is not None and not (self.v_min < self.v_max):
            raise ConfigurationError(
                f"need v_min < v_max, got v_min={self.v_min}, v_max={self.v_max}"
            )

    @property
    def has_interval(self) -> bool:
        return self.v_min is not None and self.v_max is not None

    @property
    def v_size(self) -> float:
        """|Omega_v| = v_max - v_min."""
        if not self.has_interval:
            raise ConfigurationError("unbounded domain has no |Omega_v|")
        return self.v_max - self.v_min

    @property
    def v_ceil(self) -> float:
        """V = max(|v_min|, |v_max|), the advection-speed bound."""
        if self.has_interval:
            return max(abs(self.v_min), abs(self.v_max))
        return math.inf


@dataclass(frozen=True)
class Resolution:
    """Number of velocity modes n_s and Fourier half-width n_f.

    The retained index set is [0, n_s-1] x [-n_f, n_f], i.e.
    n_s * (2*n_f + 1) modes in total.
    """

    n_s: int
    n_f: int

    def __post_init__(self) -> None:
        if self.n_s < 1 or self.n_f < 1:
            raise ConfigurationError(f"n_s and n_f must be >= 1, got {self.n_s}, {self.n_f}")

    @property
    def n_modes(self) -> int:
        return self.n_s * (2 * self.n_f + 1)

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(-self.n_f, self.n_f + 1)


# ----------------------------------------------------------------------
# pointwise evaluation (upward recursions in normalized form)
# ----------------------------------------------------------------------

def hermite_function_values(n_max: int, v: np.ndarray) -> np.ndarray:
    """phi_0..phi_{n_max-1} at the points v, shape (n_max, len(v))."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.zeros((n_max, v.size))
    out[0] = np.exp(-0.5 * v * v) / math.pi ** 0.25
    if n_max > 1:
        out[1] = math.sqrt(2.0) * v * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * v * out[n] - math.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def hermite_function_derivatives(n_max: int, v: np.ndarray) -> np.ndarray:
    """d(phi_n)/dv via phi_n' = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    phi = hermite_function_values(n_max + 1, v)
    out = np.zeros((n_max, v.size))
    for n in range(n_max):
        out[n] = -math.sqrt((n + 1) / 2.0) * phi[n + 1]
        if n > 0:
            out[n] += math.sqrt(n / 2.0) * phi[n - 1]
    return out


def _legendre_xi(domain: Domain, v: np.ndarray) -> tuple[np.ndarray, float]:
    a, b = domain.v_min, domain.v_max
    return (2.0 * v - (a + b)) / (b - a), 2.0 / (b - a)


def legendre_values(n_max: int, domain: Domain, v: np.ndarray) -> np.ndarray:
    """Normalized mapped Legendre phi_0..phi_{n_max-1} at v."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    xi, _ = _legendre_xi(domain, v)
    p = np.zeros((n_max, v.size))
    p[0] = 1.0
    if n_max > 1:
        p[1] = xi
    for n in range(1, n_max - 1):
        p[n + 1] = ((2 * n + 1) * xi * p[n] - n * p[n - 1]) / (n + 1)
    norm = np.sqrt((2.0 * np.arange(n_max) + 1.0) / domain.v_size)
    return norm[:, None] * p


def legendre_derivatives(n_max: int, domain: Domain, v: np.ndarray) -> np.ndarray:
    """d(phi_n)/dv using P'_{n+1} = P'_{n-1} + (2n+1) P_n."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    xi, dxi = _legendre_xi(domain, v)
    p = np.zeros((n_max, v.size))
    dp = np.zeros((n_max, v.size))
    p[0] = 1.0
    if n_max > 1:
        p[1] = xi
        dp[1] = 1.0
    for n in range(1, n_max - 1):
        p[n + 1] = ((2 * n + 1) * xi * p[n] - n * p[n - 1]) / (n + 1)
        dp[n + 1] = dp[n - 1] + (2 * n + 1) * p[n]
    norm = np.sqrt((2.0 * np.arange(n_max) + 1.0) / domain.v_size)
    return norm[:, None] * dp * dxi


# ----------------------------------------------------------------------
# quadrature rules
# ----------------------------------------------------------------------

@lru_cache(maxsize=64)
def _hermgauss_effective(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Hermite rule recast for plain dv integration: the effective
    # weight w_i * exp(x_i^2) equals the reciprocal Christoffel sum
    # 1 / sum_k phi_k(x_i)^2 over the orthonormal Hermite functions, which
    # is overflow-free at any order (unlike forming w and exp(x^2) apart)
    from scipy.special import roots_hermite

    x, _ = roots_hermite(n)
    phi = hermite_function_values(n, x)
    return x, 1.0 / np.sum(phi * phi, axis=0)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def velocity_quadrature(kind: str, domain: Domain, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for integrals over the basis's natural velocity domain."""
    if kind == HERMITE:
        return _hermgauss_effective(n_nodes)
    x, w = _leggauss(n_nodes)
    a, b = domain.v_min, domain.v_max
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def x_quadrature(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform periodic rule on [0, 2*pi); exact for modes |k| < n_nodes."""
    nodes = np.arange(n_nodes) * (TWO_PI / n_nodes)
    return nodes, np.full(n_nodes, TWO_PI / n_nodes)


# ----------------------------------------------------------------------
# velocity basis with precomputed operator tables
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class VelocityBasis:
    """Orthonormal velocity family with its operator tables.

    All tables refer to the basis's natural domain (the real line for
    Hermite, [v_min, v_max] for Legendre):

    * ``vmul``    -- V[n, m] = int v phi_n phi_m dv (symmetric tridiagonal)
    * ``deriv``   -- D[n, m] = int phi_n phi_m' dv
    * ``moments`` -- m[n] = int phi_n dv
    * ``moment1``/``moment2`` -- int v phi_n dv and int v^2 phi_n dv
    * ``boundary_bot``/``boundary_top`` -- phi_n at v_min / v_max (zeros if
      no interval is configured)
    """

    kind: str
    domain: Domain
    n_s: int
    vmul: np.ndarray
    deriv: np.ndarray
    moments: np.ndarray
    moment1: np.ndarray
    moment2: np.ndarray
    boundary_bot: np.ndarray
    boundary_top: np.ndarray
    quad_v: np.ndarray = field(repr=False)
    quad_w: np.ndarray = field(repr=False)

    def eval(self, v: np.ndarray) -> np.ndarray:
        if self.kind == HERMITE:
            return hermite_function_values(self.n_s, v)
        return legendre_values(self.n_s, self.domain, v)

    def eval_deriv(self, v: np.ndarray) -> np.ndarray:
        if self.kind == HERMITE:
            return hermite_function_derivatives(self.n_s, v)
        return legendre_derivatives(self.n_s, self.domain, v)

    def deriv_map_full(self) -> np.ndarray:
        """Coefficient map of d/dv into the smallest containing span.

        Hermite: shape (n_s+1, n_s), the derivative leaks one mode up.
        Legendre: shape (n_s, n_s), polynomials are closed under d/dv.
        Used for exact Sobolev norms and inverse-inequality ratios.
        """
        if self.kind == HERMITE:
            g = np.zeros((self.n_s + 1, self.n_s))
            for n in range(self.n_s):
                g[n + 1, n] = -math.sqrt((n + 1) / 2.0)
                if n > 0:
                    g[n - 1, n] = math.sqrt(n / 2.0)
            return g
        return self.deriv.copy()


def _hermite_moments(n_s: int) -> np.ndarray:
    # m_{n+1} = sqrt(n/(n+1)) m_{n-1}, m_0 = sqrt(2) pi^(1/4), odd are 0
    m = np.zeros(n_s)
    m[0] = math.sqrt(2.0) * math.pi ** 0.25
    for n in range(2, n_s, 2):
        m[n] = math.sqrt((n - 1) / n) * m[n - 2]
    return m


def build_velocity_basis(kind: str, domain: Domain, n_s: int) -> VelocityBasis:
    """Construct a velocity basis and fill all operator tables.

    Raises :class:`ConfigurationError` for Legendre on an unbounded domain.
    """
    if kind not in BASIS_KINDS:
        raise ConfigurationError(f"unknown basis kind {kind!r}; choose from {BASIS_KINDS}")
    if n_s < 1:
        raise ConfigurationError(f"n_s must be >= 1, got {n_s}")
    if kind == LEGENDRE and (domain.v_unbounded or not domain.has_interval):
        raise ConfigurationError("Legendre basis requires a bounded velocity domain")

    if kind == HERMITE:
        qv, qw = velocity_quadrature(kind, domain, 2 * n_s + 8)
        vmul = np.zeros((n_s, n_s))
        deriv = np.zeros((n_s, n_s))
        for n in range(n_s - 1):
            c = math.sqrt((n + 1) / 2.0)
            vmul[n, n + 1] = vmul[n + 1, n] = c
            deriv[n, n + 1] = c
            deriv[n + 1, n] = -c
        moments = _hermite_moments(n_s)
        phi_q = hermite_function_values(n_s, qv)
    else:
        qv, qw = velocity_quadrature(kind, domain, 2 * n_s + 8)
        phi_q = legendre_values(n_s, domain, qv)
        dphi_q = legendre_derivatives(n_s, domain, qv)
        vmul = (phi_q * qw) @ (qv * phi_q).T
        vmul = 0.5 * (vmul + vmul.T)
        deriv = (phi_q * qw) @ dphi_q.T
        moments = np.zeros(n_s)
        moments[0] = math.sqrt(domain.v_size)

    if kind == HERMITE:
        # v phi_n and v^2 phi_n expand exactly through the recursion, so the
        # first two v-moments reduce to the plain moment table (the direct
        # integrands decay like exp(-v^2/2), too slowly for the quadrature)
        m_ext = _hermite_moments(n_s + 2)
        n_idx = np.arange(n_s, dtype=float)
        m_lo1 = np.concatenate([[0.0], m_ext[:n_s - 1]]) if n_s > 1 else np.zeros(1)
        m_lo2 = np.concatenate([[0.0, 0.0], m_ext[:n_s - 2]]) if n_s > 2 else np.zeros(n_s)
        moment1 = np.sqrt((n_idx + 1) / 2.0) * m_ext[1:n_s + 1] + np.sqrt(n_idx / 2.0) * m_lo1
        moment2 = (np.sqrt((n_idx + 1) * (n_idx + 2)) / 2.0 * m_ext[2:n_s + 2]
                   + (n_idx + 0.5) * m_ext[:n_s]
                   + np.sqrt(n_idx * np.maximum(n_idx - 1.0, 0.0)) / 2.0 * m_lo2)
    else:
        moment1 = (phi_q * qw) @ qv
        moment2 = (phi_q * qw) @ (qv * qv)

    if domain.has_interval:
        if kind == HERMITE:
            bot = hermite_function_values(n_s, np.array([domain.v_min]))[:, 0]
            top = hermite_function_values(n_s, np.array([domain.v_max]))[:, 0]
        else:
            bot = legendre_values(n_s, domain, np.array([domain.v_min]))[:, 0]
            top = legendre_values(n_s, domain, np.array([domain.v_max]))[:, 0]
    else:
        bot = np.zeros(n_s)
        top = np.zeros(n_s)

    return VelocityBasis(kind=kind, domain=domain, n_s=n_s, vmul=vmul, deriv=deriv,
                         moments=moments, moment1=moment1, moment2=moment2,
                         boundary_bot=bot, boundary_top=top, quad_v=qv, quad_w=qw)


def vmul_coefficients(basis: VelocityBasis) -> np.ndarray:
    """Streaming table V[n, m] = int v phi_n phi_m dv."""
    return basis.vmul


def deriv_coefficients(basis: VelocityBasis) -> np.ndarray:
    """Derivative table D[n, m] = int phi_n phi_m' dv."""
    return basis.deriv


# ----------------------------------------------------------------------
# Fourier modes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FourierBasis:
    """Modes eta_k(x) = exp(ikx)/sqrt(2 pi) for k in [-n_f, n_f]."""

    n_f: int

    def __post_init__(self) -> None:
        if self.n_f < 1:
            raise ConfigurationError(f"n_f must be >= 1, got {self.n_f}")

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(-self.n_f, self.n_f + 1)

    def eval(self, x: np.ndarray) -> np.ndarray:
        """eta_k at the points x, shape (2*n_f+1, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.exp(1j * np.outer(self.k_values, x)) * INV_SQRT_2PI

    def x_nodes(self, n_nodes: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
        return x_quadrature(n_nodes if n_nodes is not None else 4 * self.n_f + 9)


# ----------------------------------------------------------------------
# initial projection
# ----------------------------------------------------------------------

def project_initial(f0: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    basis: VelocityBasis, fourier: FourierBasis) -> SpectralState:
    """Project f0(x, v) onto the retained modes by tensorized quadrature.

    C[n, k] = int f0 phi_n eta_{-k} dv dx with the periodic rule in x and
    the basis's Gauss rule in v.  Hermitian symmetry (reality) is enforced
    exactly on the result.
    """
    xq, xw = fourier.x_nodes()
    vq, vw = basis.quad_v, basis.quad_w
    xx, vv = np.meshgrid(xq, vq, indexing="ij")
    samples = np.asarray(f0(xx, vv), dtype=float)
    if not np.all(np.isfinite(samples)):
        raise ValueError("initial condition produced non-finite samples")
    phi = basis.eval(vq)                       # (n_s, nv)
    eta_conj = np.conj(fourier.eval(xq))       # (2n_f+1, nx); row j is eta_{-k_j}
    coeff = ((phi * vw) @ samples.T * xw) @ eta_conj.T
    return SpectralState(enforce_hermitian(coeff), 0.0)
