"""Spectral coefficient state shared by all solver components.

The distribution function is represented by a complex coefficient array
``C[n, j]`` where ``n`` indexes the velocity mode and ``j = k + n_f`` the
Fourier mode ``k`` in ``[-n_f, n_f]``.  Reality of the distribution is the
Hermitian symmetry ``C[n, -k] == conj(C[n, k])``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SpectralState:
    """Coefficient array plus time stamp.

    ``coeff`` has shape ``(n_s, 2 * n_f + 1)``; column ``j`` holds the
    Fourier mode ``k = j - n_f``.
    """

    coeff: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.coeff = np.asarray(self.coeff, dtype=np.complex128)
        if self.coeff.ndim != 2 or self.coeff.shape[1] % 2 != 1:
            raise ValueError(
                f"coefficient array must be (n_s, 2*n_f+1), got {self.coeff.shape}"
            )

    @property
    def n_s(self) -> int:
        return self.coeff.shape[0]

    @property
    def n_f(self) -> int:
        return (self.coeff.shape[1] - 1) // 2

    def copy(self) -> "SpectralState":
        return SpectralState(self.coeff.copy(), self.t)


def hermitian_residual(coeff: np.ndarray) -> float:
    """Max deviation from C[n, -k] == conj(C[n, k])."""
    return float(np.max(np.abs(coeff - np.conj(coeff[:, ::-1]))))


def enforce_hermitian(coeff: np.ndarray) -> np.ndarray:
    """Return the Hermitian-symmetric part of a coefficient array.

    The k and -k columns are averaged against each other's conjugate, so
    the result satisfies the symmetry exactly (the k = 0 column becomes
    real).  Idempotent.
    """
    return 0.5 * (coeff + np.conj(coeff[:, ::-1]))


def random_hermitian_state(n_s: int, n_f: int, rng: np.random.Generator,
                           scale: float = 1.0, t: float = 0.0) -> SpectralState:
    """Random state with exact Hermitian symmetry (a real-valued f)."""
    raw = rng.standard_normal((n_s, 2 * n_f + 1)) + 1j * rng.standard_normal((n_s, 2 * n_f + 1))
    return SpectralState(scale * enforce_hermitian(raw), t)


def reconstruct(coeff: np.ndarray, basis, fourier, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Evaluate sum_{n,k} C[n,k] phi_n(v) eta_k(x) on the grid x cross v.

    Returns a complex array of shape ``(len(x), len(v))``; for
    Hermitian-symmetric coefficients the imaginary part is roundoff.
    """
    phi = basis.eval(np.asarray(v, dtype=float))        # (n_s, nv)
    eta = fourier.eval(np.asarray(x, dtype=float))      # (2n_f+1, nx)
    return (eta.T @ coeff.T) @ phi                      # (nx, nv)
