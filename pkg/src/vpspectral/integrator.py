"""Fixed-step RK4 time advance with drift-friendly determinism.

The scheme is the classical 4-stage Runge-Kutta with a constant step; no
adaptivity, so conservation drift measurements are clean and trajectories
are bitwise reproducible.  A heuristic CFL-style guard warns (never
refuses) when the step looks large for the configured resolution.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import ConfigurationError
from .state import SpectralState


class BlowUpError(RuntimeError):
    """Non-finite state encountered; carries a diagnostic snapshot."""

    def __init__(self, t: float, step: int, max_abs: float):
        super().__init__(
            f"non-finite coefficients at t={t:.6g} (step {step}); max|C| so far {max_abs:.3g}"
        )
        self.t = t
        self.step = step
        self.max_abs = max_abs


class CflWarning(UserWarning):
    pass


DEFAULT_C_CFL = 0.5


def cfl_step_guard(n_s: int, n_f: int, v_ceil: float, c_cfl: float = DEFAULT_C_CFL) -> float:
    """Heuristic stable-step estimate c / (n_f * V + n_s).

    Advection speeds are bounded by V in x and the velocity-derivative
    norms grow like sqrt(n) (Hermite) or faster (Legendre); this is a
    guideline, exceeded steps only warn.
    """
    v = v_ceil if math.isfinite(v_ceil) else math.sqrt(2.0 * n_s + 1.0)
    return c_cfl / (n_f * v + n_s)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform step dt covering [0, t_end] in n_steps steps."""

    dt: float
    t_end: float
    n_steps: int

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ConfigurationError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 0:
            raise ConfigurationError(f"n_steps must be >= 0, got {self.n_steps}")
        if abs(self.n_steps * self.dt - self.t_end) > 1e-12 * max(1.0, abs(self.t_end)):
            raise ConfigurationError(
                f"n_steps*dt = {self.n_steps * self.dt!r} does not reach t_end = {self.t_end!r}"
            )

    @classmethod
    def from_step(cls, dt: float, t_end: float) -> "TimeGrid":
        if dt <= 0.0:
            raise ConfigurationError(f"dt must be > 0, got {dt}")
        if t_end < 0.0:
            raise ConfigurationError(f"t_end must be >= 0, got {t_end}")
        n_steps = int(round(t_end / dt)) if t_end > 0 else 0
        return cls(dt=dt, t_end=t_end, n_steps=n_steps)


def step_rk4(state: SpectralState, rhs: Callable[[np.ndarray], np.ndarray],
             dt: float) -> SpectralState:
    """One classical RK4 step; the input state is left untouched."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    c = state.coeff
    k1 = rhs(c)
    k2 = rhs(c + (0.5 * dt) * k1)
    k3 = rhs(c + (0.5 * dt) * k2)
    k4 = rhs(c + dt * k3)
    new = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(new.view(np.float64))):
        raise BlowUpError(state.t + dt, -1, float(np.max(np.abs(c))))
    return SpectralState(new, state.t + dt)


def run(initial: SpectralState, grid: TimeGrid, operator, stride: int = 1,
        recorder: Optional[Callable[[SpectralState], object]] = None,
        warn_cfl: bool = True):
    """March the state over the grid, recording every `stride` steps.

    `operator` is a VlasovRhs (anything with ``apply``).  Returns
    ``(final_state, records)`` where records come from `recorder` (by
    default the diagnostics snapshot) at step 0, every `stride` steps and
    the final step.  Raises :class:`BlowUpError` on non-finite states.
    """
    from .diagnostics import compute_record  # local import; no cycle at module load

    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if recorder is None:
        recorder = lambda s: compute_record(s, operator)

    if warn_cfl:
        res = operator.resolution
        guard = cfl_step_guard(res.n_s, res.n_f, operator.basis.domain.v_ceil)
        if grid.dt > guard:
            warnings.warn(
                f"dt={grid.dt:.3g} exceeds the step guard {guard:.3g} "
                f"for (n_s={res.n_s}, n_f={res.n_f})",
                CflWarning,
                stacklevel=2,
            )

    state = initial.copy()
    rhs = operator.apply
    records = [recorder(state)]
    for step in range(1, grid.n_steps + 1):
        try:
            state = step_rk4(state, rhs, grid.dt)
        except BlowUpError as err:
            raise BlowUpError(state.t + grid.dt, step, err.max_abs) from None
        if step % stride == 0 or step == grid.n_steps:
            records.append(recorder(state))
    return state, records
