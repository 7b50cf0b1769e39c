"""Spectral Vlasov-Poisson solver (Fourier in x, Hermite/Legendre in v)."""

from .basis import (
    BASIS_KINDS,
    HERMITE,
    LEGENDRE,
    ConfigurationError,
    Domain,
    FourierBasis,
    Resolution,
    VelocityBasis,
    build_velocity_basis,
    deriv_coefficients,
    project_initial,
    vmul_coefficients,
)
from .config import ConfigError, RunConfig, builtin_initial_conditions, parse_config
from .diagnostics import (
    DiagnosticsRecord,
    FIELD_ERROR_CONSTANT,
    compute_record,
    field_error,
    l2_error_between,
    l2_norm_sq,
    project_exact,
    write_diagnostics_csv,
)
from .integrator import BlowUpError, CflWarning, TimeGrid, run, step_rk4
from .poisson import (
    FieldModes,
    GammaTable,
    field_from_state,
    field_values,
    gamma_table,
    kernel_norms,
    kernel_truncated,
)
from .rhs import PenaltyConfig, VlasovRhs, assemble_tensors_oracle, rhs_from_tensors
from .state import SpectralState, enforce_hermitian, hermitian_residual, reconstruct

__all__ = [
    "BASIS_KINDS", "HERMITE", "LEGENDRE", "ConfigurationError", "Domain",
    "FourierBasis", "Resolution", "VelocityBasis", "build_velocity_basis",
    "deriv_coefficients", "project_initial", "vmul_coefficients",
    "ConfigError", "RunConfig", "builtin_initial_conditions", "parse_config",
    "DiagnosticsRecord", "FIELD_ERROR_CONSTANT", "compute_record", "field_error",
    "l2_error_between", "l2_norm_sq", "project_exact", "write_diagnostics_csv",
    "BlowUpError", "CflWarning", "TimeGrid", "run", "step_rk4",
    "FieldModes", "GammaTable", "field_from_state", "field_values", "gamma_table",
    "kernel_norms", "kernel_truncated",
    "PenaltyConfig", "VlasovRhs", "assemble_tensors_oracle", "rhs_from_tensors",
    "SpectralState", "enforce_hermitian", "hermitian_residual", "reconstruct",
]
