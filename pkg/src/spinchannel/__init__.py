"""Simulator for optical channels dissipatively coupled through an
engineered atomic-spin reservoir: phase-sensitive interference,
non-reciprocal transport, quadrature noise spectra and Gaussian discord."""

__version__ = "0.1.0"

from .config import ConfigError, RunConfig, validate_config
from .dynamics import (
    InstabilityError,
    SpectrumResult,
    TrajectoryEstimate,
    default_spectrum_grid,
    evolve_covariance,
    joint_row,
    lyapunov_residual,
    noise_spectrum,
    quadrature_row,
    steady_state_covariance,
    trajectory_ensemble,
)
from .gaussian import (
    Covariance,
    ModePair,
    UnphysicalCovarianceError,
    ValidityReport,
    entropy_f,
    gaussian_discord,
    is_physical,
    joint_quadrature_variance,
    read_covariance_csv,
    reduce,
    rotate_mode,
    symplectic_eigenvalues,
    symplectic_form,
    validate_covariance,
    write_covariance_csv,
)
from .network import (
    ChannelConfig,
    CoupledModeNetwork,
    DriftDiffusion,
    Edge,
    HurwitzReport,
    Interaction,
    ReservoirConfig,
    build_network,
    drift_diffusion,
    hurwitz_check,
    interaction_type,
    local_spin_phase,
    transferred_probe_phase,
    wrap_phase,
)
from .transport import (
    PhaseSweepResult,
    TransportResult,
    eit_transmission,
    eit_width,
    isolation_db,
    phase_sweep,
    reciprocal_phase,
    transport_matrix,
    transport_spectrum,
    write_phase_sweep_csv,
    write_transport_csv,
)

__all__ = [
    "__version__",
    "ChannelConfig", "ConfigError", "CoupledModeNetwork", "Covariance",
    "DriftDiffusion", "Edge", "HurwitzReport", "InstabilityError",
    "Interaction", "ModePair", "PhaseSweepResult", "ReservoirConfig",
    "RunConfig", "SpectrumResult", "TrajectoryEstimate", "TransportResult",
    "UnphysicalCovarianceError", "ValidityReport",
    "build_network", "default_spectrum_grid", "drift_diffusion",
    "eit_transmission", "eit_width", "entropy_f", "evolve_covariance",
    "gaussian_discord", "hurwitz_check", "interaction_type", "is_physical",
    "isolation_db", "joint_quadrature_variance", "joint_row",
    "local_spin_phase", "lyapunov_residual", "noise_spectrum", "phase_sweep",
    "quadrature_row", "read_covariance_csv", "reciprocal_phase", "reduce",
    "rotate_mode", "steady_state_covariance", "symplectic_eigenvalues",
    "symplectic_form", "trajectory_ensemble", "transferred_probe_phase",
    "transport_matrix", "transport_spectrum", "validate_config",
    "validate_covariance", "wrap_phase", "write_covariance_csv",
    "write_phase_sweep_csv", "write_transport_csv",
]
