"""Quantum-noise simulator for a five-mode Kerr frequency comb.

A pump and two signal/idler sideband pairs (labelled ``p, s1, i1, s2, i2``)
interact through cascaded four-wave mixing in a high-Q microresonator.  The
package computes classical steady states, linearized fluctuation dynamics
(drift/diffusion matrices), intracavity and extracavity squeezing spectra,
and gain-optimized multipartite entanglement witnesses, together with
brute-force validators for every analytic shortcut.

The public API is re-exported here; see the individual modules for details:

``model``
    Parameters, coupling constant, pump threshold, classical steady states.
``linearize``
    Drift vector/matrix, diffusion matrix, noise factorization, stability.
``spectra``
    Spectral correlation matrices, quadrature transforms, output variances.
``vlf``
    Multipartite witness values with closed-form gain optimization.
``oracle``
    Independent validators (finite differences, Lyapunov, grid search).
``experiments``
    Parameter sweeps and CSV/JSON writers.
``cli``
    Command-line front end (``kerrcomb`` console script).
"""

from .errors import ConfigError, ModelError, SingularMatrixError, UnstableModelError
from .model import (
    HBAR,
    MODES,
    SPEED_OF_LIGHT,
    PhysicalParams,
    RateParams,
    SteadyState,
    coupling_constant,
    pump_threshold,
    steady_state,
    steady_state_residual,
)
from .linearize import (
    LinearModel,
    StabilityReport,
    diffusion_matrix,
    drift_matrix,
    drift_vector,
    linear_model,
    noise_factor,
    stability,
    steady_field,
)
from .spectra import (
    CombinationCoeffs,
    QuadratureSpectrum,
    SpectralMatrix,
    default_omega_grid,
    intracavity_spectrum,
    output_variance,
    quadrature_spectrum,
    spectrum_grid,
)
from .vlf import (
    FREE_MODES,
    VlfReport,
    VlfSummary,
    five_partite_verdict,
    optimize_gains,
    vlf_combinations,
    vlf_value,
)
from .oracle import (
    OracleReport,
    grid_search_gains,
    lyapunov_covariance,
    lyapunov_crosscheck,
    numeric_jacobian,
    spectrum_integral,
    validate_model,
)
from .experiments import (
    SweepResult,
    coupling_sweep,
    pump_sweep,
    scaling_check,
    write_sweep_csv,
    write_sweep_json,
)

__version__ = "0.1.0"

__all__ = [
    "HBAR",
    "MODES",
    "SPEED_OF_LIGHT",
    "PhysicalParams",
    "RateParams",
    "SteadyState",
    "coupling_constant",
    "pump_threshold",
    "steady_state",
    "steady_state_residual",
    "LinearModel",
    "StabilityReport",
    "diffusion_matrix",
    "drift_matrix",
    "drift_vector",
    "linear_model",
    "noise_factor",
    "stability",
    "steady_field",
    "CombinationCoeffs",
    "QuadratureSpectrum",
    "SpectralMatrix",
    "default_omega_grid",
    "intracavity_spectrum",
    "output_variance",
    "quadrature_spectrum",
    "spectrum_grid",
    "FREE_MODES",
    "VlfReport",
    "VlfSummary",
    "five_partite_verdict",
    "optimize_gains",
    "vlf_combinations",
    "vlf_value",
    "OracleReport",
    "grid_search_gains",
    "lyapunov_covariance",
    "lyapunov_crosscheck",
    "numeric_jacobian",
    "spectrum_integral",
    "validate_model",
    "SweepResult",
    "coupling_sweep",
    "pump_sweep",
    "scaling_check",
    "write_sweep_csv",
    "write_sweep_json",
    "ConfigError",
    "ModelError",
    "SingularMatrixError",
    "UnstableModelError",
    "__version__",
]
