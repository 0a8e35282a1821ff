"""Peristaltic pumping in a porous channel with Saffman slip.

Closed-form second-order perturbation fields, a finite-difference oracle,
parameter sweeps and a figure-reproducing command line.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DegenerateGeometryError,
    FirstOrderCoefficients,
    MeanFlowSolution,
    Profile,
    Quantity,
    ResonanceError,
    ZerothOrderFlow,
    compute_beta,
    compute_D,
    critical_reflux_pressure,
    darcy_free_limit,
    F_of_y,
    f_of_y,
    first_order_coeffs,
    G_of_y,
    mean_velocity,
    phi1,
    phi1_derivative,
    phi20_prime,
    sample_profile,
    solve_mean_flow,
    zeroth_order_stream,
)
from .params import (  # noqa: E402
    DimensionalScales,
    FlowParameters,
    ParameterError,
    PerturbationValidityWarning,
    nondimensionalize,
    validate,
)

__all__ = [
    "__version__",
    "DegenerateGeometryError", "FirstOrderCoefficients", "MeanFlowSolution", "Profile",
    "Quantity", "ResonanceError", "ZerothOrderFlow", "compute_beta", "compute_D",
    "critical_reflux_pressure", "darcy_free_limit", "F_of_y", "f_of_y", "first_order_coeffs",
    "G_of_y", "mean_velocity", "phi1", "phi1_derivative", "phi20_prime", "sample_profile",
    "solve_mean_flow", "zeroth_order_stream",
    "DimensionalScales", "FlowParameters", "ParameterError", "PerturbationValidityWarning",
    "nondimensionalize", "validate",
]
