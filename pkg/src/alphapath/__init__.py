"""Alpha-path families and inverse uncertainty distributions for
higher-order uncertain differential equations.

For a problem x^(n) = f(t, x, ..., x^(n-1)) + g(...) * dC/dt driven by a
Lipschitz uncertain process, each alpha in (0, 1) induces an ordinary ODE
whose solution (the alpha-path) bounds the driven trajectories: the family
of alpha-paths tabulates the solution's inverse uncertainty distribution.
This package solves those families, verifies the hypotheses that make the
construction valid (positive diffusion, monotone drift/diffusion in the
position), and tests the bounding property constructively against sampled
surrogate drivers.
"""

from .core import (
    AlphaGridSpec,
    FirstOrderSystem,
    UdeSpec,
    alpha_grid,
    companion_system,
    phi_inv,
    validate_spec,
)
from .solver import (
    AlphaFan,
    AlphaPath,
    IntegralResidual,
    Trajectory,
    integral_residual,
    rk4_step,
    solve_alpha_path,
    solve_fan,
    solve_sample_path,
)
from .analysis import (
    ConditionHCheck,
    DistributionPoint,
    DistributionTable,
    HypothesisReport,
    MonotoneCheck,
    RegularityCheck,
    check_condition_h,
    check_hypotheses,
    check_monotone,
    check_regularity,
    distribution_at,
    expected_value,
    inverse_distribution,
)
from .oracle import (
    DominanceReport,
    SamplePath,
    dominance_check,
    sample_lipschitz_path,
)
from .errors import (
    AlignmentError,
    AlphaPathError,
    BlowUpError,
    ConfigError,
    DomainError,
    FanSolveError,
    HypothesisError,
    LexError,
    MonotonicityError,
    NonFiniteError,
    ParseError,
    UnknownFunctionError,
    UnknownVariableError,
)

__all__ = [
    "AlignmentError",
    "AlphaFan",
    "AlphaGridSpec",
    "AlphaPath",
    "AlphaPathError",
    "BlowUpError",
    "ConditionHCheck",
    "ConfigError",
    "DomainError",
    "FanSolveError",
    "HypothesisError",
    "LexError",
    "MonotonicityError",
    "NonFiniteError",
    "ParseError",
    "UnknownFunctionError",
    "UnknownVariableError",
    "DistributionPoint",
    "DistributionTable",
    "DominanceReport",
    "FirstOrderSystem",
    "HypothesisReport",
    "IntegralResidual",
    "MonotoneCheck",
    "RegularityCheck",
    "SamplePath",
    "Trajectory",
    "UdeSpec",
    "alpha_grid",
    "check_condition_h",
    "check_hypotheses",
    "check_monotone",
    "check_regularity",
    "companion_system",
    "distribution_at",
    "dominance_check",
    "expected_value",
    "integral_residual",
    "inverse_distribution",
    "phi_inv",
    "rk4_step",
    "sample_lipschitz_path",
    "solve_alpha_path",
    "solve_fan",
    "solve_sample_path",
    "validate_spec",
]

__version__ = "0.1.0"
