"""Numerical experiments on collapsing sequences of model Riemannian manifolds."""
from .bounds import (
    BoundBreakdown,
    SubmersionBoundInput,
    compute_breakdown,
    exp_differential_bounds,
    fiber_inj_bound,
    gray_oneill_interval,
    heintze_karcher_fiber_volume,
    nullhomotopy_bounds,
    ode_rho_closed_form,
    tau_profile,
)
from .diagnostics import (
    CollapseProfile,
    CollapseVerdict,
    SequenceSpec,
    VerdictKind,
    classify,
    estimate_limit_dimension,
    profile,
)
from .errors import DomainError, SizeLimitError, UnsupportedDimensionError
from .geometry import BergerSphere, FlatTorus, ball_volume, criterion_ratio, distance
from .gh import FiniteMetricSpace, epsilon_net, gh_distance, gh_distance_exact, gh_lower_bound

__version__ = "0.1.0"

__all__ = [
    "BergerSphere",
    "BoundBreakdown",
    "CollapseProfile",
    "CollapseVerdict",
    "DomainError",
    "FiniteMetricSpace",
    "FlatTorus",
    "SequenceSpec",
    "SizeLimitError",
    "SubmersionBoundInput",
    "UnsupportedDimensionError",
    "VerdictKind",
    "ball_volume",
    "classify",
    "compute_breakdown",
    "criterion_ratio",
    "distance",
    "epsilon_net",
    "estimate_limit_dimension",
    "exp_differential_bounds",
    "fiber_inj_bound",
    "gh_distance",
    "gh_distance_exact",
    "gh_lower_bound",
    "gray_oneill_interval",
    "heintze_karcher_fiber_volume",
    "nullhomotopy_bounds",
    "ode_rho_closed_form",
    "profile",
    "tau_profile",
]
