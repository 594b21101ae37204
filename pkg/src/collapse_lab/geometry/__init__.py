"""Model manifolds used as collapsing sequences: flat tori and Berger spheres."""
from __future__ import annotations

from typing import Literal, Union

from ..errors import DomainError
from .berger import (
    BergerSphere,
    base_distance,
    berger_ball_volume,
    berger_distance,
    berger_geometry,
    berger_sectional_curvature,
    geodesic_point,
    hopf_map,
)
from .torus import (
    DEFAULT_SAMPLES,
    FlatTorus,
    euclidean_ball_volume,
    torus_ball_volume_exact,
    torus_ball_volume_mc,
    torus_distance,
    torus_injectivity,
)

Member = Union[FlatTorus, BergerSphere]
VolumeMode = Literal["exact", "monte_carlo"]

__all__ = [
    "BergerSphere",
    "FlatTorus",
    "Member",
    "VolumeMode",
    "ball_volume",
    "base_distance",
    "berger_ball_volume",
    "berger_distance",
    "berger_geometry",
    "berger_sectional_curvature",
    "criterion_ratio",
    "distance",
    "euclidean_ball_volume",
    "geodesic_point",
    "hopf_map",
    "injectivity_radius",
    "torus_ball_volume_exact",
    "torus_ball_volume_mc",
    "torus_distance",
    "torus_injectivity",
]


def distance(member: Member, x, y):
    if isinstance(member, FlatTorus):
        return torus_distance(member, x, y)
    if isinstance(member, BergerSphere):
        return berger_distance(member, x, y)
    raise TypeError(f"unsupported manifold {member!r}")


def injectivity_radius(member: Member) -> float:
    return member.injectivity_radius


def ball_volume(
    member: Member,
    r: float,
    mode: VolumeMode = "exact",
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """Volume of a geodesic r-ball; point independent on these homogeneous spaces."""
    if mode not in ("exact", "monte_carlo"):
        raise DomainError(f"unknown volume mode {mode!r}")
    if isinstance(member, BergerSphere):
        # deterministic quadrature in either mode; saturated radii are exact
        return berger_ball_volume(member, r)
    if mode == "exact":
        return torus_ball_volume_exact(member, r)
    return torus_ball_volume_mc(member, r, samples, seed)[0]


def criterion_ratio(
    member: Member,
    r: float,
    mode: VolumeMode = "exact",
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """vol(B_r(x)) / inj(x) for a homogeneous model manifold."""
    if r < 0:
        raise DomainError(f"ball radius must be nonnegative, got {r!r}")
    if r == 0:
        return 0.0
    return ball_volume(member, r, mode, samples=samples, seed=seed) / member.injectivity_radius
