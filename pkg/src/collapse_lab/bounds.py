"""Closed-form constants for bounded Riemannian submersions.

Everything here follows one chain: a curvature interval for the base (from
the A-tensor bound) feeds comparison bounds on the exponential map, these give
bounds on a nullhomotopy of the projected loop, and those drive a linear ODE
whose solution controls the length of the vertical loop. The end product is
the factor C = P + L with inj(fibre) <= C * inj(M).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Literal

from .errors import DomainError

MAX_FIBER_DIM = 20
_SERIES_CUTOFF = 1e-4


def sinc(x: float) -> float:
    """sin(x)/x with the removable singularity filled in."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def sinhc(x: float) -> float:
    """sinh(x)/x with the removable singularity filled in."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    return math.sinh(x) / x


def expm1c(x: float) -> float:
    """(e^x - 1)/x, equal to 1 at x = 0."""
    if abs(x) < _SERIES_CUTOFF:
        return 1.0 + x / 2.0 + x * x / 6.0
    return math.expm1(x) / x


def exp_differential_bounds(lam: float, cap_lam: float, v_norm: float) -> tuple[float, float]:
    """Rauch-type factors bounding |D_v exp_p (w)| / |w| under -lam^2 <= sec <= cap_lam^2.

    Returns ``(sin(cap_lam*v)/(cap_lam*v), sinh(lam*v)/(lam*v))``.
    """
    if lam < 0 or cap_lam < 0 or v_norm < 0:
        raise DomainError("curvature scales and |v| must be nonnegative")
    if cap_lam > 0 and cap_lam * v_norm >= math.pi:
        raise DomainError(
            f"|v| < pi/Lambda violated: {v_norm!r} >= {math.pi / cap_lam!r} (conjugate point)"
        )
    return sinc(cap_lam * v_norm), sinhc(lam * v_norm)


def nullhomotopy_bounds(
    lam: float,
    cap_lam: float,
    ell_alpha: float,
    regime: Literal["mixed", "negative"] = "mixed",
) -> tuple[float, float]:
    """Bounds ``(|dH/dt|, |dH/ds|)`` for the radial nullhomotopy of a loop of length ell_alpha.

    ``mixed``: -lam^2 <= sec <= cap_lam^2. ``negative``: -lam^2 <= sec <= -cap_lam^2.
    """
    if lam < 0 or cap_lam < 0 or ell_alpha < 0:
        raise DomainError("curvature scales and loop length must be nonnegative")
    half = 0.5 * ell_alpha
    if regime == "mixed":
        if cap_lam > 0 and cap_lam * ell_alpha >= 2.0 * math.pi:
            raise DomainError(
                f"l(alpha) < 2*pi/Lambda violated: {ell_alpha!r} >= {2.0 * math.pi / cap_lam!r}"
            )
        denom = sinc(cap_lam * half)
    elif regime == "negative":
        if lam < cap_lam:
            raise DomainError(f"lambda >= Lambda violated: {lam!r} < {cap_lam!r}")
        denom = sinhc(cap_lam * half)
    else:
        raise DomainError(f"unknown regime {regime!r}")
    # (Lambda/lambda) sinh(lambda l/2)/sin(Lambda l/2) = sinhc(lambda l/2)/sinc(Lambda l/2)
    dt = sinhc(lam * half) / denom * ell_alpha
    ds = sinhc(lam * half) * half
    return dt, ds


def gray_oneill_interval(cap_k: float, c_a: float) -> tuple[float, float]:
    """Base curvature interval [-K, K + 3 C_A^2] of a submersion with |sec^M| <= K, |A| <= C_A."""
    if cap_k < 0 or c_a < 0:
        raise DomainError("K and C_A must be nonnegative")
    return -cap_k, cap_k + 3.0 * c_a * c_a


def ode_rho_closed_form(g1: float, g2: float, ell: float) -> float:
    """rho_ell(1) for rho' = g1*ell^2 + g2*ell*rho, rho(0) = 0."""
    if g2 < 0:
        raise DomainError(f"g2 must be nonnegative, got {g2!r}")
    # (g1/g2) ell (e^{g2 ell} - 1) written to stay finite as g2 -> 0
    return g1 * ell * ell * expm1c(g2 * ell)


def ode_rho_derivative(g1: float, g2: float, ell: float) -> float:
    """d/d ell of ``ode_rho_closed_form`` with g1, g2 held fixed."""
    x = g2 * ell
    return g1 * ell * expm1c(x) + g1 * ell * math.exp(x)


@dataclass(frozen=True)
class SubmersionBoundInput:
    c_a: float
    c_t: float
    k: int
    cap_k: float
    ell: float

    def __post_init__(self):
        for name in ("c_a", "c_t", "cap_k", "ell"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.c_a < 0 or self.c_t < 0:
            raise DomainError("C_A and C_T must be nonnegative")
        if self.cap_k <= 0:
            raise DomainError(f"K must be positive, got {self.cap_k!r}")
        if self.ell <= 0:
            raise DomainError(f"loop length must be positive, got {self.ell!r}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"fibre dimension k must be a positive integer, got {self.k!r}")
        if self.k > MAX_FIBER_DIM:
            raise DomainError(f"fibre dimension k <= {MAX_FIBER_DIM} required, got {self.k}")
        limit = 2.0 * math.pi / math.sqrt(self.cap_k + 3.0 * self.c_a**2)
        if not self.ell < limit:
            raise DomainError(
                f"ell < 2*pi/sqrt(K + 3*C_A^2) violated: {self.ell!r} >= {limit!r}"
            )

    @property
    def curvature_scales(self) -> tuple[float, float]:
        """(lambda, Lambda) with -lambda^2 <= sec^Y <= Lambda^2."""
        lo, hi = gray_oneill_interval(self.cap_k, self.c_a)
        return math.sqrt(-lo), math.sqrt(hi)

    def with_ell(self, ell: float) -> "SubmersionBoundInput":
        return SubmersionBoundInput(self.c_a, self.c_t, self.k, self.cap_k, ell)


@dataclass(frozen=True)
class BoundBreakdown:
    q_t: float
    q_s_tilde: float
    g1: float
    g2: float
    p_bound: float
    l_lipschitz: float
    c_total: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "BoundBreakdown":
        data = json.loads(text)
        return cls(**{name: float(data[name]) for name in cls.__dataclass_fields__})


def compute_breakdown(inp: SubmersionBoundInput) -> BoundBreakdown:
    lam, cap_lam = inp.curvature_scales
    ell, k = inp.ell, int(inp.k)
    half = 0.5 * ell

    q_t = sinhc(lam * half) / sinc(cap_lam * half)
    q_s_tilde = 0.5 * sinhc(lam * half)
    comb = 4.0**k * math.factorial(k)
    g1 = k * inp.c_a * q_s_tilde * q_t * (1.0 + comb)
    g2 = k * q_t * (inp.c_t + comb * inp.c_a)

    x = g2 * ell
    try:
        # (G1/G2)(e^{G2 ell} - 1) + G1 ell e^{G2 ell}
        p_bound = g1 * ell * expm1c(x) + g1 * ell * math.exp(x) if g1 > 0 else 0.0
        l_lipschitz = math.exp(inp.c_t * ell)
    except OverflowError:
        p_bound = l_lipschitz = math.inf
    c_total = p_bound + l_lipschitz
    if not math.isfinite(c_total):
        raise DomainError(
            f"bound overflows double precision (G2*ell = {x:.6g}); reduce k, C_A, C_T or ell"
        )
    return BoundBreakdown(q_t, q_s_tilde, g1, g2, p_bound, l_lipschitz, c_total)


def fiber_inj_bound(inp: SubmersionBoundInput, inj_m: float) -> float:
    """Upper bound C * inj_m on the fibre injectivity radius; the loop has length 2*inj_m."""
    if not math.isclose(inp.ell, 2.0 * inj_m, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError(f"loop length must equal 2*inj_m: ell={inp.ell!r}, inj_m={inj_m!r}")
    return compute_breakdown(inp).c_total * inj_m


def fiber_inj_bound_for(c_a: float, c_t: float, k: int, cap_k: float, inj_m: float) -> float:
    return fiber_inj_bound(SubmersionBoundInput(c_a, c_t, k, cap_k, 2.0 * inj_m), inj_m)


def c3_default(k: int) -> float:
    """Placeholder Heintze-Karcher constant: 2 for circles, 2*vol(S^{k-1}) otherwise.

    Only the circle value is pinned down (a circle's length is twice its
    injectivity radius); larger k is a stand-in until the literature constant
    is substituted.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if k == 1:
        return 2.0
    return 2.0 * 2.0 * math.pi ** (k / 2) / math.gamma(k / 2)


def heintze_karcher_fiber_volume(
    k: int,
    cap_k_fiber: float,
    inj_f: float,
    diam_f: float,
    c3: float | None = None,
) -> float:
    """c3 * inj_f * (sinh(diam_f * sqrt(K)) / sqrt(K))^(k-1), with K the fibre's lower curvature scale."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if cap_k_fiber < 0 or inj_f <= 0 or diam_f <= 0:
        raise DomainError("need K >= 0, inj_f > 0 and diam_f > 0")
    if c3 is None:
        c3 = c3_default(k)
    if k == 1:
        return c3 * inj_f
    s = math.sqrt(cap_k_fiber)
    return c3 * inj_f * (diam_f * sinhc(diam_f * s)) ** (k - 1)


@dataclass(frozen=True)
class TauRow:
    ell: float
    p_bound: float
    l_minus_one: float
    c_minus_one: float


def tau_profile(base: SubmersionBoundInput, ells: Iterable[float]) -> list[TauRow]:
    """Correction terms P, L - 1, C - 1 along a grid of loop lengths."""
    rows = []
    for ell in ells:
        b = compute_breakdown(base.with_ell(float(ell)))
        l_minus_one = math.expm1(base.c_t * ell)
        rows.append(TauRow(float(ell), b.p_bound, l_minus_one, b.p_bound + l_minus_one))
    return rows
