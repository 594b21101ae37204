"""Berger spheres: S^3 = SU(2) with the Hopf fibres shrunk by a factor epsilon.

Points are unit quaternions ``(q0, q1, q2, q3)``. The metric is left invariant
with orthonormal frame ``q*i, q*j, q*k / epsilon``; the Hopf fibres are the
orbits ``q * exp(s k)`` and the Hopf map ``q -> q k q^-1`` lands on the unit
sphere, i.e. on S^2(1/2) after halving angles.

Unit-speed geodesics through 1 with body velocity ``h i + c k``
(``h^2 + eps^2 c^2 = 1``) are

    gamma(t) = exp(t (h i + eps^2 c k)) * exp(t (1 - eps^2) c k),

so distances reduce to a one-parameter shooting problem in ``c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import DomainError

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class BergerSphere:
    epsilon: float

    def __post_init__(self):
        e = float(self.epsilon)
        if not (0.0 < e <= 1.0):
            raise DomainError(f"Berger fibre scale must lie in (0, 1], got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", e)

    @property
    def injectivity_radius(self) -> float:
        """pi*eps (half the fibre) for thin spheres; past eps ~ 0.589 the first
        conjugate point along horizontal geodesics comes earlier."""
        return min(math.pi * self.epsilon, _horizontal_conjugate_time(self.epsilon))

    @property
    def volume(self) -> float:
        return 2.0 * math.pi**2 * self.epsilon

    @property
    def fiber_diameter(self) -> float:
        return math.pi * self.epsilon

    @property
    def curvature_bounds(self) -> tuple[float, float]:
        e2 = self.epsilon**2
        return e2, 4.0 - 3.0 * e2

    @property
    def diameter(self) -> float:
        e = self.epsilon
        if e * e <= 0.5:
            return math.pi / (2.0 * math.sqrt(1.0 - e * e))
        return math.pi * e

    def origin(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0, 0.0])


def _horizontal_conjugate_time(eps: float) -> float:
    """First t in (pi/2, pi] with eps^2 sin t + (1 - eps^2) t cos t = 0.

    This is where the Jacobi fields obtained by tilting a horizontal geodesic
    towards the fibre or rotating it about the fibre become dependent.
    """
    if eps >= 1.0:
        return math.pi
    e2 = eps * eps
    lo, hi = 0.5 * math.pi, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if e2 * math.sin(mid) + (1.0 - e2) * mid * math.cos(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def berger_geometry(B: BergerSphere) -> tuple[float, float, float, float, float]:
    """``(inj, volume, sec_lo, sec_hi, fiber_diameter)`` of a Berger sphere."""
    lo, hi = B.curvature_bounds
    return B.injectivity_radius, B.volume, lo, hi, B.fiber_diameter


# -- quaternion helpers -------------------------------------------------------

def qmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qexp(v) -> np.ndarray:
    """Exponential of pure quaternions given as 3-vectors."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(n > 0, np.sin(n) / np.where(n > 0, n, 1.0), 1.0)
    return np.concatenate([np.cos(n), s * v], axis=-1)


def check_unit(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1:] != (4,):
        raise DomainError("Berger sphere points are unit quaternions with 4 coordinates")
    if np.any(np.abs(np.linalg.norm(q, axis=-1) - 1.0) > _UNIT_TOL):
        raise DomainError("Berger sphere points must have unit norm (tolerance 1e-12)")
    return q


def hopf_map(q) -> np.ndarray:
    """Hopf projection q k q^-1 onto the unit 2-sphere in R^3."""
    q = np.asarray(q, dtype=float)
    p = qmul(qmul(q, np.array([0.0, 0.0, 0.0, 1.0])), qconj(q))
    return p[..., 1:]


def base_distance(x, y):
    """Distance between Hopf images on S^2(1/2)."""
    px, py = hopf_map(x), hopf_map(y)
    cos = np.clip(np.sum(px * py, axis=-1), -1.0, 1.0)
    return 0.5 * np.arccos(cos)


def horizontal_section(p) -> np.ndarray:
    """A unit quaternion over each point ``p`` of the unit sphere (a local section of the Hopf map)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    k = np.array([0.0, 0.0, 1.0])
    cosang = np.clip(p @ k, -1.0, 1.0)
    axis = np.cross(np.broadcast_to(k, p.shape), p)
    n = np.linalg.norm(axis, axis=-1, keepdims=True)
    half = 0.5 * np.arccos(cosang)[:, None]
    safe = np.where(n > 1e-15, n, 1.0)
    q = np.concatenate([np.cos(half), np.sin(half) * axis / safe], axis=-1)
    south = (n[:, 0] <= 1e-15) & (cosang < 0)
    q[south] = np.array([0.0, 1.0, 0.0, 0.0])
    return q


def fiber_shift(q, s) -> np.ndarray:
    """Move along the Hopf fibre: q * exp(s k)."""
    s = np.asarray(s, dtype=float)
    rot = np.stack([np.cos(s), np.zeros_like(s), np.zeros_like(s), np.sin(s)], axis=-1)
    return qmul(q, rot)


def geodesic_point(B: BergerSphere, c: float, t: float, start=None) -> np.ndarray:
    """Point at time ``t`` on the unit-speed geodesic with vertical parameter ``c`` from ``start``."""
    e2 = B.epsilon**2
    if e2 * c * c > 1.0:
        raise DomainError(f"vertical parameter |c| must be <= 1/epsilon, got {c!r}")
    h = math.sqrt(1.0 - e2 * c * c)
    g = qmul(qexp([t * h, 0.0, t * e2 * c]), qexp([0.0, 0.0, t * (1.0 - e2) * c]))
    return g if start is None else qmul(np.asarray(start, dtype=float), g)


# -- distance -----------------------------------------------------------------

@njit(cache=True)
def _shoot(eps, rho, cf, sign, w, branch):
    """Length and unwrapped end phase of the geodesic with c = sign*cf*cos(w) reaching base distance rho.

    With this parametrisation h^2 (1 - s^2) = cos(rho)^2 sin(w)^2, so the
    turning angle is taken from atan2 instead of asin(s) near s = 1. Along a
    branch the returned phase is continuous in w. Near-vertical geodesics sit
    at small w, where floats are dense; the phase sweeps a full turn over a
    w-interval of width ~ eps*rho.
    """
    e2 = eps * eps
    c = sign * cf * math.cos(w)
    sr, cr = math.sin(rho), math.cos(rho)
    ct = math.sin(w)
    # 1 - eps^2 c^2 without cancellation
    h2 = (cr * cr * ct * ct + e2 * sr * sr) / (cr * cr + e2 * sr * sr)
    if h2 <= 0.0:
        return math.nan, math.nan, math.nan
    h = math.sqrt(h2)
    nu = math.sqrt(h2 + e2 * e2 * c * c)
    s = nu * sr / h
    cs = cr * ct / h
    a = math.atan2(s, cs)
    if branch == 1:
        T = a / nu
        C = cs
    else:
        T = (math.pi - a) / nu
        C = -cs
    phi = math.atan2(e2 * c * s / nu, C) + T * (1.0 - e2) * c
    return T, phi, nu


@njit(cache=True)
def _root_in(eps, rho, cf, sign, branch, lo, hi, flo, level):
    # bisection on phase(w) = level between lo and hi, where phase(lo) - level has sign of flo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        Tm, pm, _nu = _shoot(eps, rho, cf, sign, mid, branch)
        if math.isnan(pm):
            hi = mid
            continue
        if (pm - level <= 0.0) == (flo <= 0.0):
            lo, flo = mid, pm - level
        else:
            hi = mid
    T, _p, _nu = _shoot(eps, rho, cf, sign, 0.5 * (lo + hi), branch)
    return T


@njit(cache=True)
def _scan(eps, rho, psi, cf, sign, branch, best):
    """Walk w from pi/2 (horizontal) down to 0 and bracket every crossing of the levels psi + 2 pi k."""
    half_pi = 0.5 * math.pi
    two_pi = 2.0 * math.pi
    w0 = half_pi
    T0, p0, nu0 = _shoot(eps, rho, cf, sign, half_pi, branch)
    k0 = (p0 - psi) / two_pi
    if k0 == math.floor(k0) and T0 < best:
        best = T0
    dw = 1e-3
    while w0 > 0.0:
        w1 = max(w0 - dw, 0.0)
        T1, p1, nu1 = _shoot(eps, rho, cf, sign, w1, branch)
        if math.isnan(p1):
            if dw > 1e-300:
                dw *= 0.5
                continue
            break
        dp = p1 - p0
        if abs(dp) > 0.4 and dw > 1e-300:
            dw *= 0.5
            continue
        lo_p, hi_p = min(p0, p1), max(p0, p1)
        k = math.ceil((lo_p - psi) / two_pi)
        found = False
        while psi + two_pi * k <= hi_p:
            level = psi + two_pi * k
            if p1 == level:
                Tr = T1
            elif p0 == level:
                Tr = T0
            else:
                Tr = _root_in(eps, rho, cf, sign, branch, w0, w1, p0 - level, level)
            if Tr < best:
                best = Tr
            found = True
            k += 1
        if w1 == 0.0:
            # both branches meet at the end of the range; a root sitting exactly
            # there can be a tangency that no sign change reveals
            w = (p1 - psi) / two_pi
            if abs(w - round(w)) * two_pi < 1e-10 and T1 < best:
                best = T1
        if found and branch == 1:
            # branch-1 lengths increase with |c|; later roots are longer
            break
        w0, T0, p0 = w1, T1, p1
        if branch == 1 and T1 > best:
            break
        if branch == 2 and half_pi / nu1 > best:
            break
        if abs(dp) < 0.1:
            dw = min(2.0 * dw, 0.05)
    return best


@njit(cache=True)
def _distance_from_invariants(eps, rho, psi):
    # psi in [0, pi], rho in [0, pi/2]
    if rho <= 1e-15:
        return eps * psi
    if math.cos(rho) <= 1e-13:
        return 0.5 * math.pi
    best = rho + eps * psi
    sr = math.sin(rho)
    cr = math.cos(rho)
    cf = cr / (eps * math.sqrt(1.0 - (1.0 - eps * eps) * sr * sr))
    cf = min(cf, 1.0 / eps)
    for branch in (1, 2):
        for sign in (1.0, -1.0):
            best = _scan(eps, rho, psi, cf, sign, branch, best)
    return best


@njit(cache=True)
def _distances(eps, rho, psi, out):
    for n in range(rho.shape[0]):
        out[n] = _distance_from_invariants(eps, rho[n], psi[n])


def distance_invariants(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a pair of points to (base distance rho, fibre phase |psi|) of x^-1 y."""
    q = qmul(qconj(x), y)
    z0, z3 = q[..., 0], q[..., 3]
    # atan2 keeps full precision for nearby points where arccos would not
    rho = np.arctan2(np.hypot(q[..., 1], q[..., 2]), np.hypot(z0, z3))
    psi = np.abs(np.arctan2(z3, z0))
    return rho, psi


def berger_distance(B: BergerSphere, x, y):
    """Riemannian distance on the Berger sphere between unit quaternions (broadcasting)."""
    x = check_unit(x)
    y = check_unit(y)
    rho, psi = distance_invariants(x, y)
    shape = rho.shape
    r = np.ascontiguousarray(rho, dtype=float).ravel()
    p = np.ascontiguousarray(psi, dtype=float).ravel()
    out = np.empty_like(r)
    _distances(B.epsilon, r, p, out)
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


@njit(cache=True)
def _psi_max(eps, rho, r):
    # sup of psi in [0, pi] with d(rho, psi) < r; d is increasing in psi and d(rho, 0) = rho
    if rho >= r:
        return 0.0
    f_hi = _distance_from_invariants(eps, rho, math.pi) - r
    if f_hi < 0.0:
        return math.pi
    lo, hi = 0.0, math.pi
    f_lo = rho - r
    side = 0
    # Illinois variant of regula falsi: keeps the bracket, converges superlinearly
    for _ in range(100):
        x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        fx = _distance_from_invariants(eps, rho, x) - r
        if fx < 0.0:
            lo, f_lo = x, fx
            if side == -1:
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = x, fx
            if side == 1:
                f_lo *= 0.5
            side = 1
        if hi - lo <= 1e-13 or fx == 0.0:
            break
    return 0.5 * (lo + hi) if hi - lo <= 1e-13 else x


@njit(cache=True)
def _integrand(eps, r, x, edge):
    if edge:
        # rho = r (1 - x^2) turns the square-root edge of psi_max at rho = r into a smooth zero
        rho = r * (1.0 - x * x)
        return 2.0 * r * x * math.sin(2.0 * rho) * _psi_max(eps, rho, r)
    return math.sin(2.0 * x) * _psi_max(eps, x, r)


@njit(cache=True)
def _panel(eps, r, a, b, edge, nodes, weights):
    half = 0.5 * (b - a)
    acc = 0.0
    for n in range(nodes.shape[0]):
        acc += weights[n] * _integrand(eps, r, a + half * (nodes[n] + 1.0), edge)
    return half * acc


@njit(cache=True)
def _ball_fraction(eps, r, nodes, weights, tol):
    # Haar measure in the invariants: cos^2(rho) ~ U[0, 1], psi ~ U[0, pi].
    # Adaptive bisection handles the kinks where psi_max saturates at pi.
    edge = r < 0.5 * math.pi
    top = 1.0 if edge else 0.5 * math.pi
    init = 4
    cap = 4096
    sa = np.empty(cap)
    sb = np.empty(cap)
    sw = np.empty(cap)
    sd = np.empty(cap, dtype=np.int64)
    n = 0
    for p in range(init):
        a = top * p / init
        b = top * (p + 1) / init
        sa[n], sb[n], sw[n], sd[n] = a, b, _panel(eps, r, a, b, edge, nodes, weights), 0
        n += 1
    total = 0.0
    while n > 0:
        n -= 1
        a, b, whole, depth = sa[n], sb[n], sw[n], sd[n]
        m = 0.5 * (a + b)
        left = _panel(eps, r, a, m, edge, nodes, weights)
        right = _panel(eps, r, m, b, edge, nodes, weights)
        if abs(left + right - whole) <= tol * (b - a) / top or depth >= 40 or n + 2 > cap:
            total += left + right
        else:
            sa[n], sb[n], sw[n], sd[n] = a, m, left, depth + 1
            sa[n + 1], sb[n + 1], sw[n + 1], sd[n + 1] = m, b, right, depth + 1
            n += 2
    return total / math.pi


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def berger_ball_volume(B: BergerSphere, r: float, tol: float = 1e-8) -> float:
    """Volume of a geodesic r-ball on a Berger sphere.

    Saturated radii return the total volume exactly. Otherwise the ball is
    integrated in the distance invariants: for each base angle rho the fibre
    phases inside the ball form an interval [0, psi_max) found by bisection,
    and the rho integral uses adaptive Gauss-Legendre quadrature with absolute
    tolerance ``tol`` on the volume fraction.
    """
    r = float(r)
    if not (r >= 0.0 and math.isfinite(r)):
        raise DomainError(f"ball radius must be nonnegative and finite, got {r!r}")
    if r == 0.0:
        return 0.0
    if r >= B.diameter:
        return B.volume
    if not tol > 0:
        raise DomainError("tol must be positive")
    return B.volume * _ball_fraction(B.epsilon, r, _GL_NODES, _GL_WEIGHTS, float(tol))


# -- curvature (independent numerical route via the Koszul formula) ------------

_STRUCTURE = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _STRUCTURE[_a, _b, _c] = 2.0
    _STRUCTURE[_b, _a, _c] = -2.0


def _bracket(u, v):
    return np.einsum("abc,a,b->c", _STRUCTURE, u, v)


def berger_sectional_curvature(B: BergerSphere, u, v) -> float:
    """Sectional curvature of the plane spanned by left-invariant fields u, v.

    ``u`` and ``v`` are coefficient vectors in the frame (i, j, k). The
    Levi-Civita connection of the left-invariant metric diag(1, 1, eps^2) is
    assembled from the structure constants, so this does not use the
    closed-form curvature bounds.
    """
    G = np.diag([1.0, 1.0, B.epsilon**2])

    def ip(a, b):
        return float(a @ G @ b)

    def nabla(a, b):
        # Koszul: 2<nabla_a b, w> = <[a,b],w> - <[b,w],a> + <[w,a],b>
        rhs = np.array(
            [
                ip(_bracket(a, b), w) - ip(_bracket(b, w), a) + ip(_bracket(w, a), b)
                for w in np.eye(3)
            ]
        )
        return 0.5 * np.linalg.solve(G, rhs)

    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    # R(u,v)v = nabla_u nabla_v v - nabla_v nabla_u v - nabla_[u,v] v for left-invariant fields
    Ruvv = nabla(u, nabla(v, v)) - nabla(v, nabla(u, v)) - nabla(_bracket(u, v), v)
    area2 = ip(u, u) * ip(v, v) - ip(u, v) ** 2
    return ip(Ruvv, u) / area2


def grid_pool(B: BergerSphere, fill: float, seed: int = 0, max_points: int = 400_000):
    """Latitude rings on the base lifted along evenly spaced fibre points.

    Returns ``(points, fill_bound)``. Any point reaches the pool by a
    horizontal path of length <= dtheta/2 followed by a fibre arc of length
    <= pi*eps/m_f, which is the returned bound.
    """
    eps = B.epsilon
    # a third of the budget along fibres minimises (base points) x (fibre points)
    m_f = max(1, math.ceil(3.0 * math.pi * eps / fill))
    base_fill = fill - math.pi * eps / m_f
    dtheta = 2.0 * base_fill
    n_rings = max(1, math.ceil(math.pi / dtheta))
    dtheta = math.pi / n_rings
    rng = np.random.Generator(np.random.Philox(seed))
    rot = rng.random(2)
    base = []
    for i in range(n_rings):
        th = (i + 0.5) * dtheta
        m_i = max(1, math.ceil(2.0 * math.pi * math.sin(th) / dtheta))
        ph = 2.0 * math.pi * (rot[0] + np.arange(m_i)) / m_i
        base.append(np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                              np.full(m_i, math.cos(th))], axis=-1))
    base = np.concatenate(base)
    total = len(base) * m_f
    if total > max_points:
        raise DomainError(
            f"candidate grid would need {total} points (limit {max_points}); increase eps"
        )
    lifts = horizontal_section(base)
    s = 2.0 * math.pi * (rot[1] + np.arange(m_f)) / m_f
    pts = fiber_shift(lifts[:, None, :], s[None, :]).reshape(-1, 4)
    pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
    return pts, 0.5 * dtheta + math.pi * eps / m_f
