"""Independent reference computations used by the tests.

Nothing in here calls the package's own solvers for the quantity being
checked; each oracle takes a different route (brute force, ODE integration,
sampling) to the same number.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def lattice_shift_distance(radii, x, y, wraps: int = 3) -> float:
    """Flat torus distance as the minimum Euclidean distance over lattice translates."""
    L = 2.0 * math.pi * np.asarray(radii, dtype=float)
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    best = math.inf
    for shift in itertools.product(range(-wraps, wraps + 1), repeat=len(L)):
        best = min(best, float(np.linalg.norm(d + np.asarray(shift) * L)))
    return best


def rk4_rho(g1: float, g2: float, ell: float, h: float = 1e-4) -> np.ndarray:
    """RK4 for rho' = g1*ell^2 + g2*ell*rho on [0, 1], rho(0) = 0; vectorised over inputs."""
    g1, g2, ell = (np.asarray(a, dtype=float) for a in (g1, g2, ell))
    a = g1 * ell * ell
    b = g2 * ell
    rho = np.zeros(np.broadcast(a, b).shape)
    steps = int(round(1.0 / h))

    def f(y):
        return a + b * y

    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def jacobi_ratio(kappa: float, v: float, steps: int = 20000) -> float:
    """y(v)/v for y'' = -kappa*y, y(0) = 0, y'(0) = 1, integrated with RK4."""
    if v == 0:
        return 1.0
    h = v / steps
    y, p = 0.0, 1.0
    for _ in range(steps):
        k1y, k1p = p, -kappa * y
        k2y, k2p = p + 0.5 * h * k1p, -kappa * (y + 0.5 * h * k1y)
        k3y, k3p = p + 0.5 * h * k2p, -kappa * (y + 0.5 * h * k2y)
        k4y, k4p = p + h * k3p, -kappa * (y + h * k3y)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return y / v


def gh_brute_force(dX: np.ndarray, dY: np.ndarray) -> float:
    """Half the least distortion over every relation with full projections (tiny inputs only)."""
    n, m = len(dX), len(dY)
    pairs = [(a, b) for a in range(n) for b in range(m)]
    best = math.inf
    for mask in range(1, 1 << len(pairs)):
        R = [pairs[t] for t in range(len(pairs)) if mask >> t & 1]
        if {a for a, _ in R} != set(range(n)) or {b for _, b in R} != set(range(m)):
            continue
        dis = max(abs(dX[a, a2] - dY[b, b2]) for a, b in R for a2, b2 in R)
        best = min(best, dis)
    return 0.5 * best


def probe_covering_radius(dist_fn, net_points, probes) -> float:
    """Largest probe-to-net distance: a sampled lower estimate of the covering radius."""
    worst = 0.0
    for p in probes:
        worst = max(worst, float(np.min(dist_fn(p, net_points))))
    return worst


def haar_quaternions(n: int, rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def five_point_derivative(f, x: float, h: float) -> float:
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)
