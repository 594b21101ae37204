"""Flat tori S^1(r_1) x ... x S^1(r_n) with the product metric.

Points are given in arc-length coordinates: coordinate j lives in
[0, 2*pi*r_j) and wraps around with period 2*pi*r_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from ..errors import DomainError, UnsupportedDimensionError

DEFAULT_SAMPLES = 1_000_000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class FlatTorus:
    radii: tuple[float, ...]

    def __init__(self, radii: Sequence[float]):
        radii = tuple(float(r) for r in np.atleast_1d(radii))
        if not radii:
            raise DomainError("a flat torus needs at least one circle factor")
        for r in radii:
            if not (math.isfinite(r) and r > 0.0):
                raise DomainError(f"circle radius must be positive and finite, got {r!r}")
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return len(self.radii)

    @property
    def periods(self) -> np.ndarray:
        """Circumferences 2*pi*r_j of the circle factors."""
        return 2.0 * math.pi * np.asarray(self.radii)

    @property
    def injectivity_radius(self) -> float:
        return math.pi * min(self.radii)

    @property
    def volume(self) -> float:
        return math.prod(2.0 * math.pi * r for r in self.radii)

    @property
    def diameter(self) -> float:
        return math.pi * math.sqrt(sum(r * r for r in self.radii))

    def scaled(self, s: float) -> "FlatTorus":
        return FlatTorus([s * r for r in self.radii])

    def origin(self) -> np.ndarray:
        return np.zeros(self.dim)


def _check_points(T: FlatTorus, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (T.dim,):
        raise DomainError(
            f"point has {p.shape[-1] if p.ndim else 0} coordinates, torus has dimension {T.dim}"
        )
    return p


def wrap_offsets(T: FlatTorus, x, y) -> np.ndarray:
    """Per-factor wrap distances min(|d_j|, 2*pi*r_j - |d_j|), broadcasting over points."""
    x = _check_points(T, x)
    y = _check_points(T, y)
    L = T.periods
    d = np.mod(np.abs(y - x), L)
    return np.minimum(d, L - d)


def torus_distance(T: FlatTorus, x, y):
    """Geodesic distance on ``T``; accepts single points or broadcastable arrays of points."""
    w = wrap_offsets(T, x, y)
    out = np.sqrt(np.sum(w * w, axis=-1))
    return float(out) if out.ndim == 0 else out


def torus_injectivity(T: FlatTorus) -> float:
    return T.injectivity_radius


def _quarter_disk_in_box(a: float, b: float, r: float) -> float:
    """Area of {0 <= u <= a, 0 <= v <= b, u^2 + v^2 < r^2}."""

    def primitive(u: float) -> float:
        # antiderivative of sqrt(r^2 - u^2) on [0, r]
        u = min(u, r)
        return 0.5 * (u * math.sqrt(max(r * r - u * u, 0.0)) + r * r * math.asin(u / r))

    if r <= b:
        return primitive(min(a, r))
    u0 = math.sqrt(r * r - b * b)  # the arc leaves the box top at u0
    if u0 >= a:
        return a * b
    return b * u0 + primitive(min(a, r)) - primitive(u0)


def torus_ball_volume_exact(T: FlatTorus, r: float) -> float:
    """Exact volume of a geodesic ball of radius ``r`` on a flat torus of dimension 1 or 2.

    Centring the fundamental domain on the ball centre turns the wrapped ball
    into the Euclidean ball intersected with the box of half-widths pi*r_j,
    which has a closed-form area.
    """
    r = float(r)
    if not (r >= 0.0 and math.isfinite(r)):
        raise DomainError(f"ball radius must be nonnegative and finite, got {r!r}")
    if T.dim > 2:
        raise UnsupportedDimensionError(
            f"exact ball volume supports dimension <= 2, torus has dimension {T.dim}; "
            "use the Monte Carlo backend"
        )
    if r == 0.0:
        return 0.0
    if r >= T.diameter:
        return T.volume
    half = [math.pi * rj for rj in T.radii]
    if T.dim == 1:
        return 2.0 * min(r, half[0])
    a, b = half
    if r <= min(a, b):
        return math.pi * r * r
    return 4.0 * _quarter_disk_in_box(a, b, r)


@njit(cache=True)
def _count_hits(u, x, L, r2):
    # u holds uniforms in [0, 1) scaled onto the domain; x must already lie in [0, L)
    hits = 0
    m, n = u.shape
    for i in range(m):
        acc = 0.0
        for j in range(n):
            d = abs(u[i, j] * L[j] - x[j])
            d = min(d, L[j] - d)
            acc += d * d
        if acc < r2:
            hits += 1
    return hits


def torus_ball_volume_mc(
    T: FlatTorus,
    r: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    center=None,
    shards: int = 1,
) -> tuple[float, float]:
    """Monte Carlo ball volume by uniform sampling of the fundamental domain.

    Returns ``(estimate, std_error)``. Each shard draws from its own Philox
    stream spawned from ``seed``, so the result is a deterministic function of
    ``(seed, samples, shards)``.
    """
    r = float(r)
    if samples < 1000:
        raise DomainError(f"Monte Carlo needs at least 1000 samples, got {samples}")
    if not (r >= 0.0 and math.isfinite(r)):
        raise DomainError(f"ball radius must be nonnegative and finite, got {r!r}")
    if shards < 1:
        raise DomainError("shards must be >= 1")
    if r == 0.0:
        return 0.0, 0.0
    L = T.periods
    x = T.origin() if center is None else np.mod(_check_points(T, center), L)
    r2 = r * r

    counts = [samples // shards + (1 if s < samples % shards else 0) for s in range(shards)]
    streams = np.random.SeedSequence(seed).spawn(shards)
    hits = 0
    for n_shard, ss in zip(counts, streams):
        rng = np.random.Generator(np.random.Philox(ss))
        left = n_shard
        while left > 0:
            m = min(left, _CHUNK)
            hits += int(_count_hits(rng.random((m, T.dim)), x, L, r2))
            left -= m

    V = T.volume
    p = hits / samples
    return V * p, V * math.sqrt(p * (1.0 - p) / samples)


def euclidean_ball_volume(n: int, r: float) -> float:
    """Volume omega_n * r^n of the Euclidean n-ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r**n


def grid_pool(T: FlatTorus, fill: float, seed: int = 0, max_points: int = 400_000):
    """Shifted product grid on ``T`` whose fill distance is at most ``fill``.

    Returns ``(points, fill_bound)`` where every point of the torus lies
    within ``fill_bound`` of some grid point.
    """
    L = T.periods
    g = fill / math.sqrt(T.dim)
    m = np.maximum(1, np.ceil(L / (2.0 * g))).astype(int)
    if int(np.prod(m)) > max_points:
        raise DomainError(
            f"candidate grid would need {int(np.prod(m))} points (limit {max_points}); "
            "increase eps"
        )
    shift = np.random.Generator(np.random.Philox(seed)).random(T.dim) * L / m
    axes = [shift[j] + L[j] * np.arange(m[j]) / m[j] for j in range(T.dim)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, T.dim)
    bound = float(np.sqrt(np.sum((L / (2.0 * m)) ** 2)))
    return pts, bound
