"""Finite metric spaces, epsilon-nets of model manifolds, Gromov-Hausdorff distance."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SizeLimitError
from .geometry import BergerSphere, FlatTorus, Member, distance
from .geometry import berger as _berger
from .geometry import torus as _torus

EXACT_LIMIT = 6
TRIANGLE_TOL = 1e-9
_TRIANGLE_CHECK_MAX = 256


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    labels: tuple
    dist: np.ndarray
    check_triangle: bool | None = field(default=None, repr=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        labels = tuple(self.labels)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DomainError(f"distance matrix must be square, got shape {d.shape}")
        if len(labels) != d.shape[0]:
            raise DomainError(f"{len(labels)} labels for a {d.shape[0]}-point space")
        if len(set(labels)) != len(labels):
            raise DomainError("labels must be distinct")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise DomainError("distances must be finite and nonnegative")
        if not np.array_equal(d, d.T):
            raise DomainError("distance matrix must be exactly symmetric")
        if np.any(np.diag(d) != 0):
            raise DomainError("distance matrix must have a zero diagonal")
        check = self.check_triangle
        if check is None:
            check = len(labels) <= _TRIANGLE_CHECK_MAX
        if check:
            for k in range(len(labels)):
                if np.any(d > d[:, k : k + 1] + d[k : k + 1, :] + TRIANGLE_TOL):
                    raise DomainError("distance matrix violates the triangle inequality")
        d.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", d)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if len(self) else 0.0

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMetricSpace":
        try:
            return cls(tuple(data["labels"]), np.asarray(data["dist"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed metric space: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "FiniteMetricSpace":
        return cls.from_dict(json.loads(text))

    @classmethod
    def point(cls) -> "FiniteMetricSpace":
        return cls(("p0",), np.zeros((1, 1)))


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    """A net on a model manifold together with an upper bound on its covering radius."""

    space: FiniteMetricSpace
    points: np.ndarray
    covering_radius: float
    eps: float
    complete: bool

    def __len__(self) -> int:
        return len(self.space)


def _pool(member: Member, fill: float, seed: int):
    if isinstance(member, FlatTorus):
        return _torus.grid_pool(member, fill, seed)
    if isinstance(member, BergerSphere):
        return _berger.grid_pool(member, fill, seed)
    raise TypeError(f"unsupported manifold {member!r}")


def epsilon_net(
    member: Member,
    eps: float,
    seed: int = 0,
    max_points: int = 5000,
    *,
    pool_fill: float | None = None,
) -> EpsilonNet:
    """Greedy farthest-point net, run over a candidate grid with certified fill distance.

    The covering radius reported is the largest pool-to-net distance plus the
    pool's fill bound (capped by the diameter), so it bounds the covering radius
    of the whole manifold, not just of the pool. If ``max_points`` is reached
    first the net is returned with ``complete=False``.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    if max_points < 1:
        raise DomainError("max_points must be >= 1")
    diam = member.diameter
    fill = pool_fill if pool_fill is not None else min(eps, diam) / 3.0
    pool, fill_bound = _pool(member, fill, seed)
    rng = np.random.Generator(np.random.Philox(seed))

    chosen = [int(rng.integers(len(pool)))]
    gap = np.asarray(distance(member, pool[chosen[0]], pool), dtype=float)
    cover = min(float(gap.max()) + fill_bound, diam)
    while cover > eps and len(chosen) < max_points:
        nxt = int(np.argmax(gap))
        chosen.append(nxt)
        np.minimum(gap, distance(member, pool[nxt], pool), out=gap)
        cover = min(float(gap.max()) + fill_bound, diam)

    pts = pool[chosen]
    n = len(chosen)
    D = np.zeros((n, n))
    for a in range(1, n):
        D[a, :a] = distance(member, pts[a], pts[:a])
    D = D + D.T
    space = FiniteMetricSpace(tuple(f"p{a}" for a in range(n)), D, check_triangle=False)
    return EpsilonNet(space, pts, cover, float(eps), cover <= eps)


# -- Gromov-Hausdorff ---------------------------------------------------------

def _as_space(X) -> FiniteMetricSpace:
    return X.space if isinstance(X, EpsilonNet) else X


def gh_distance_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Exact d_GH = (1/2) min over correspondences of the distortion.

    Every correspondence contains one of the form graph(f) u graph(g)^T with
    f: X -> Y and g: Y -> X, and shrinking a correspondence never increases
    its distortion, so the search runs over such pairs (f, g), assigning one
    value at a time and abandoning a branch once it reaches the incumbent.
    """
    X, Y = _as_space(X), _as_space(Y)
    n, m = len(X), len(Y)
    if n == 0 or m == 0:
        raise DomainError("metric spaces must be nonempty")
    if n > EXACT_LIMIT or m > EXACT_LIMIT:
        raise SizeLimitError(
            f"exact GH distance supports at most {EXACT_LIMIT} points per space, "
            f"got {n} and {m}; use gh_lower_bound"
        )
    dX, dY = X.dist, Y.dist
    # pair p = (a, b) has index a*m + b
    pa = np.repeat(np.arange(n), m)
    pb = np.tile(np.arange(m), n)
    cost = np.abs(dX[pa][:, pa] - dY[pb][:, pb]).tolist()

    # variables: each a in X picks a partner in Y, each b in Y picks a partner in X
    domains = [[a * m + b for b in range(m)] for a in range(n)]
    domains += [[a * m + b for a in range(n)] for b in range(m)]

    best = max(max(row) for row in cost)  # the full product X x Y
    chosen: list[int] = []

    def search(level: int, cur: float) -> None:
        nonlocal best
        if level == len(domains):
            best = cur
            return
        options = []
        for p in domains[level]:
            row = cost[p]
            worst = cur
            for q in chosen:
                if row[q] > worst:
                    worst = row[q]
                    if worst >= best:
                        break
            if worst < best:
                options.append((worst, p))
        options.sort()
        for worst, p in options:
            if worst >= best:
                break
            chosen.append(p)
            search(level + 1, worst)
            chosen.pop()

    search(0, 0.0)
    return 0.5 * best


def _hausdorff_1d(A: np.ndarray, B: np.ndarray) -> float:
    """Hausdorff distance between two finite sorted sets of reals."""

    def directed(P, Q):
        idx = np.clip(np.searchsorted(Q, P), 1, len(Q) - 1) if len(Q) > 1 else np.zeros(len(P), int)
        near = np.abs(P - Q[idx])
        if len(Q) > 1:
            near = np.minimum(near, np.abs(P - Q[idx - 1]))
        return float(near.max())

    return max(directed(A, B), directed(B, A))


def gh_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Lower bound on d_GH from distance profiles.

    If (x, y) lies in a correspondence R, every distance from x is within
    dis(R) of some distance from y and vice versa. Hence half the Hausdorff
    distance between the row sets {d(x, .)} and {d(y, .)}, minimised over y and
    maximised over x (and symmetrically), is a lower bound. The diameter gap is
    included as well.
    """
    X, Y = _as_space(X), _as_space(Y)
    if len(X) == 0 or len(Y) == 0:
        raise DomainError("metric spaces must be nonempty")
    diam_term = 0.5 * abs(X.diameter - Y.diameter)
    rows_x = [np.unique(r) for r in X.dist]
    rows_y = [np.unique(r) for r in Y.dist]
    H = np.array([[_hausdorff_1d(rx, ry) for ry in rows_y] for rx in rows_x])
    local = 0.5 * max(H.min(axis=1).max(), H.min(axis=0).max())
    return max(diam_term, local)


def gh_distance(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> tuple[float, bool]:
    """``(value, is_exact)``: exact when both spaces are small enough, else the lower bound."""
    X, Y = _as_space(X), _as_space(Y)
    if len(X) <= EXACT_LIMIT and len(Y) <= EXACT_LIMIT:
        return gh_distance_exact(X, Y), True
    return gh_lower_bound(X, Y), False


def random_metric_space(n: int, rng: np.random.Generator, dim: int = 2) -> FiniteMetricSpace:
    """Euclidean distances between ``n`` random points; handy for tests and demos."""
    pts = rng.random((n, dim))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(tuple(f"x{a}" for a in range(n)), d)
