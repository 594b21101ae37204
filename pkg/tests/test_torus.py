import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collapse_lab import DomainError, FlatTorus, UnsupportedDimensionError
from collapse_lab.geometry import ball_volume, criterion_ratio, torus_ball_volume_exact, torus_ball_volume_mc
from collapse_lab.geometry.torus import euclidean_ball_volume, grid_pool, torus_distance, wrap_offsets
from oracles import lattice_shift_distance

radius = st.floats(0.01, 3.0)


def test_rejects_bad_radii():
    for bad in ([], [0.0], [-1.0], [math.inf], [math.nan]):
        with pytest.raises(DomainError):
            FlatTorus(bad)


def test_basic_invariants():
    T = FlatTorus((1.0, 0.1))
    assert T.dim == 2
    assert T.injectivity_radius == math.pi * 0.1
    assert T.volume == pytest.approx(4 * math.pi**2 * 0.1, rel=1e-15)


@pytest.mark.parametrize(
    "radii, expected",
    [((1.0, 0.1), math.pi / 10), ((1 / 100, 1 / 10), math.pi / 100), ((1.0,), math.pi)],
)
def test_injectivity_radius(radii, expected):
    assert FlatTorus(radii).injectivity_radius == pytest.approx(expected, rel=1e-15)


def test_distance_trivial_cases():
    T = FlatTorus((1.0, 1.0))
    assert torus_distance(T, (0, 0), (0, 0)) == 0.0
    assert torus_distance(T, (0, 0), (math.pi, 0)) == pytest.approx(math.pi, abs=1e-15)


def test_distance_matches_lattice_shift_oracle():
    T = FlatTorus((1.0, 0.01))
    d = torus_distance(T, (0.0, 0.0), (0.3, 0.05))
    assert d == pytest.approx(lattice_shift_distance(T.radii, (0, 0), (0.3, 0.05)), abs=1e-14)
    # frozen oracle output: the second coordinate wraps once (period 0.0628...)
    assert d == pytest.approx(0.3002743020194305, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(radii=st.lists(radius, min_size=1, max_size=3), data=st.data())
def test_distance_agrees_with_brute_force(radii, data):
    T = FlatTorus(radii)
    coords = st.lists(st.floats(-20, 20), min_size=T.dim, max_size=T.dim)
    x, y = data.draw(coords), data.draw(coords)
    L = T.periods
    # the oracle wants the raw offset folded into a single period
    x0 = np.mod(x, L)
    y0 = np.mod(y, L)
    assert torus_distance(T, x, y) == pytest.approx(lattice_shift_distance(radii, x0, y0, 1), abs=1e-9)


def test_metric_axioms_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        T = FlatTorus(rng.uniform(0.05, 2.0, size=rng.integers(1, 4)))
        x, y, z = (rng.uniform(0, 1, T.dim) * T.periods for _ in range(3))
        dxy, dyx = torus_distance(T, x, y), torus_distance(T, y, x)
        assert dxy == dyx
        assert torus_distance(T, x, z) <= dxy + torus_distance(T, y, z) + 1e-12


def test_distance_dimension_mismatch():
    with pytest.raises(DomainError):
        torus_distance(FlatTorus((1.0, 1.0)), (0, 0, 0), (0, 0))


def test_distance_broadcasts():
    T = FlatTorus((1.0, 1.0))
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    d = torus_distance(T, [0.0, 0.0], pts)
    assert d.shape == (3,)
    np.testing.assert_allclose(d, [0.0, 1.0, 2.0])
    assert np.all(wrap_offsets(T, [0, 0], pts) <= math.pi)


# -- exact ball volume ---------------------------------------------------------

def test_full_volume_when_ball_covers():
    T = FlatTorus((1.0, 1.0))
    assert torus_ball_volume_exact(T, T.diameter) == T.volume
    assert torus_ball_volume_exact(T, 100.0) == pytest.approx(4 * math.pi**2, rel=1e-15)


def test_shrinking_member_is_saturated():
    j = 10
    T = FlatTorus((1 / j**2, 1 / j))
    assert torus_ball_volume_exact(T, 0.5) == pytest.approx(4 * math.pi**2 / j**3, rel=1e-14)


def test_exact_matches_monte_carlo_oracle():
    T = FlatTorus((1.0, 0.01))
    exact = torus_ball_volume_exact(T, 0.5)
    est, se = torus_ball_volume_mc(T, 0.5, samples=10**7, seed=11)
    assert abs(exact - est) <= 3 * se
    # frozen once the sampling oracle agreed; leading order is 2r * 2 pi * 0.01
    assert exact == pytest.approx(0.06279048685339672, rel=1e-12)


def test_exact_matches_mc_thin_torus():
    T = FlatTorus((1.0, 1 / 50))
    est, se = torus_ball_volume_mc(T, 0.5, samples=10**6, seed=3)
    assert abs(torus_ball_volume_exact(T, 0.5) - est) <= 3 * se


@settings(max_examples=60, deadline=None)
@given(a=st.floats(0.05, 2.0), b=st.floats(0.05, 2.0), t=st.floats(0.0, 1.0))
def test_exact_area_against_grid_count(a, b, t):
    # midpoint-rule count of the wrapped ball on a fine grid of the fundamental domain
    T = FlatTorus((a, b))
    r = t * T.diameter
    n = 400
    u = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(u * T.periods[0], u * T.periods[1], indexing="ij")
    inside = torus_distance(T, [0.0, 0.0], np.stack([X, Y], -1)) < r
    grid = inside.mean() * T.volume
    # boundary cells dominate the discretisation error
    tol = 2 * math.pi * r * math.hypot(*T.periods) / n + 1e-12
    assert torus_ball_volume_exact(T, r) == pytest.approx(grid, abs=tol)


def test_exact_rejects_high_dimension():
    with pytest.raises(UnsupportedDimensionError):
        torus_ball_volume_exact(FlatTorus((1.0, 1.0, 1.0)), 0.5)


def test_zero_radius():
    T = FlatTorus((1.0, 0.5))
    assert torus_ball_volume_exact(T, 0.0) == 0.0
    assert criterion_ratio(T, 0.0) == 0.0
    assert torus_ball_volume_mc(T, 0.0, samples=1000)[0] == 0.0


def test_circle_volume():
    T = FlatTorus((1.0,))
    assert torus_ball_volume_exact(T, 0.5) == 1.0
    assert torus_ball_volume_exact(T, 10.0) == pytest.approx(2 * math.pi)


@settings(max_examples=100, deadline=None)
@given(radii=st.lists(radius, min_size=1, max_size=2), frac=st.floats(0.0, 0.999), s=st.floats(0.1, 10.0))
def test_scaling_law(radii, frac, s):
    T = FlatTorus(radii)
    r = frac * 2 * T.diameter
    sT = T.scaled(s)
    n = T.dim
    assert sT.injectivity_radius == pytest.approx(s * T.injectivity_radius, rel=1e-15)
    assert torus_ball_volume_exact(sT, s * r) == pytest.approx(s**n * torus_ball_volume_exact(T, r), rel=1e-11, abs=1e-300)
    if r > 0:
        assert criterion_ratio(sT, s * r) == pytest.approx(s ** (n - 1) * criterion_ratio(T, r), rel=1e-11)


@settings(max_examples=100, deadline=None)
@given(radii=st.lists(radius, min_size=1, max_size=2), frac=st.floats(0.0, 1.0, exclude_max=True))
def test_euclidean_regime_exact(radii, frac):
    T = FlatTorus(radii)
    r = frac * T.injectivity_radius
    assert torus_ball_volume_exact(T, r) == pytest.approx(euclidean_ball_volume(T.dim, r), rel=1e-15, abs=0)


def test_euclidean_regime_monte_carlo_3d():
    T = FlatTorus((1.0, 1.0, 1.0))
    est, se = torus_ball_volume_mc(T, 0.1, samples=10**6, seed=5)
    assert abs(est - 4 / 3 * math.pi * 0.1**3) <= 3 * se


def test_monte_carlo_saturated_has_zero_error():
    T = FlatTorus((1.0, 1.0))
    est, se = torus_ball_volume_mc(T, 10.0, samples=10_000)
    assert est == pytest.approx(4 * math.pi**2, rel=1e-15)
    assert se == 0.0


def test_monte_carlo_is_deterministic_per_seed_and_shards():
    T = FlatTorus((1.0, 0.2))
    a = torus_ball_volume_mc(T, 0.7, samples=50_000, seed=9, shards=4)
    b = torus_ball_volume_mc(T, 0.7, samples=50_000, seed=9, shards=4)
    c = torus_ball_volume_mc(T, 0.7, samples=50_000, seed=10, shards=4)
    assert a == b
    assert a != c


def test_monte_carlo_argument_checks():
    T = FlatTorus((1.0,))
    with pytest.raises(DomainError):
        torus_ball_volume_mc(T, 0.5, samples=999)
    with pytest.raises(DomainError):
        torus_ball_volume_mc(T, 0.5, samples=1000, shards=0)


def test_homogeneity():
    rng = np.random.default_rng(1)
    T = FlatTorus((1.0, 0.3))
    vols = [torus_ball_volume_mc(T, 0.8, 200_000, seed=2, center=rng.uniform(0, 1, 2) * T.periods) for _ in range(10)]
    ref = torus_ball_volume_exact(T, 0.8)
    for est, se in vols:
        assert abs(est - ref) <= 4 * se


def test_ball_volume_dispatch():
    T = FlatTorus((1.0, 0.1))
    assert ball_volume(T, 0.4) == torus_ball_volume_exact(T, 0.4)
    assert ball_volume(T, 0.4, "monte_carlo", samples=10_000, seed=1) == torus_ball_volume_mc(T, 0.4, 10_000, 1)[0]
    with pytest.raises(DomainError):
        ball_volume(T, 0.4, "simpson")
    with pytest.raises(DomainError):
        criterion_ratio(T, -1.0)


def test_ratio_of_shrinking_torus():
    j = 10
    assert criterion_ratio(FlatTorus((1 / j**2, 1 / j)), 1.0) == pytest.approx(4 * math.pi / j, rel=1e-12)


def test_ratio_of_thin_torus_monte_carlo():
    T = FlatTorus((1.0, 1 / 100))
    assert criterion_ratio(T, 0.5, "monte_carlo", samples=10**6, seed=0) == pytest.approx(2.0, rel=0.05)


def test_grid_pool_fill_bound():
    T = FlatTorus((1.0, 0.4))
    pts, bound = grid_pool(T, 0.3, seed=4)
    assert bound <= 0.3 + 1e-12
    probes = np.random.default_rng(0).uniform(0, 1, (2000, 2)) * T.periods
    gaps = [torus_distance(T, p, pts).min() for p in probes]
    assert max(gaps) <= bound + 1e-12
    with pytest.raises(DomainError):
        grid_pool(T, 1e-4, max_points=1000)
