import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbgrid.datasets import (
    LINDSTROM_M0,
    P1,
    SHAPES,
    OrbitSpec,
    RandomPdSpec,
    lindstrom_K,
    lindstrom_orbit,
    perturbed_point,
    random_count,
    random_pd,
    sample_shape,
)


def test_random_pd_validity_and_size():
    pd = random_pd(RandomPdSpec(0.02, 50, seed=4))
    assert len(pd) == 50
    P = pd.points
    assert np.all((0 <= P[:, 0]) & (P[:, 0] <= P[:, 1]) & (P[:, 1] <= 1))
    # points hug the diagonal: |y| > 6 has negligible probability
    assert np.all(pd.persistence <= 0.02 * 6)


@given(st.floats(0.01, 2.0), st.integers(0, 300), st.integers(0, 2**31))
def test_random_pd_constraint_holds(tau, count, seed):
    pd = random_pd(RandomPdSpec(tau, count, seed))
    assert len(pd) == count
    assert np.all(pd.births >= 0) and np.all(pd.deaths <= 1)


def test_random_pd_midpoints_uniform():
    pd = random_pd(RandomPdSpec(0.02, 4000, seed=0))
    mid = (pd.births + pd.deaths) / 2
    assert abs(mid.mean() - 0.5) < 0.02
    # half-width tau|y|/2 with |y| half-normal: mean tau*sqrt(2/pi)/2
    assert np.mean(pd.persistence) == pytest.approx(0.02 * math.sqrt(2 / math.pi), rel=0.05)


def test_random_pd_deterministic():
    a = random_pd(RandomPdSpec(1.0, 200, seed=7))
    assert a == random_pd(RandomPdSpec(1.0, 200, seed=7))
    assert a != random_pd(RandomPdSpec(1.0, 200, seed=8))


def test_random_pd_spec_validation():
    with pytest.raises(ValueError):
        RandomPdSpec(0.0, 5)
    with pytest.raises(ValueError):
        RandomPdSpec(0.1, -1)


def test_random_count_rounding():
    counts = [random_count(np.random.default_rng(s)) for s in range(300)]
    assert all(isinstance(c, int) and c >= 1 for c in counts)
    assert abs(np.mean(counts) - 200) < 2.5
    assert random_count(np.random.default_rng(0), mean=-50, std=0.001) == 1


def test_perturbed_point_close():
    pd = perturbed_point(P1, 0.02, 3)
    assert len(pd) == 1 and np.max(np.abs(pd.points[0] - P1)) <= 0.02


def test_circle_geometry():
    pts = sample_shape("circle", 500, 0.0, seed=1)
    np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1]), 0.4, atol=1e-12)


def test_shape_layouts():
    r = np.hypot(*sample_shape("concentric", 100, seed=2).T)
    assert np.sum(np.isclose(r, 0.2)) == 50 and np.sum(np.isclose(r, 0.4)) == 50
    tc = sample_shape("two_circles", 100, seed=3)
    d = np.minimum(np.hypot(tc[:, 0] + 0.25, tc[:, 1]), np.hypot(tc[:, 0] - 0.25, tc[:, 1]))
    np.testing.assert_allclose(d, 0.2, atol=1e-12)
    cl = sample_shape("two_clusters", 100, seed=4)
    assert np.all((cl[:50] <= 0).all(axis=1)) and np.all((cl[50:] >= 0).all(axis=1))


@pytest.mark.parametrize("kind", SHAPES)
def test_shapes_inside_square_and_sized(kind):
    pts = sample_shape(kind, 1000, 0.0, seed=5)
    assert pts.shape == (1000, 2)
    assert np.all(np.abs(pts) <= 0.5)


def test_noise_level():
    clean = sample_shape("circle", 5000, 0.0, seed=6)
    noisy = sample_shape("circle", 5000, 0.025, seed=6)
    assert np.std(noisy - clean) == pytest.approx(0.025, rel=0.05)


def test_shape_errors_and_determinism():
    with pytest.raises(ValueError):
        sample_shape("torus", 10)
    with pytest.raises(ValueError):
        sample_shape("circle", 0)
    assert np.array_equal(sample_shape("cluster", 20, 0.1, 9), sample_shape("cluster", 20, 0.1, 9))


def test_K():
    assert lindstrom_K(0.0) == 1.0
    assert lindstrom_K(1.0) == pytest.approx(1 - math.exp(-1))
    assert lindstrom_K(1e-12) == pytest.approx(1.0)


def test_orbit_reduces_to_one_dimensional_map():
    M0, x = 3.3, 1.5
    orbit = lindstrom_orbit(OrbitSpec(M0, initial=(x, 0.0, 0.0), iterations=5))
    for row in orbit:
        x = M0 * x / (1 + x)
        assert row[0] == pytest.approx(x, rel=1e-15)
        assert row[1] == 0 and row[2] == 0


@given(st.floats(1.0, 4.0), st.floats(0.01, 5.0), st.integers(1, 50))
def test_zero_predator_plane_is_invariant(M0, x0, n):
    orbit = lindstrom_orbit(OrbitSpec(M0, initial=(x0, 0.0, 0.0), iterations=n))
    assert np.all(orbit[:, 1:] == 0)


def test_orbit_length_and_initial_draw():
    orbit = lindstrom_orbit(OrbitSpec(3.48, seed=11))
    assert orbit.shape == (2000, 3)
    assert np.all(np.isfinite(orbit))
    a = lindstrom_orbit(OrbitSpec(3.48, seed=11, iterations=1))
    b = lindstrom_orbit(OrbitSpec(3.48, seed=11, iterations=3))
    assert np.array_equal(a[0], b[0])


@pytest.mark.parametrize("M0", LINDSTROM_M0)
def test_all_parameters_stay_finite(M0):
    assert np.all(np.isfinite(lindstrom_orbit(OrbitSpec(M0, seed=0))))


def test_overflow_reports_step():
    with pytest.raises(FloatingPointError, match="step"):
        lindstrom_orbit(OrbitSpec(3.0, M2=1e200, initial=(1.5, 0.5, 0.5), iterations=50))
    with pytest.raises(ValueError):
        OrbitSpec(3.0, iterations=0)
