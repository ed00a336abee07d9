import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.spatial.distance import pdist, squareform

from layers.Embed import embed
from utils.chaos import (correlation_dimension, correlation_dimension_points, correlation_sum, longest_linear_run,
                         lyapunov)
from utils.exceptions import EstimationError, SignalError


def logistic(n, r=4.0, x0=0.4, transient=100):
    x = np.empty(n + transient)
    x[0] = x0
    for k in range(1, n + transient):
        x[k] = r * x[k - 1] * (1 - x[k - 1])
    return x[transient:]


def henon(n, a=1.4, b=0.3, transient=100):
    xy = np.empty((n + transient, 2))
    xy[0] = (0.1, 0.1)
    for k in range(1, n + transient):
        x, y = xy[k - 1]
        xy[k] = (1 - a * x * x + y, b * x)
    return xy[transient:]


def test_embed_layout():
    e = embed(np.arange(10.0), 3, 2)
    assert len(e) == 6
    assert_array_equal(e.points[0], [0, 2, 4])
    assert_array_equal(e.points[-1], [5, 7, 9])
    assert embed(np.arange(5.0), 1, 1).points.shape == (5, 1)


@pytest.mark.parametrize('m, d, n', [(0, 1, 10), (3, 0, 10), (4, 3, 9)])
def test_embed_rejects(m, d, n):
    with pytest.raises(SignalError):
        embed(np.arange(float(n)), m, d)


def test_longest_linear_run_picks_longest_segment():
    x = np.arange(20.0)
    y = np.where(x < 10, x, 9 + 5 * (x - 9))
    assert longest_linear_run(x, y) == (10, 19)
    assert longest_linear_run([0.0, 1.0], [0.0, 3.0]) == (0, 1)
    with pytest.raises(EstimationError):
        longest_linear_run([0.0], [0.0])


def test_logistic_map_exponent():
    x = logistic(5000)
    pinned = lyapunov(x, m=3, d=1, theiler_window=10, fit_range=(1, 5))
    assert 0.62 <= pinned.lambda_per_sample <= 0.76
    assert pinned.reliable
    auto = lyapunov(x, m=3, d=1, theiler_window=10)
    assert 0.5 <= auto.lambda_per_sample <= 0.85
    assert auto.fit_range[0] < auto.fit_range[1]


def test_sine_exponent_vanishes():
    n = np.arange(3000)
    x = np.sin(2 * np.pi * n / 50.3137)
    le = lyapunov(x, m=3, d=1, theiler_window=10, fit_range=(0, 20))
    assert abs(le.lambda_per_sample) < 0.01


def test_per_second_scaling():
    x = logistic(2000)
    a = lyapunov(x, sample_rate_Hz=1.0, fit_range=(0, 5))
    b = lyapunov(x, sample_rate_Hz=1000.0, fit_range=(0, 5))
    assert b.lambda_per_second == pytest.approx(1000.0 * a.lambda_per_sample)
    assert b.lambda_per_sample == a.lambda_per_sample


def test_white_noise_exponent_is_not_reliable(rng):
    le = lyapunov(rng.normal(size=2000), m=3, d=1, theiler_window=10)
    assert not le.reliable


def test_lyapunov_invariant_to_affine_rescaling():
    x = logistic(2000)
    a = lyapunov(x, fit_range=(0, 5))
    b = lyapunov(3.5 * x - 2.0, fit_range=(0, 5))
    assert b.lambda_per_sample == pytest.approx(a.lambda_per_sample, abs=1e-6)
    c = lyapunov(4.0 * x, fit_range=(0, 5))
    assert c.lambda_per_sample == pytest.approx(a.lambda_per_sample, abs=1e-9)


def test_lyapunov_errors(rng):
    with pytest.raises(EstimationError):
        lyapunov(np.ones(500))
    with pytest.raises(EstimationError):
        lyapunov(rng.normal(size=50))
    with pytest.raises(EstimationError):
        lyapunov(rng.normal(size=500), fit_range=(5, 100))
    with pytest.raises(EstimationError):
        lyapunov(np.array([0.0, np.inf] * 300))


def test_correlation_sum_matches_brute_force(rng):
    points = rng.normal(size=(60, 2))
    radii = np.array([0.1, 0.5, 1.0, 2.0])
    dist = squareform(pdist(points))
    i, j = np.triu_indices(60, k=1)
    for window in (0, 3):
        keep = (j - i) > window
        expected = np.array([np.sum(dist[i[keep], j[keep]] < r) for r in radii])
        counts, corr = correlation_sum(points, radii, window)
        assert_array_equal(counts, expected)
        assert_allclose(corr, expected / keep.sum())


def test_correlation_sum_excludes_pairs_at_the_radius():
    points = np.arange(5.0)[:, None]
    counts, corr = correlation_sum(points, np.array([1.0, 1.5, 2.0, 2.5]))
    assert_array_equal(counts, [0, 4, 4, 7])
    assert_allclose(corr, np.array([0, 4, 4, 7]) / 10)
    counts, corr = correlation_sum(points, np.array([1.0, 2.0, 2.5]), theiler_window=1)
    assert_array_equal(counts, [0, 0, 3])
    assert_allclose(corr, np.array([0, 0, 3]) / 6)


def test_correlation_sum_monotone(rng):
    points = embed(rng.normal(size=1000), 3, 1).points
    _, corr = correlation_sum(points, np.logspace(-2, 1, 30), 5)
    assert np.all(np.diff(corr) >= 0)
    assert corr[-1] <= 1.0


def test_line_segment_dimension(rng):
    t = rng.random(2000)
    points = np.column_stack([t, 2 * t + 1])
    assert correlation_dimension_points(points).cd == pytest.approx(1.0, abs=0.1)


def test_gaussian_noise_fills_the_embedding(rng):
    cd = correlation_dimension(rng.normal(size=3000), m=3, d=1, theiler_window=5)
    assert cd.cd == pytest.approx(3.0, abs=0.3)


@pytest.mark.slow
def test_henon_attractor_dimension():
    cd = correlation_dimension(henon(10000)[:, 0], m=3, d=1)
    assert cd.cd == pytest.approx(1.21, abs=0.1)


def test_dimension_invariant_to_affine_rescaling(rng):
    x = logistic(2000)
    a = correlation_dimension(x, m=2, d=1, theiler_window=5)
    b = correlation_dimension(10.0 * x + 3.0, m=2, d=1, theiler_window=5)
    assert b.cd == pytest.approx(a.cd, abs=0.02)


def test_theiler_window_on_a_sine():
    n = np.arange(2000)
    x = np.sin(2 * np.pi * n / 41.3137)
    plain = correlation_dimension(x, m=3, d=1, theiler_window=0)
    windowed = correlation_dimension(x, m=3, d=1, theiler_window=10)
    assert abs(windowed.cd - plain.cd) < 0.2
    assert windowed.cd == pytest.approx(1.0, abs=0.2)


def test_pinned_scaling_range(rng):
    t = rng.random(1000)
    points = np.column_stack([t, t])
    cd = correlation_dimension_points(points, scaling_range=(0.01, 0.1))
    assert 0.01 <= cd.scaling_range[0] <= cd.scaling_range[1] <= 0.1
    with pytest.raises(EstimationError):
        correlation_dimension_points(points, scaling_range=(10.0, 20.0))


def test_dimension_errors(rng):
    with pytest.raises(EstimationError):
        correlation_dimension(np.zeros(500))
    with pytest.raises(EstimationError):
        correlation_dimension_points(rng.normal(size=(100, 2)))
    with pytest.raises(EstimationError):
        correlation_dimension_points(np.ones((300, 2)))
