"""
Nonlinear features of scalar series: largest Lyapunov exponent from the mean
divergence of nearest neighbours (Rosenstein) and correlation dimension from
the scaling of the correlation sum (Grassberger-Procaccia).

Both estimators fit a straight line over an automatically chosen range: the
longest contiguous run of the curve whose local slopes stay within a relative
band around their mean. Callers may pin the range instead.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from layers.Embed import embed
from utils.exceptions import EstimationError


@dataclass
class LeEstimate:
    lambda_per_sample: float
    lambda_per_second: float
    fit_range: tuple
    divergence_curve: np.ndarray
    r2: float
    reliable: bool
    theiler_window: int = 0


@dataclass
class CdEstimate:
    cd: float
    radii: np.ndarray
    corr_sums: np.ndarray
    scaling_range: tuple
    slope_r2: float
    reliable: bool = True
    pair_counts: np.ndarray = field(default=None, repr=False)

    @property
    def log_radii(self):
        return np.log(self.radii)

    @property
    def log_corr_sums(self):
        return np.log(self.corr_sums)


def longest_linear_run(x, y, rel_tol=0.15, abs_tol=0.02, min_points=2):
    """
    [i, j] (inclusive point indices) of the longest run whose local slopes all
    lie within max(rel_tol * |mean slope|, abs_tol) of the run's mean slope.
    Ties go to the earliest run.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if n < min_points or n < 2:
        raise EstimationError(f'need at least {max(min_points, 2)} points for a fit, got {n}')
    if n == 2:
        return 0, 1
    slopes = np.gradient(y, x)
    best = (0, min(n, min_points) - 1)
    for i in range(n - 1):
        for j in range(n - 1, i, -1):
            if j - i <= best[1] - best[0]:
                break
            s = slopes[i:j + 1]
            mean = s.mean()
            if np.max(np.abs(s - mean)) <= max(rel_tol * abs(mean), abs_tol):
                best = (i, j)
                break
    return best


def _check_variance(x):
    if not np.all(np.isfinite(x)):
        raise EstimationError('non-finite input')
    if np.ptp(x) == 0:
        raise EstimationError('zero-variance input')


def divergence_curve(points, max_steps, theiler_window, chunk=1024):
    """Mean log distance between each point and its nearest neighbour after 0..max_steps steps."""
    n = points.shape[0] - max_steps
    if n < 2:
        raise EstimationError('too few points for the requested number of divergence steps')
    base = points[:n]
    nn = np.empty(n, dtype=int)
    idx = np.arange(n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        dist = cdist(base[start:stop], base)
        rows = np.arange(start, stop)
        dist[np.abs(rows[:, None] - idx[None, :]) <= theiler_window] = np.inf
        nn[start:stop] = np.argmin(dist, axis=1)
        if not np.all(np.isfinite(dist[np.arange(stop - start), nn[start:stop]])):
            raise EstimationError('no neighbour outside the Theiler window')

    curve = np.empty(max_steps + 1)
    for k in range(max_steps + 1):
        d = np.linalg.norm(points[idx + k] - points[nn + k], axis=1)
        logs = np.log(d[d > 0])
        curve[k] = logs.mean() if logs.size else np.nan
    return curve


def lyapunov(signal, m=3, d=1, sample_rate_Hz=1.0, theiler_window=10, fit_range='auto',
             max_steps=20, rel_tol=0.15, abs_tol=0.02, min_r2=0.9, min_run=4):
    """
    Largest Lyapunov exponent. The divergence curve is cut where it first
    reaches 90 % of its total rise (saturation), then fitted over the longest
    near-linear run unless ``fit_range`` pins (i_min, i_max).
    """
    x = np.asarray(signal, dtype=float)
    _check_variance(x)
    points = embed(x, m, d).points
    if points.shape[0] < 100:
        raise EstimationError(f'lyapunov needs at least 100 embedded points, got {points.shape[0]}')
    max_steps = min(int(max_steps), points.shape[0] // 4)

    curve = divergence_curve(points, max_steps, int(theiler_window))
    steps = np.arange(curve.shape[0], dtype=float)
    valid = np.isfinite(curve)
    if valid.sum() < 2:
        raise EstimationError('divergence curve has fewer than 2 finite values')

    if fit_range == 'auto':
        finite = np.flatnonzero(valid)
        y = curve[finite]
        rise = y.max() - y[0]
        stop = len(y) - 1
        if rise > 0:
            stop = max(1, int(np.argmax(y >= y[0] + 0.9 * rise)))
        xs, ys = steps[finite][:stop + 1], y[:stop + 1]
        i, j = longest_linear_run(xs, ys, rel_tol, abs_tol)
        lo, hi = int(xs[i]), int(xs[j])
    else:
        lo, hi = int(fit_range[0]), int(fit_range[1])
        if not 0 <= lo < hi < curve.shape[0]:
            raise EstimationError(f'fit range {fit_range} outside the divergence curve')

    sel = valid & (steps >= lo) & (steps <= hi)
    if sel.sum() < 2:
        raise EstimationError('fit range holds fewer than 2 finite points')
    fit = stats.linregress(steps[sel], curve[sel])
    r2 = float(fit.rvalue ** 2) if np.isfinite(fit.rvalue) else 0.0
    reliable = r2 >= min_r2 and sel.sum() >= min_run
    slope = float(fit.slope)
    return LeEstimate(slope, slope * sample_rate_Hz, (lo, hi), curve, r2, bool(reliable), int(theiler_window))


def _theiler_distances(points, theiler_window):
    if theiler_window <= 0:
        return np.empty(0)
    lags = range(1, min(theiler_window, points.shape[0] - 1) + 1)
    return np.sort(np.concatenate([np.linalg.norm(points[lag:] - points[:-lag], axis=1) for lag in lags]))


def correlation_sum(points, radii, theiler_window=0):
    """Pair counts with distance < r and the normalised sum C(r), excluding pairs |i - j| <= window."""
    n = points.shape[0]
    radii = np.asarray(radii, dtype=float)
    tree = cKDTree(points)
    # count_neighbors counts d <= r; the next float down leaves d < r
    below = np.nextafter(radii, 0.0)
    counts = (tree.count_neighbors(tree, below).astype(float) - n) / 2.0
    close = _theiler_distances(points, theiler_window)
    counts -= np.searchsorted(close, radii, side='left')
    w = min(max(int(theiler_window), 0), n - 1)
    total = n * (n - 1) / 2.0 - (w * n - w * (w + 1) / 2.0)
    if total <= 0:
        raise EstimationError('Theiler window excludes every pair')
    return counts, counts / total


def correlation_dimension_points(points, theiler_window=0, scaling_range='auto', n_radii=40,
                                 min_pairs=100, max_corr=0.05, rel_tol=0.15, abs_tol=0.05,
                                 min_r2=0.95):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[0] < 200:
        raise EstimationError(f'correlation dimension needs at least 200 points, got {points.shape[0]}')
    if not np.all(np.isfinite(points)):
        raise EstimationError('non-finite input')
    if np.all(np.ptp(points, axis=0) == 0):
        raise EstimationError('all points are identical')

    diameter = float(np.linalg.norm(np.ptp(points, axis=0)))
    nn_dist, _ = cKDTree(points).query(points, k=2)
    positive = nn_dist[:, 1][nn_dist[:, 1] > 0]
    r_min = float(positive.min()) if positive.size else diameter * 1e-6
    radii = np.logspace(np.log10(r_min), np.log10(diameter), int(n_radii))
    counts, corr = correlation_sum(points, radii, theiler_window)

    keep = corr > 0
    radii, counts, corr = radii[keep], counts[keep], corr[keep]
    if radii.shape[0] < 2:
        raise EstimationError('correlation sum is zero at all but one radius')
    log_r, log_c = np.log(radii), np.log(corr)

    if scaling_range == 'auto':
        eligible = np.flatnonzero((counts >= min_pairs) & (corr <= max_corr))
        if eligible.shape[0] < 2:
            eligible = np.flatnonzero(counts >= min(min_pairs, counts.max()))
        # the run is searched inside the first contiguous eligible block
        block = eligible[:np.argmax(np.diff(np.append(eligible, eligible[-1] + 2)) > 1) + 1]
        i, j = longest_linear_run(log_r[block], log_c[block], rel_tol, abs_tol)
        sel = np.zeros(radii.shape[0], dtype=bool)
        sel[block[i]:block[j] + 1] = True
    else:
        r_lo, r_hi = scaling_range
        sel = (radii >= r_lo) & (radii <= r_hi)
        if sel.sum() < 2:
            raise EstimationError(f'scaling range {scaling_range} holds fewer than 2 radii')

    fit = stats.linregress(log_r[sel], log_c[sel])
    r2 = float(fit.rvalue ** 2) if np.isfinite(fit.rvalue) else 0.0
    cd = max(float(fit.slope), 0.0)
    scaling = (float(radii[sel][0]), float(radii[sel][-1]))
    return CdEstimate(cd, radii, corr, scaling, r2, bool(r2 >= min_r2 and sel.sum() >= 4), counts)


def correlation_dimension(signal, m=3, d=1, theiler_window=0, scaling_range='auto', **kwargs):
    x = np.asarray(signal, dtype=float)
    _check_variance(x)
    points = embed(x, m, d).points
    return correlation_dimension_points(points, theiler_window, scaling_range, **kwargs)
