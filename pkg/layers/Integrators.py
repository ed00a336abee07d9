import math

import numpy as np
from tqdm import tqdm

from utils.exceptions import SimulationDivergedError


def rk4_step(func, t, x, h):
    """One classical fourth-order Runge-Kutta step of dx/dt = func(t, x)."""
    k1 = func(t, x)
    k2 = func(t + h / 2, x + h / 2 * k1)
    k3 = func(t + h / 2, x + h / 2 * k2)
    k4 = func(t + h, x + h * k3)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def stable_substeps(omega_max, sample_period):
    """Smallest integer n with omega_max * sample_period / n <= 1."""
    if omega_max <= 0:
        return 1
    return max(1, int(math.ceil(omega_max * sample_period - 1e-12)))


class FixedStepRK4(object):
    """
    Fixed-step RK4 sampled on a uniform output grid.

    Each output interval 1/sample_rate is split into ``substeps`` equal RK4
    steps; the state is recorded at every output sample, starting with the
    initial state at t0.
    """

    def __init__(self, func, sample_rate, substeps=1, state_names=None):
        if sample_rate <= 0:
            raise ValueError(f'sample rate must be positive, got {sample_rate}')
        if int(substeps) < 1:
            raise ValueError(f'substeps must be >= 1, got {substeps}')
        self.func = func
        self.sample_rate = float(sample_rate)
        self.substeps = int(substeps)
        self.state_names = state_names

    @property
    def step_size(self):
        return 1.0 / (self.sample_rate * self.substeps)

    def _channel(self, x):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        if self.state_names is not None:
            return self.state_names[bad]
        return f'x[{bad}]'

    def integrate(self, x0, n_samples, t0=0.0, progress=False, desc='rk4'):
        x = np.array(x0, dtype=float)
        out = np.empty((n_samples, x.shape[0]))
        out[0] = x
        h = self.step_size
        step = 0
        for k in tqdm(range(1, n_samples), desc=desc, disable=not progress, mininterval=1.0):
            t_start = t0 + (k - 1) / self.sample_rate
            for j in range(self.substeps):
                x = rk4_step(self.func, t_start + j * h, x, h)
                step += 1
            if not np.all(np.isfinite(x)):
                raise SimulationDivergedError(step, t0 + k / self.sample_rate, self._channel(x))
            out[k] = x
        t = t0 + np.arange(n_samples) / self.sample_rate
        return t, out
