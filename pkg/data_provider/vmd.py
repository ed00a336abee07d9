"""
Variational mode decomposition (ADMM form).

The signal is mirror-extended to twice its length, transformed to the
one-sided spectrum, and the K mode spectra are refined by a Gauss-Seidel
sweep of Wiener filters centred on each mode's frequency, followed by the
power-weighted centroid update and dual ascent. Frequencies inside the
iteration are in cycles per sample of the extended record.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from utils.exceptions import SignalError


@dataclass(frozen=True)
class VmdConfig:
    K: int = 5
    alpha: float = 2000.0
    tau: float = 0.0
    eps: float = 1e-6
    max_iters: int = 500
    dc_mode: bool = False
    init: str = 'uniform'
    seed: int = None

    def __post_init__(self):
        if int(self.K) < 1:
            raise SignalError(f'K must be >= 1, got {self.K}')
        if not self.alpha > 0:
            raise SignalError(f'alpha must be positive, got {self.alpha}')
        if self.tau < 0:
            raise SignalError(f'tau must be non-negative, got {self.tau}')
        if not self.eps > 0:
            raise SignalError(f'eps must be positive, got {self.eps}')
        if int(self.max_iters) < 1:
            raise SignalError(f'max_iters must be >= 1, got {self.max_iters}')
        if self.init not in ('uniform', 'random', 'zeros'):
            raise SignalError(f'unknown init scheme {self.init!r}, options: [uniform, random, zeros]')


@dataclass
class VmdResult:
    modes: np.ndarray
    center_freqs_Hz: np.ndarray
    residual: np.ndarray
    iterations: int
    final_update_norm: float
    sample_rate_Hz: float
    converged: bool = True
    freq_history: np.ndarray = field(default=None, repr=False)

    @property
    def K(self):
        return self.modes.shape[0]


def mirror_extend(signal):
    """Reflect the first half in front and the second half behind: length N -> 2N."""
    x = np.asarray(signal, dtype=float)
    n = x.shape[0]
    if n < 2:
        raise SignalError(f'mirror extension needs at least 2 samples, got {n}')
    half = n // 2
    return np.concatenate([x[:half][::-1], x, x[half:][::-1]])


def crop(extended, n):
    """Inverse of mirror_extend for an original length n."""
    half = n // 2
    return np.asarray(extended)[..., half:half + n]


def spectrum(signal):
    """One-sided spectrum of a real signal (DC to Nyquist)."""
    x = np.asarray(signal, dtype=float)
    if not np.all(np.isfinite(x)):
        raise SignalError('spectrum of a non-finite signal')
    return np.fft.rfft(x)


def inverse_spectrum(half_spectrum, n):
    return np.fft.irfft(half_spectrum, n)


def spectral_energy(half_spectrum, n):
    """Time-domain energy sum(x**2) recovered from a one-sided spectrum (Parseval)."""
    power = np.abs(half_spectrum) ** 2
    weights = np.full(power.shape, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    return float(np.sum(weights * power) / n)


def _initial_freqs(config):
    K = config.K
    if config.init == 'uniform':
        # evenly spread over [0, Nyquist/2)
        freqs = 0.25 * np.arange(K) / K
    elif config.init == 'random':
        rng = np.random.default_rng(config.seed)
        freqs = np.sort(np.exp(np.log(1e-3) + (np.log(0.25) - np.log(1e-3)) * rng.random(K)))
    else:
        freqs = np.zeros(K)
    if config.dc_mode:
        freqs[0] = 0.0
    # the extended record doubles the length; per-sample frequencies are unchanged
    return freqs.astype(float)


def vmd(signal, sample_rate_Hz, config=None, keep_history=False):
    config = config or VmdConfig()
    x = np.asarray(signal, dtype=float)
    n = x.shape[0]
    K = int(config.K)
    if x.ndim != 1:
        raise SignalError(f'vmd expects a 1-D signal, got shape {x.shape}')
    if n < 2 * K:
        raise SignalError(f'signal length {n} is shorter than 2K = {2 * K}')
    if not np.all(np.isfinite(x)):
        raise SignalError('vmd input contains non-finite values')
    if not np.any(x):
        raise SignalError('vmd input is all zeros; centre frequencies are undefined')

    ext = mirror_extend(x)
    T = ext.shape[0]
    f_hat = spectrum(ext)
    freqs = np.fft.rfftfreq(T)

    omega = _initial_freqs(config)
    u_hat = np.zeros((K, freqs.shape[0]), dtype=complex)
    lam = np.zeros(freqs.shape[0], dtype=complex)
    history = [omega.copy()] if keep_history else None
    alpha = float(config.alpha)

    update = np.inf
    it = 0
    while it < config.max_iters:
        prev = u_hat.copy()
        total = u_hat.sum(axis=0)
        for k in range(K):
            # modes before k already carry iterate n+1, modes after k iterate n
            others = total - u_hat[k]
            u_hat[k] = (f_hat - others - lam / 2) / (1.0 + 2.0 * alpha * (freqs - omega[k]) ** 2)
            total = others + u_hat[k]
            if not (config.dc_mode and k == 0):
                power = np.abs(u_hat[k]) ** 2
                p_sum = power.sum()
                if p_sum > 0:
                    omega[k] = float(freqs @ power / p_sum)
        lam = lam + config.tau * (u_hat.sum(axis=0) - f_hat)
        it += 1
        if keep_history:
            history.append(omega.copy())

        norms = np.sum(np.abs(prev) ** 2, axis=1)
        if np.all(norms > 0):
            update = float(np.sum(np.sum(np.abs(u_hat - prev) ** 2, axis=1) / norms))
            if update < config.eps:
                break

    converged = update < config.eps
    if not converged:
        warnings.warn(f'vmd stopped at max_iters={config.max_iters} with update norm {update:.3g} '
                      f'(eps={config.eps:g})')

    modes = crop(np.fft.irfft(u_hat, T, axis=1), n)
    order = np.argsort(omega, kind='stable')
    modes = modes[order]
    residual = x - modes.sum(axis=0)
    freq_history = np.array(history)[:, order] * sample_rate_Hz if keep_history else None

    return VmdResult(modes=modes, center_freqs_Hz=omega[order] * sample_rate_Hz, residual=residual,
                     iterations=it, final_update_norm=update, sample_rate_Hz=float(sample_rate_Hz),
                     converged=bool(converged), freq_history=freq_history)


def occupied_bandwidth(mode, sample_rate_Hz, fraction=0.9):
    """Width (Hz) of the smallest centred band around the spectral centroid holding ``fraction`` of the energy."""
    power = np.abs(np.fft.rfft(mode)) ** 2
    freqs = np.fft.rfftfreq(len(mode), 1.0 / sample_rate_Hz)
    total = power.sum()
    if total == 0:
        return 0.0
    centre = freqs @ power / total
    distance = np.abs(freqs - centre)
    order = np.argsort(distance, kind='stable')
    cumulative = np.cumsum(power[order]) / total
    idx = int(np.searchsorted(cumulative, fraction))
    return float(2.0 * distance[order][min(idx, len(order) - 1)])
