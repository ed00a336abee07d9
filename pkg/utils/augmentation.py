from dataclasses import dataclass

import numpy as np

from utils.exceptions import SignalError


@dataclass
class NoisySignal:
    data: np.ndarray
    snr_db: float
    achieved_snr_db: float
    seed: int


def signal_power(x):
    """AC power: mean square after removing the mean."""
    x = np.asarray(x, dtype=float)
    return float(np.mean((x - x.mean()) ** 2))


def jitter(x, sigma, rng):
    return x + rng.normal(loc=0., scale=sigma, size=x.shape)


def add_awgn(signal, snr_db, seed=None):
    """
    Add white Gaussian noise whose variance is the signal's AC power divided
    by 10**(snr_db / 10). The noise is drawn from a generator seeded with
    ``seed``; the realised SNR is reported alongside.
    """
    x = np.asarray(signal, dtype=float)
    if not np.all(np.isfinite(x)):
        raise SignalError('cannot add noise to a non-finite signal')
    power = signal_power(x)
    if power <= 0:
        raise SignalError('signal has zero power; SNR is undefined')
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noisy = jitter(x, sigma, rng)
    noise = noisy - x
    achieved = 10.0 * np.log10(power / np.mean(noise ** 2))
    return NoisySignal(noisy, float(snr_db), float(achieved), seed)
