import warnings
from dataclasses import dataclass

import numpy as np

from utils.exceptions import SignalError


@dataclass
class TsaResult:
    averaged: np.ndarray
    n_averages: int
    period_samples: int
    residual_rms: float
    drift_samples: float = 0.0
    drift_flag: bool = False

    @property
    def angle_fraction(self):
        return np.arange(self.period_samples) / self.period_samples


def tsa(signal, sample_rate_Hz, shaft_freq_Hz, drift_tolerance=0.5):
    """
    Time-synchronous average over L = floor(N / V) whole revolutions,
    V = round(sample_rate / shaft_freq) samples each. Samples past L*V are
    ignored.
    """
    x = np.asarray(signal, dtype=float)
    if not shaft_freq_Hz > 0:
        raise SignalError(f'shaft frequency must be positive, got {shaft_freq_Hz}')
    if not sample_rate_Hz > 0:
        raise SignalError(f'sample rate must be positive, got {sample_rate_Hz}')
    exact = sample_rate_Hz / shaft_freq_Hz
    V = int(round(exact))
    if V < 2:
        raise SignalError(f'a revolution spans {exact:.3g} samples; at least 2 are needed')
    L = x.shape[0] // V
    if L < 1:
        raise SignalError(f'signal of {x.shape[0]} samples is shorter than one revolution ({V} samples)')

    blocks = x[:L * V].reshape(L, V)
    averaged = blocks.mean(axis=0)
    residual_rms = float(np.sqrt(np.mean((blocks - averaged) ** 2)))

    # accumulated misalignment of the last block against the true period
    drift = L * abs(exact - V)
    drift_flag = drift > drift_tolerance
    if drift_flag:
        warnings.warn(f'non-integer revolution: {exact:.4f} samples per revolution drifts '
                      f'{drift:.2f} samples over {L} averages')
    return TsaResult(averaged, L, V, residual_rms, float(drift), bool(drift_flag))


def tsa_bank(vmd_result, sample_rate_Hz, shaft_freq_Hz):
    """TSA of every mode, in mode order."""
    return [tsa(mode, sample_rate_Hz, shaft_freq_Hz) for mode in vmd_result.modes]


def estimate_shaft_frequency(omega_p):
    """Mean pinion shaft frequency (Hz) from a simulated speed channel."""
    mean_speed = float(np.mean(omega_p))
    if not mean_speed > 0:
        raise SignalError('pinion is not rotating; shaft frequency cannot be estimated')
    return mean_speed / (2.0 * np.pi)
