import numpy as np
from scipy.signal import hilbert

from utils.exceptions import SignalError


def envelope(signal):
    """Hilbert envelope of the mean-removed signal, itself mean-removed."""
    x = np.asarray(signal, dtype=float)
    env = np.abs(hilbert(x - x.mean()))
    return env - env.mean()


def envelope_spectrum(signal, sample_rate_Hz):
    """Single-sided amplitude spectrum of the envelope; resolution sample_rate / N."""
    x = np.asarray(signal, dtype=float)
    n = x.shape[0]
    if n < 16:
        raise SignalError(f'envelope spectrum needs at least 16 samples, got {n}')
    if not np.all(np.isfinite(x)):
        raise SignalError('envelope spectrum of a non-finite signal')
    magnitude = 2.0 * np.abs(np.fft.rfft(envelope(x))) / n
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate_Hz)
    return freqs, magnitude


def dominant_frequency(freqs, magnitude, f_min=0.0):
    mask = freqs > f_min
    return float(freqs[mask][np.argmax(magnitude[mask])])
