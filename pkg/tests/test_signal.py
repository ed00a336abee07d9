import numpy as np
import pytest
from numpy.testing import assert_array_equal

from utils.augmentation import add_awgn, signal_power
from utils.exceptions import SignalError
from utils.spectral import dominant_frequency, envelope, envelope_spectrum

FS = 10000.0


def am_signal(n=10000, carrier=1000.0, modulation=25.0, depth=0.5):
    t = np.arange(n) / FS
    return (1 + depth * np.cos(2 * np.pi * modulation * t)) * np.sin(2 * np.pi * carrier * t)


@pytest.mark.parametrize('snr_db', [10.0, 0.0, -10.0])
def test_awgn_hits_target_snr(snr_db):
    x = np.sin(2 * np.pi * 475.0 * np.arange(100000) / FS)
    noisy = add_awgn(x, snr_db, seed=3)
    assert noisy.snr_db == snr_db
    assert noisy.achieved_snr_db == pytest.approx(snr_db, abs=0.1)
    assert noisy.data.shape == x.shape


def test_awgn_uses_ac_power():
    x = 100.0 + np.sin(np.linspace(0, 40 * np.pi, 20000))
    assert signal_power(x) == pytest.approx(0.5, rel=1e-3)
    noisy = add_awgn(x, 0.0, seed=1)
    assert np.std(noisy.data - x) == pytest.approx(np.sqrt(0.5), rel=0.05)


def test_awgn_seeded():
    x = np.sin(np.arange(1000) / 7.0)
    assert_array_equal(add_awgn(x, 5.0, seed=11).data, add_awgn(x, 5.0, seed=11).data)
    assert not np.array_equal(add_awgn(x, 5.0, seed=11).data, add_awgn(x, 5.0, seed=12).data)


def test_awgn_rejects():
    with pytest.raises(SignalError):
        add_awgn(np.full(100, 3.0), 10.0)
    with pytest.raises(SignalError):
        add_awgn(np.array([1.0, np.nan, 2.0]), 10.0)


def test_envelope_recovers_modulation():
    env = envelope(am_signal())
    t = np.arange(10000) / FS
    assert np.corrcoef(env[500:-500], np.cos(2 * np.pi * 25.0 * t)[500:-500])[0, 1] > 0.99
    assert abs(env.mean()) < 1e-12


def test_envelope_spectrum_peak():
    freqs, magnitude = envelope_spectrum(am_signal(), FS)
    assert freqs[1] == pytest.approx(1.0)
    assert dominant_frequency(freqs, magnitude, f_min=1.0) == 25.0
    assert magnitude[25] == pytest.approx(0.5, abs=0.02)


def test_envelope_spectrum_rejects():
    with pytest.raises(SignalError):
        envelope_spectrum(np.ones(8), FS)
    with pytest.raises(SignalError):
        envelope_spectrum(np.array([np.inf] * 32), FS)


def test_awgn_noise_power_at_minus_ten_db():
    x = np.sin(2 * np.pi * 475.0 * np.arange(100000) / FS)
    noisy = add_awgn(x, -10.0, seed=5)
    assert np.mean((noisy.data - x) ** 2) == pytest.approx(10 * signal_power(x), rel=0.02)


def test_envelope_is_homogeneous():
    x = am_signal()
    np.testing.assert_allclose(envelope(4.0 * x), 4.0 * envelope(x), atol=1e-12)


def test_flat_envelopes():
    _, constant = envelope_spectrum(np.full(1000, 2.0), FS)
    assert np.max(constant) < 1e-12
    _, am = envelope_spectrum(am_signal(), FS)
    _, plain = envelope_spectrum(am_signal(depth=0.0), FS)
    assert 20 * np.log10(np.max(plain) / am[25]) < -40
