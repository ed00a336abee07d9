import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from data_provider.vmd import (VmdConfig, crop, inverse_spectrum, mirror_extend, occupied_bandwidth, spectral_energy,
                               spectrum, vmd)
from utils.exceptions import SignalError

FS = 1000.0


def tone(freq, n=2000, fs=FS, amplitude=1.0, phase=0.0):
    t = np.arange(n) / fs
    return amplitude * np.sin(2 * np.pi * freq * t + phase)


def test_mirror_extend():
    assert_array_equal(mirror_extend([1, 2, 3, 4]), [2, 1, 1, 2, 3, 4, 4, 3])
    assert_array_equal(mirror_extend([1, 2, 3, 4, 5]), [2, 1, 1, 2, 3, 4, 5, 5, 4, 3])
    with pytest.raises(SignalError):
        mirror_extend([1.0])


@pytest.mark.parametrize('n', [2, 7, 64, 101])
def test_crop_inverts_mirror(n, rng):
    x = rng.normal(size=n)
    ext = mirror_extend(x)
    assert ext.shape == (2 * n,)
    assert_array_equal(crop(ext, n), x)


@pytest.mark.parametrize('n', [128, 129])
def test_parseval(n, rng):
    x = rng.normal(size=n)
    assert spectral_energy(spectrum(x), n) == pytest.approx(np.sum(x ** 2), rel=1e-10)


def test_single_tone_centre_frequency():
    result = vmd(tone(50.0), FS, VmdConfig(K=1))
    assert result.converged
    assert result.center_freqs_Hz[0] == pytest.approx(50.0, rel=0.01)
    assert result.modes.shape == (1, 2000)


def test_two_tones_are_separated():
    low, high = tone(50.0), tone(200.0, amplitude=0.5)
    result = vmd(low + high, FS, VmdConfig(K=2))
    assert result.center_freqs_Hz[0] == pytest.approx(50.0, rel=0.02)
    assert result.center_freqs_Hz[1] == pytest.approx(200.0, rel=0.02)
    assert np.corrcoef(result.modes[0], low)[0, 1] > 0.95
    assert np.corrcoef(result.modes[1], high)[0, 1] > 0.95


def test_reconstruction_identity(rng):
    x = tone(40.0) + tone(170.0, amplitude=0.3) + rng.normal(0.0, 0.1, 2000)
    result = vmd(x, FS, VmdConfig(K=3))
    assert_allclose(result.modes.sum(axis=0) + result.residual, x, atol=1e-12)
    assert np.all(np.diff(result.center_freqs_Hz) >= 0)
    assert result.K == 3


def test_deterministic(rng):
    x = rng.normal(size=1000)
    a = vmd(x, FS, VmdConfig(K=4, max_iters=50))
    b = vmd(x, FS, VmdConfig(K=4, max_iters=50))
    assert_array_equal(a.modes, b.modes)
    assert_array_equal(a.center_freqs_Hz, b.center_freqs_Hz)


def test_history_and_dc_mode():
    result = vmd(tone(50.0) + 0.5, FS, VmdConfig(K=2, dc_mode=True), keep_history=True)
    assert result.freq_history.shape == (result.iterations + 1, 2)
    assert result.center_freqs_Hz[0] == 0.0
    assert result.center_freqs_Hz[1] == pytest.approx(50.0, rel=0.02)


def test_max_iters_warns():
    with pytest.warns(UserWarning, match='max_iters'):
        result = vmd(tone(50.0), FS, VmdConfig(K=2, max_iters=1))
    assert not result.converged
    assert result.iterations == 1


@pytest.mark.parametrize('signal', [np.zeros(100), np.ones(3), np.array([1.0, np.nan] * 50), np.ones((10, 10))])
def test_invalid_signals(signal):
    with pytest.raises(SignalError):
        vmd(signal, FS, VmdConfig(K=2))


@pytest.mark.parametrize('kwargs', [{'K': 0}, {'alpha': 0.0}, {'tau': -1.0}, {'eps': 0.0}, {'max_iters': 0},
                                    {'init': 'fourier'}])
def test_invalid_config(kwargs):
    with pytest.raises(SignalError):
        VmdConfig(**kwargs)


def test_occupied_bandwidth():
    assert occupied_bandwidth(tone(50.0, n=1000), FS) == pytest.approx(0.0, abs=1e-9)
    assert occupied_bandwidth(np.zeros(64), FS) == 0.0
    wide = occupied_bandwidth(tone(50.0, n=1000) + tone(150.0, n=1000), FS)
    assert wide == pytest.approx(100.0, abs=2.0)


def test_spectrum_round_trip(rng):
    x = rng.normal(size=501)
    assert np.sqrt(np.mean((inverse_spectrum(spectrum(x), 501) - x) ** 2)) < 1e-10
    impulse = np.zeros(64)
    impulse[0] = 1.0
    assert_allclose(np.abs(spectrum(impulse)), 1.0)


@pytest.mark.parametrize('init', ['uniform', 'random', 'zeros'])
def test_modes_sorted_by_centre_frequency(init):
    x = tone(200.0, amplitude=0.5) + tone(50.0)
    result = vmd(x, FS, VmdConfig(K=2, init=init, seed=4, max_iters=100))
    assert np.all(np.diff(result.center_freqs_Hz) >= 0)


def test_linear_in_amplitude(rng):
    x = tone(50.0) + tone(200.0, amplitude=0.5) + rng.normal(0.0, 0.1, 2000)
    config = VmdConfig(K=2, max_iters=100)
    a = vmd(x, FS, config)
    b = vmd(3.0 * x, FS, config)
    assert_allclose(b.modes, 3.0 * a.modes, rtol=1e-8, atol=1e-8 * np.max(np.abs(b.modes)))
    assert_allclose(b.center_freqs_Hz, a.center_freqs_Hz, rtol=1e-8)


def test_larger_alpha_narrows_the_modes(rng):
    x = rng.normal(size=2000)
    wide = vmd(x, FS, VmdConfig(K=2, alpha=200.0, max_iters=100))
    narrow = vmd(x, FS, VmdConfig(K=2, alpha=2000.0, max_iters=100))
    for k in range(2):
        assert occupied_bandwidth(narrow.modes[k], FS) < occupied_bandwidth(wide.modes[k], FS)
