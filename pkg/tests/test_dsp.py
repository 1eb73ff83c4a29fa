"""Filter design, analytic signal, and spectrum tests against DFT oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seizdet import dsp

FS = 250.0


def dft_gain(taps, freq_hz, fs):
    """Oracle: evaluate the kernel's magnitude response by direct DFT sum."""
    n = np.arange(len(taps))
    return abs(np.sum(taps * np.exp(-2j * np.pi * freq_hz * n / fs)))


class TestDesignBandpass:
    def test_alpha_band_response(self):
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 501)
        assert 0.89 <= dft_gain(kernel.taps, 10.0, FS) <= 1.12
        assert dft_gain(kernel.taps, 2.0, FS) < 0.01
        assert dft_gain(kernel.taps, 25.0, FS) < 0.01

    def test_impulse_reproduces_coefficients(self):
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 101)
        impulse = np.zeros(600)
        impulse[0] = 1.0
        full = np.convolve(impulse, kernel.taps)
        np.testing.assert_allclose(full[:101], kernel.taps, atol=1e-12)

    def test_band_above_nyquist_rejected(self):
        with pytest.raises(ValueError, match="Nyquist"):
            dsp.design_bandpass((45.0, 70.0), 100.0, 101)

    def test_even_taps_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            dsp.design_bandpass((7.0, 13.0), FS, 100)

    def test_dc_gain_below_minus_40db_for_all_default_bands(self):
        for band in dsp.DEFAULT_BANDS:
            kernel = dsp.design_bandpass(band, FS, 501)
            assert dft_gain(kernel.taps, 0.0, FS) < 10 ** (-40 / 20), band

    def test_taps_are_symmetric(self):
        kernel = dsp.design_bandpass((13.0, 15.0), FS, 501)
        np.testing.assert_allclose(kernel.taps, kernel.taps[::-1], rtol=0, atol=0)


class TestFilterSignal:
    def test_passband_sinusoid_preserved(self):
        t = np.arange(3000) / FS
        x = np.sin(2 * np.pi * 10.0 * t)
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 501)
        y = dsp.filter_signal(x, kernel)
        core = slice(500, 2500)
        corr = np.corrcoef(x[core], y[core])[0, 1]
        assert corr > 0.99

    def test_stopband_sinusoid_suppressed(self):
        t = np.arange(3000) / FS
        x = np.sin(2 * np.pi * 10.0 * t)
        kernel = dsp.design_bandpass((0.5, 4.0), FS, 501)
        y = dsp.filter_signal(x, kernel)
        assert np.sqrt(np.mean(y**2)) < 0.01 * np.sqrt(np.mean(x**2))

    def test_zero_signal(self):
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 101)
        y = dsp.filter_signal(np.zeros(500), kernel)
        np.testing.assert_allclose(y, 0.0, atol=1e-15)

    def test_too_short_signal_rejected(self):
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 101)
        with pytest.raises(ValueError, match="exceed"):
            dsp.filter_signal(np.zeros(101), kernel)

    def test_output_length_equals_input(self):
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 101)
        for n in (102, 250, 997):
            assert dsp.filter_signal(np.random.default_rng(0).normal(size=n), kernel).shape == (n,)

    @given(st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, seed, a, b):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=400)
        y = rng.normal(size=400)
        kernel = dsp.design_bandpass((7.0, 13.0), FS, 101)
        lhs = dsp.filter_signal(a * x + b * y, kernel)
        rhs = a * dsp.filter_signal(x, kernel) + b * dsp.filter_signal(y, kernel)
        scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-30)
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-9


class TestAnalyticSignal:
    def test_cosine_identity(self):
        t = np.arange(1000) / FS
        f = 10.0
        analytic = dsp.analytic_signal(np.cos(2 * np.pi * f * t))
        core = slice(100, 900)
        np.testing.assert_allclose(np.abs(analytic[core]), 1.0, atol=0.01)
        expected = np.angle(np.exp(1j * 2 * np.pi * f * t[core]))
        err = np.angle(np.exp(1j * (np.angle(analytic[core]) - expected)))
        assert np.max(np.abs(err)) < 0.01

    def test_sine_lags_quarter_turn(self):
        t = np.arange(1000) / FS
        f = 10.0
        analytic = dsp.analytic_signal(np.sin(2 * np.pi * f * t))
        core = slice(100, 900)
        expected = 2 * np.pi * f * t[core] - np.pi / 2
        err = np.angle(np.exp(1j * (np.angle(analytic[core]) - expected)))
        assert np.max(np.abs(err)) < 0.01

    def test_imaginary_spectrum_matches_real_on_interior_bins(self):
        # DFT comparison: |F{imag}| equals |F{real}| at every nonzero,
        # non-Nyquist bin (the Hilbert transform is an all-pass there).
        rng = np.random.default_rng(11)
        x = rng.normal(size=512)
        analytic = dsp.analytic_signal(x)
        fre = np.abs(np.fft.fft(analytic.real))
        fim = np.abs(np.fft.fft(analytic.imag))
        np.testing.assert_allclose(fim[1:256], fre[1:256], rtol=1e-9, atol=1e-9)

    @given(st.integers(0, 2**31 - 1), st.integers(16, 300))
    @settings(max_examples=25, deadline=None)
    def test_real_part_fidelity(self, seed, n):
        x = np.random.default_rng(seed).normal(size=n)
        analytic = dsp.analytic_signal(x)
        assert np.max(np.abs(analytic.real - x)) <= 1e-9 * max(1.0, np.max(np.abs(x)))


class TestInstantaneousPhase:
    def test_complex_exponential_slope(self):
        omega = 0.3
        n = np.arange(500)
        phase, flags = dsp.instantaneous_phase(np.exp(1j * omega * n))
        dphi = np.angle(np.exp(1j * np.diff(phase)))
        np.testing.assert_allclose(dphi, omega, atol=1e-9)
        assert not flags.any()

    def test_real_axis_conventions(self):
        phase, flags = dsp.instantaneous_phase(np.array([2.0 + 0j, -3.0 + 0j]))
        assert phase[0] == 0.0
        assert phase[1] == pytest.approx(np.pi)
        assert not flags.any()

    def test_zero_sample_flagged(self):
        phase, flags = dsp.instantaneous_phase(np.array([1j, 0j, -1j]))
        assert phase[1] == 0.0
        assert flags.tolist() == [False, True, False]

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_range(self, seed):
        rng = np.random.default_rng(seed)
        z = rng.normal(size=64) + 1j * rng.normal(size=64)
        phase, _ = dsp.instantaneous_phase(z)
        assert np.all(phase > -np.pi) and np.all(phase <= np.pi)


class TestPeriodogram:
    def test_integer_bin_sinusoid_closed_form(self):
        # A sin(2 pi k t / T): the DFT has magnitude A*N/2 at bin k, so the
        # power there is (A*N/2)^2 / N = A^2 * N / 4; other bins vanish.
        n, k, amp = 250, 10, 3.0
        x = amp * np.sin(2 * np.pi * k * np.arange(n) / n)
        spec = dsp.periodogram(x, FS)
        expected_peak = amp**2 * n / 4
        assert spec.power[k] == pytest.approx(expected_peak, rel=1e-9)
        others = np.delete(spec.power, k)
        assert np.max(others) < 1e-9 * expected_peak

    def test_zero_signal(self):
        spec = dsp.periodogram(np.zeros(100), FS)
        assert np.all(spec.power == 0.0)

    def test_parseval(self):
        # Direct-summation oracle: sum x^2 equals total two-sided spectral
        # power; interior one-sided bins count twice, DC and Nyquist once.
        rng = np.random.default_rng(3)
        for n in (64, 250, 251):
            x = rng.normal(size=n)
            spec = dsp.periodogram(x, FS)
            weights = np.full(len(spec.power), 2.0)
            weights[0] = 1.0
            if n % 2 == 0:
                weights[-1] = 1.0
            total = float(np.sum(weights * spec.power))
            direct = float(np.sum(x**2))
            assert total == pytest.approx(direct, rel=1e-9)

    def test_too_short(self):
        with pytest.raises(ValueError):
            dsp.periodogram(np.ones(1), FS)


class TestBandLogPower:
    def test_alpha_sinusoid_dominates(self):
        t = np.arange(250) / FS
        spec = dsp.periodogram(np.sin(2 * np.pi * 10.0 * t), FS)
        blp = dsp.band_log_power(spec)
        alpha = blp[2]
        others = np.delete(blp, 2)
        assert np.all(alpha > others + 5.0)

    def test_zero_signal_hits_floor(self):
        spec = dsp.periodogram(np.zeros(250), FS)
        blp = dsp.band_log_power(spec)
        np.testing.assert_allclose(blp, np.log(1e-12), rtol=1e-12)

    def test_scaling_by_two_adds_ln4(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=250)
        a = dsp.band_log_power(dsp.periodogram(x, FS))
        b = dsp.band_log_power(dsp.periodogram(2.0 * x, FS))
        np.testing.assert_allclose(b - a, np.log(4.0), rtol=1e-9)

    def test_monotone_under_pointwise_increase(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=250)
        spec = dsp.periodogram(x, FS)
        bumped = dsp.Spectrum(spec.freqs_hz, spec.power + 0.5)
        assert np.all(dsp.band_log_power(bumped) >= dsp.band_log_power(spec))

    def test_empty_band_rejected(self):
        spec = dsp.periodogram(np.zeros(16), 16.0)  # 1 Hz resolution, tiny band
        with pytest.raises(ValueError, match="no spectral bins"):
            dsp.band_log_power(spec, bands=((0.1, 0.4),))
