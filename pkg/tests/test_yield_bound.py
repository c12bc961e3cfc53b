import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superosc import waveform
from superosc.envelope import EnvelopeSpec
from superosc.euler import CosineZeroParams
from superosc.spectral import SampledSignal, spectrum
from superosc.yield_bound import (
    BUMP_PEAK,
    ROUNDED_GAIN,
    FilterSpec,
    SoProfile,
    brute_force_bound,
    bump_peak,
    empirical_yield,
    filter_impulse,
    filter_spectrum,
    optimize_bound,
    profile_from_waveform,
    so_energy,
    tail_bound,
    window_energy,
    yield_bound,
)

WORKED = SoProfile(1.0, 50.0, 1.0, 0.0, 1.0)


class TestProfile:
    @pytest.mark.parametrize(
        "args",
        [(1.0, 1.0, 20.0, 0.0, 1.0), (1.0, 50.0, 0.1, 0.0, 1.0), (1.0, 50.0, -1.0, 0.0, 1.0), (1.0, 50.0, 1.0, 0.0, 0.0)],
    )
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            SoProfile(*args)

    def test_filter_duration(self):
        with pytest.raises(ValueError):
            FilterSpec(0.0, 50.0)
        FilterSpec(0.5, 50.0, bandwidth=4.0).check_for(WORKED)
        with pytest.raises(ValueError):
            FilterSpec(1.0, 50.0).check_for(WORKED)

    def test_from_waveform(self):
        spec = waveform.WaveformSpec(EnvelopeSpec("sinc", power=21), CosineZeroParams(50.0, 10))
        p = profile_from_waveform(spec)
        assert (p.a_s, p.f_s, p.tau_s, p.t0, p.f_max) == pytest.approx((1.0, 50.0, 0.2, -0.1, 0.5))


class TestSoEnergy:
    def test_unit(self):
        assert so_energy(WORKED) == 0.5

    def test_short_midsection_profile(self):
        # 50 Hz over 32 ms is only 1.6 cycles, below the 10-cycle minimum of a profile
        with pytest.raises(ValueError, match="cycles"):
            SoProfile(0.0165, 50.0, 0.032, -0.016, 1.0)
        # the energy does not depend on f_s, so a compliant frequency gives the same number
        assert so_energy(SoProfile(0.0165, 400.0, 0.032, -0.016, 1.0)) == pytest.approx(4.356e-6, rel=1e-3)

    @given(st.floats(1e-3, 1e3))
    def test_quadratic(self, a):
        p = SoProfile(a, 50.0, 1.0, 0.0, 1.0)
        q = SoProfile(2 * a, 50.0, 1.0, 0.0, 1.0)
        assert so_energy(q) == pytest.approx(4 * so_energy(p), rel=1e-15)


class TestFilter:
    def test_impulse_vanishes_at_edges(self):
        fs = FilterSpec(0.7, 50.0)
        assert filter_impulse(fs, 0.35) == 0.0 and filter_impulse(fs, -0.35) == 0.0
        assert filter_impulse(fs, 0.0) == pytest.approx(math.exp(-1))

    def test_gain_at_tuning_frequency(self):
        fs = FilterSpec(0.934, 50.0)
        assert filter_spectrum(fs, 50.0) / fs.tau == pytest.approx(ROUNDED_GAIN, rel=0.02)
        assert filter_spectrum(fs, 50.0) == pytest.approx(0.25 * fs.tau * BUMP_PEAK, rel=1e-8)

    def test_bump_peak(self):
        assert bump_peak() == pytest.approx(0.44, abs=0.005)
        assert bump_peak() == pytest.approx(BUMP_PEAK, rel=1e-14)

    @given(st.floats(0.05, 2.0), st.floats(5.0, 200.0), st.floats(0.0, 400.0))
    def test_even(self, tau, f_s, f):
        fs = FilterSpec(tau, f_s)
        assert filter_spectrum(fs, f) - filter_spectrum(fs, -f) == 0.0

    @pytest.mark.parametrize("tau, f_s", [(0.934, 50.0), (0.2, 50.0), (1.5, 10.0)])
    def test_two_copies_match_dft(self, tau, f_s):
        fs = FilterSpec(tau, f_s)
        dt = 1e-4
        n = int(round(8 * tau / dt))
        t0 = -n // 2 * dt
        sig = SampledSignal(t0, dt, filter_impulse(fs, t0 + dt * np.arange(n)))
        est = spectrum(sig)
        band = np.abs(np.abs(est.freqs) - f_s) < 2.0 / tau
        q = filter_spectrum(fs, est.freqs[band])
        assert np.max(np.abs(est.amplitudes[band] - q)) <= 1e-6 * np.max(np.abs(q))


class TestWindowEnergy:
    def test_full_length_filter(self):
        assert window_energy(FilterSpec(1.0, 50.0), WORKED) == 0.0
        assert window_energy(FilterSpec(1.0, 50.0), WORKED, "exact") == 0.0
        with pytest.raises(ValueError):
            window_energy(FilterSpec(1.1, 50.0), WORKED)

    def test_worked_value(self):
        assert window_energy(FilterSpec(0.934, 50.0), WORKED) == pytest.approx(3.48e-4, rel=2e-3)

    def test_quadratic_in_tau(self):
        p = SoProfile(1.0, 50.0, 1000.0, 0.0, 1.0)
        a = window_energy(FilterSpec(1e-3, 50.0), p)
        b = window_energy(FilterSpec(2e-3, 50.0), p)
        assert b / a == pytest.approx(4.0, rel=1e-5)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            window_energy(FilterSpec(0.5, 50.0), WORKED, "rough")

    @pytest.mark.parametrize("tau, f_s", [(0.4, 50.0), (0.934, 50.0), (0.2, 100.0), (0.5, 200.0)])
    def test_exact_gain_consistency(self, tau, f_s):
        # with tau f_s >= 20 the second shifted copy adds < 1% to the gain at f_s
        p = SoProfile(0.7, f_s, 1.0, 0.0, 1.0)
        fs = FilterSpec(tau, f_s)
        exact = window_energy(fs, p, "exact")
        assert exact == pytest.approx(0.5 * (filter_spectrum(fs, f_s) * p.a_s) ** 2 * (p.tau_s - tau), rel=1e-14)
        single_copy = 0.5 * (0.25 * tau * BUMP_PEAK * p.a_s) ** 2 * (p.tau_s - tau)
        assert exact == pytest.approx(single_copy, rel=0.01)

    def test_rounded_gain_offset(self):
        # the rounded gain 0.11 sits 0.9% under (1/4) Qh(0), i.e. 1.8% in energy
        fs = FilterSpec(0.934, 50.0)
        ratio = window_energy(fs, WORKED) / window_energy(fs, WORKED, "exact")
        assert ratio == pytest.approx((ROUNDED_GAIN / (0.25 * BUMP_PEAK)) ** 2, rel=1e-6)


class TestYieldBound:
    def test_worked_example(self):
        assert yield_bound(WORKED, 0.934) == pytest.approx(0.979e-8, rel=0.02)

    def test_vacuous_limit(self):
        assert yield_bound(WORKED, 1e-14) == pytest.approx(math.exp(9), rel=1e-4)

    def test_blows_up_at_window(self):
        eps = np.array([1e-3, 1e-6, 1e-9, 1e-12])
        v = yield_bound(WORKED, 1 - eps)
        assert np.all(np.diff(v) > 0)
        # simple pole: eps * bound tends to the numerator at tau = tau_s
        assert v[-1] * eps[-1] == pytest.approx(math.exp(9 - 5 * 49**0.47), rel=1e-9)

    @pytest.mark.parametrize("tau", [0.0, -0.1, 1.0, 1.5])
    def test_domain(self, tau):
        with pytest.raises(ValueError):
            yield_bound(WORKED, tau)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            yield_bound(WORKED, 0.5, "guess")

    def test_vectorized(self):
        taus = np.array([0.2, 0.5, 0.934])
        v = yield_bound(WORKED, taus)
        assert np.allclose(v, [yield_bound(WORKED, float(t)) for t in taus], rtol=1e-15)

    def test_unrounded_constants(self):
        c0 = -math.log(16 * 0.11**2) + 2 * 3.70153
        c1 = 2 * 3.45055 * 0.5**0.47
        assert yield_bound(WORKED, 0.5, "unrounded") == pytest.approx(math.exp(c0 - c1 * (0.5 * 49) ** 0.47) / 0.5, rel=1e-14)


class TestOptimize:
    def test_worked_example(self):
        tau, b = optimize_bound(WORKED)
        assert tau == pytest.approx(0.934, abs=1e-3)
        assert b == pytest.approx(0.979e-8, rel=0.02)
        bt, bb = brute_force_bound(WORKED)
        assert abs(bt - tau) <= 1e-4

    def test_regression_fs10(self):
        p = SoProfile(1.0, 10.0, 1.0, 0.0, 1.0)
        tau, b = optimize_bound(p)
        assert tau == pytest.approx(0.8601203, abs=1e-6)
        assert b == pytest.approx(0.120511345, rel=1e-6)
        assert abs(brute_force_bound(p)[0] - tau) <= 1e-4

    def test_exact_is_tighter(self):
        _, rounded = optimize_bound(WORKED)
        tau, exact = optimize_bound(WORKED, "exact")
        assert 0 < tau < 1 and exact < rounded

    @given(st.floats(0.1, 10.0))
    @settings(max_examples=25)
    def test_scaling(self, c):
        p = SoProfile(1.0, 50.0 * c, 1.0 / c, 0.0, 1.0 * c)
        tau, b = optimize_bound(p)
        tau0, b0 = optimize_bound(WORKED)
        assert tau == pytest.approx(tau0 / c, rel=1e-6)
        assert b == pytest.approx(b0, rel=1e-8)

    def test_monotone_in_fs(self):
        fs = np.linspace(10.0, 200.0, 39)
        b = [optimize_bound(SoProfile(1.0, f, 1.0, 0.0, 1.0))[1] for f in fs]
        assert np.all(np.diff(b) <= 0)


def in_band_host(t):
    return np.sinc(t) ** 2  # |f| <= 1


class TestEmpirical:
    def profile(self):
        return SoProfile(1.0, 20.0, 1.0, -0.5, 1.0)

    def signal(self, half=200.0, dt=1e-3):
        n = int(round(2 * half / dt)) + 1
        return SampledSignal.from_function(in_band_host, -half, half, n)

    def test_tail_bound_dominates(self):
        p = self.profile()
        fs = FilterSpec(0.8, p.f_s)
        m = empirical_yield(self.signal(), p, fs)
        assert m.output_energy_convolution == pytest.approx(m.output_energy_spectral, rel=1e-6)
        assert m.output_energy_convolution <= tail_bound(fs, p.f_max, m.host_energy)

    def test_window_not_covered(self):
        p = SoProfile(1.0, 20.0, 1.0, 5.0, 1.0)
        with pytest.raises(ValueError):
            empirical_yield(self.signal(half=3.0), p, FilterSpec(0.5, 20.0))

    def test_log_channel_rejected(self):
        from superosc.specfun import LogSigned

        sig = SampledSignal.from_log(-1.0, 0.01, LogSigned(np.ones(201), np.where(np.arange(201) == 3, 800.0, 0.0)))
        with pytest.raises(ValueError):
            empirical_yield(sig, SoProfile(1.0, 20.0, 1.0, -0.5, 1.0), FilterSpec(0.5, 20.0))

    def test_tail_bound_small_argument(self):
        fs = FilterSpec(0.1, 20.0)
        assert tail_bound(fs, 1.0, 2.0) == pytest.approx((0.1 / 4) ** 2 * BUMP_PEAK**2 * 2.0)
