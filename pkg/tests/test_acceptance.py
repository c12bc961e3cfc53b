"""Acceptance criteria 1-10, each run at its stated tolerance and time limit.

Every test appends one PASS/FAIL line to the terminal summary, then asserts.
"""
import math
import time

import numpy as np
from conftest import ACCEPTANCE_LINES
from reference import envelope_by_quadrature, pv_fourier_of_pole, sampled

from superosc import spectral, waveform
from superosc.envelope import EnvelopeSpec, fit_tail_decay, log_time_value, spectrum_value, tabulate_bump, time_value
from superosc.euler import CosineZeroParams, cosine_zeros, product, product_direct, product_gamma_form
from superosc.yield_bound import FilterSpec, SoProfile, brute_force_bound, empirical_yield, optimize_bound, profile_from_waveform
from superosc.zero_ops import ZeroLedger, hilbert_kernel_ft, remove_zero


def report(k, ok, elapsed, limit, detail):
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    ACCEPTANCE_LINES.append(f"{status} criterion {k}: {detail} [{elapsed:.2f} s / {limit:g} s]")
    assert ok, detail
    assert in_time, f"criterion {k} took {elapsed:.2f} s (limit {limit:g} s)"


def amplitude_ratios(N, f0=1.0):
    p = CosineZeroParams(f0, N)
    k = np.arange(0, int(math.floor(2 * f0 * p.so_halfwidth + 1e-12)) + 1)
    t = k / (2 * f0)
    lg = product(p, t)
    return np.exp(lg.log_mag - np.log(np.abs(np.cos(2 * np.pi * f0 * t)))), lg


def test_criterion_1_euler_amplitude_band():
    start = time.perf_counter()
    lo, hi = math.inf, -math.inf
    for N in (100, 1000, 10_000, 40_000):
        r, _ = amplitude_ratios(N)
        lo, hi = min(lo, r.min()), max(hi, r.max())
    # zero locations on the gamma path at N = 4e4
    p = CosineZeroParams(1.0, 40_000)
    n = np.random.default_rng(1).integers(1, p.N + 1, 200)
    tn = (2 * n - 1) / 4.0
    at = product_gamma_form(p, tn)
    side = product_gamma_form(p, np.concatenate([tn - 1e-6, tn + 1e-6]))
    zeros_ok = bool(np.all(at.sign == 0) and np.all(side.sign[:200] * side.sign[200:] < 0))
    elapsed = time.perf_counter() - start
    ok = 1.0 - 1e-12 <= lo and hi <= 1.30 and zeros_ok
    report(1, ok, elapsed, 5, f"ratio range [{lo:.6f}, {hi:.6f}] within [1, 1.30]; N=4e4 zeros exact: {zeros_ok}")


def test_criterion_2_gamma_form_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        N = int(rng.integers(1, 10_001))
        f0 = float(rng.uniform(0.5, 100.0))
        p = CosineZeroParams(f0, N)
        t = rng.uniform(-2.0, 2.0, 100) * p.outer_zero
        a, b = product_direct(cosine_zeros(p), t), product_gamma_form(p, t)
        assert np.array_equal(a.sign, b.sign)
        worst = max(worst, float(np.max(np.abs(np.expm1(a.log_mag - b.log_mag)))))
    elapsed = time.perf_counter() - start
    report(2, worst <= 1e-8, elapsed, 10, f"max relative difference {worst:.2e} over 1000 points (limit 1e-8)")


def test_criterion_3_bump_values():
    start = time.perf_counter()
    bump = EnvelopeSpec("bump")
    g0 = float(time_value(bump, 0.0))
    G0 = float(spectrum_value(bump, 0.0))
    l10 = log_time_value(bump, np.array([-500.0, 500.0])).log10_abs
    table = tabulate_bump(bump, 600.0, oversample=4.0)
    i = int(np.argmin(np.abs(table.t - 500.0)))
    tl10 = table.log.log10_abs[[table.values.size - 1 - i, i]]
    elapsed = time.perf_counter() - start
    ok = abs(g0 - 0.44) <= 0.01 and G0 == math.exp(-1) and np.all((l10 >= -28) & (l10 <= -26)) and np.all((tl10 >= -28) & (tl10 <= -26))
    report(3, ok, elapsed, 30, f"g(0)={g0:.6f}, G(0)==1/e: {G0 == math.exp(-1)}, log10|g(+-500)|={l10[1]:.3f}")


def test_criterion_4_bump_waveform_peak():
    start = time.perf_counter()
    spec = waveform.WaveformSpec(EnvelopeSpec("bump", power=5), CosineZeroParams(50.0, 10))
    d = waveform.diagnostics(spec, t_max=80.0)
    elapsed = time.perf_counter() - start
    ok = abs(d.h_at_zero / 0.0165 - 1) <= 0.05 and abs(d.log10_h_max - 40.6) <= 0.5
    report(4, ok, elapsed, 60, f"h(0)={d.h_at_zero:.6f} (0.0165 +- 5%), log10 max|h|={d.log10_h_max:.3f} at t={d.t_of_h_max:.2f} s")


def test_criterion_5_tail_fit():
    start = time.perf_counter()
    table = tabulate_bump(EnvelopeSpec("bump"), 1e4, oversample=4.0)
    a, b, p, n = fit_tail_decay(table, (1e2, 1e4))
    elapsed = time.perf_counter() - start
    ok = abs(p - 0.47) <= 0.02 and abs(a / 3.70 - 1) <= 0.05 and abs(b / 3.45 - 1) <= 0.05
    report(5, ok, elapsed, 120, f"free fit a={a:.4f}, b={b:.4f}, p={p:.4f} (target p=0.47+-0.02, a=3.70, b=3.45 within 5%)")


def test_criterion_6_yield_bound_example():
    start = time.perf_counter()
    prof = SoProfile(1.0, 50.0, 1.0, 0.0, 1.0)
    tau, bound = optimize_bound(prof)
    bt, _ = brute_force_bound(prof, 100_000)
    elapsed = time.perf_counter() - start
    ok = abs(tau - 0.934) <= 1e-3 and abs(bound / 0.979e-8 - 1) <= 0.02 and abs(bt - tau) <= 1e-4
    report(6, ok, elapsed, 1, f"tau*={tau:.6f}, bound*={bound:.4e}, brute-force tau={bt:.6f}")


CLOSED_FORM = [EnvelopeSpec("poly")] + [EnvelopeSpec(fam, kappa=k) for fam in ("gegenbauer", "cospower") for k in (0.0, 1.0, 2.5)]


def test_criterion_7_fourier_pairs():
    start = time.perf_counter()
    t = np.linspace(0.05, 9.55, 20)
    worst = 0.0
    for spec in CLOSED_FORM:
        q = envelope_by_quadrature(spec, t)
        worst = max(worst, float(np.max(np.abs(q - time_value(spec, t)) / np.abs(time_value(spec, t)))))
    elapsed = time.perf_counter() - start
    report(7, worst <= 1e-8, elapsed, 10, f"max pointwise relative error {worst:.2e} over 7 envelopes x 20 points")


def test_criterion_8_zero_removal():
    start = time.perf_counter()
    sinc2 = EnvelopeSpec.raised("sinc", 2)
    L = ZeroLedger(sinc2)
    R = remove_zero(L, 1.0)
    base = spectral.out_of_band_energy(spectral.spectrum(sampled(L, 400.0, 0.125)), 1.0)
    removed = spectral.out_of_band_energy(spectral.spectrum(sampled(R, 400.0, 0.125)), 1.0)
    pts = [(0.0, 1.0), (0.25, 1.0), (0.7, -2.3), (-1.3, 0.4), (3.1, 0.05), (1.0, -0.7), (-0.4, 1.9), (2.2, 0.33), (0.05, -0.15), (-2.7, 1.1)]
    kernel_err = max(abs(pv_fourier_of_pole(t1, f) - hilbert_kernel_ft(t1, f)) for t1, f in pts)
    elapsed = time.perf_counter() - start
    ok = removed <= base + 1e-8 and kernel_err <= 1e-6
    report(8, ok, elapsed, 30, f"out-of-band base {base:.2e}, after removal {removed:.2e}; kernel max error {kernel_err:.2e}")


def test_criterion_9_validity_and_tails():
    start = time.perf_counter()
    N = 10

    def spec(nu):
        return waveform.WaveformSpec(EnvelopeSpec("sinc", power=nu), CosineZeroParams(50.0, N))

    rejected = not waveform.validate(spec(2 * N)).passed
    passes = waveform.validate(spec(2 * N + 1)).passed
    orders = {}
    for nu in (2 * N + 1, 2 * N + 2):
        sig = waveform.sample(spec(nu), (1000.0, 10000.0), rate=4)
        orders[nu] = spectral.decay_order(sig, (1000.0, 10000.0))
    elapsed = time.perf_counter() - start
    ok = rejected and passes and abs(orders[21] + 1) <= 0.1 and abs(orders[22] + 2) <= 0.1
    report(9, ok, elapsed, 60, f"nu=20 rejected: {rejected}, nu=21 passes: {passes}, decay orders {orders[21]:.4f} / {orders[22]:.4f}")


def test_criterion_10_bound_dominates_measurement():
    start = time.perf_counter()
    spec = waveform.WaveformSpec(EnvelopeSpec("sinc", power=21), CosineZeroParams(50.0, 10), "moderate instance")
    prof = profile_from_waveform(spec)
    tau, bound = optimize_bound(prof)
    sig = waveform.sample(spec, (-1000.0, 1000.0), rate=1600)
    m = empirical_yield(sig, prof, FilterSpec(tau, prof.f_s))
    elapsed = time.perf_counter() - start
    ok = m.measured_yield <= bound
    report(10, ok, elapsed, 120, f"measured yield {m.measured_yield:.3e} <= bound* {bound:.3e} (tau*={tau:.4f} s)")
