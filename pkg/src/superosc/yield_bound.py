"""Upper bounds on the superoscillation yield E_s / E_h.

A band-limited host h (|f| <= f_max) that equals ``a_s cos(2 pi f_s t)``
over a window of length tau_s is passed through a bump-windowed cosine
filter of duration tau < tau_s tuned to f_s.  Inside the window the filter
output keeps a fraction of the superoscillation energy; outside the band
its gain is tiny, so the whole output energy is at most
``sup_{|f|<=f_max} |Q_tau(f)|^2 E_h``.  Comparing the two gives

    E_s / E_h <= exp{9 - 5 [tau (f_s - f_max)]^0.47} / (1 - tau/tau_s)

with the constants coming from the bump transform's stretched-exponential
tail fit.  :func:`yield_bound` offers this closed form, the same
expression with unrounded constants, and an exact variant that uses the
computed filter spectrum instead of the fitted tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envelope import bump_tail_envelope, bump_transform
from .spectral import SampledSignal

__all__ = [
    "SoProfile",
    "FilterSpec",
    "BUMP_PEAK",
    "TAIL_A",
    "TAIL_B",
    "TAIL_P",
    "ROUNDED_GAIN",
    "so_energy",
    "bump_peak",
    "filter_impulse",
    "filter_spectrum",
    "window_energy",
    "yield_bound",
    "optimize_bound",
    "brute_force_bound",
    "tail_bound",
    "empirical_yield",
    "YieldMeasurement",
    "profile_from_waveform",
]

# fitted tail of the bump transform: ln|g(x)| ~ TAIL_A - TAIL_B x^TAIL_P
TAIL_A = 3.70153
TAIL_B = 3.45055
TAIL_P = 0.47
# rounded filter gain at f_s, in units of tau
ROUNDED_GAIN = 0.11
_BRACKET = 64


@dataclass(frozen=True)
class SoProfile:
    """A host with a superoscillating stretch ``a_s cos(2 pi f_s t)`` on (t0, t0 + tau_s)."""

    a_s: float
    f_s: float
    tau_s: float
    t0: float
    f_max: float

    def __post_init__(self):
        if not self.f_s > self.f_max > 0:
            raise ValueError("need f_s > f_max > 0")
        if not self.tau_s > 0:
            raise ValueError("tau_s must be positive")
        if self.f_s * self.tau_s < 10:
            raise ValueError(f"f_s * tau_s = {self.f_s * self.tau_s:.3g}; at least 10 cycles are required")

    @property
    def gap(self) -> float:
        return self.f_s - self.f_max


@dataclass(frozen=True)
class FilterSpec:
    """Bump-windowed cosine of duration ``tau`` tuned to ``f_s``; ``bandwidth`` is descriptive only."""

    tau: float
    f_s: float
    bandwidth: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    def check_for(self, p: SoProfile, allow_full: bool = False):
        ok = self.tau <= p.tau_s if allow_full else self.tau < p.tau_s
        if not ok:
            raise ValueError("filter duration must be shorter than the superoscillating window")


def so_energy(p: SoProfile) -> float:
    """Energy of the superoscillating stretch, a_s^2 tau_s / 2."""
    return 0.5 * p.a_s**2 * p.tau_s


def bump_peak() -> float:
    """Integral of exp[1/(f^2 - 1)] over (-1, 1), the peak of its transform (~0.444)."""
    return float(bump_transform(np.array([0.0]))[0])


BUMP_PEAK = 0.44399381616807943


def filter_impulse(fs: FilterSpec, t):
    """``exp{1/[(2t/tau)^2 - 1]} cos(2 pi f_s t)`` on |t| < tau/2, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    u = 2.0 * t / fs.tau
    inside = np.abs(u) < 1.0
    ui = np.where(inside, u, 0.0)
    with np.errstate(under="ignore"):
        out = np.where(inside, np.exp(1.0 / (ui * ui - 1.0)) * np.cos(2 * np.pi * fs.f_s * t), 0.0)
    return float(out) if out.ndim == 0 else out


def filter_spectrum(fs: FilterSpec, f):
    """Both shifted copies: ``(tau/4) {Qh[tau(f - f_s)/2] + Qh[tau(f + f_s)/2]}``."""
    f = np.asarray(f, dtype=float)
    x1 = fs.tau * (f - fs.f_s) / 2.0
    x2 = fs.tau * (f + fs.f_s) / 2.0
    out = 0.25 * fs.tau * (np.asarray(bump_transform(x1)) + np.asarray(bump_transform(x2)))
    return float(out) if out.ndim == 0 else out


def _band_sup_sq(fs: FilterSpec, f_max: float) -> float:
    """sup of |Q_tau(f)|^2 over |f| <= f_max (Q_tau is even)."""
    width = fs.tau * f_max / 2.0
    n = max(65, int(math.ceil(width * 64)) + 1)
    f = np.linspace(0.0, f_max, n)
    q = np.abs(filter_spectrum(fs, f))
    i = int(np.argmax(q))
    best = q[i]
    if 0 < i < n - 1:
        # parabolic polish of an interior maximum
        y0, y1, y2 = q[i - 1], q[i], q[i + 1]
        den = y0 - 2 * y1 + y2
        if den < 0:
            d = 0.5 * (y0 - y2) / den
            best = max(best, abs(filter_spectrum(fs, f[i] + d * (f[1] - f[0]))))
    return float(best) ** 2


def window_energy(fs: FilterSpec, p: SoProfile, mode: str = "rounded") -> float:
    """Filter output energy collected inside the superoscillating window.

    ``"rounded"``: 0.0121 tau^2 (1 - tau/tau_s) E_s from the rounded gain 0.11 tau.
    ``"exact"``: (1/2) (Q_tau(f_s) a_s)^2 (tau_s - tau) with the computed gain.
    A filter as long as the window (tau = tau_s) collects nothing.
    """
    fs.check_for(p, allow_full=True)
    if mode == "rounded":
        return ROUNDED_GAIN**2 * fs.tau**2 * (1.0 - fs.tau / p.tau_s) * so_energy(p)
    if mode == "exact":
        g = filter_spectrum(fs, p.f_s)
        return 0.5 * (g * p.a_s) ** 2 * (p.tau_s - fs.tau)
    raise ValueError(f"unknown mode {mode!r}")


def _unrounded_constants():
    c0 = -math.log(16.0 * ROUNDED_GAIN**2) + 2.0 * TAIL_A
    c1 = 2.0 * TAIL_B * 0.5**TAIL_P
    return c0, c1


def yield_bound(p: SoProfile, tau, method: str = "rounded"):
    """Upper bound on E_s/E_h for filter duration tau in (0, tau_s).

    ``"rounded"``: exp{9 - 5 [tau (f_s - f_max)]^0.47} / (1 - tau/tau_s).
    ``"unrounded"``: same chain with the constants before rounding
    (9.045 and 4.982).
    ``"exact"``: sup_{|f|<=f_max} |Q_tau|^2 / [Q_tau(f_s)^2 (1 - tau/tau_s)].
    """
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr <= 0) or np.any(tau_arr >= p.tau_s):
        raise ValueError("tau must lie in (0, tau_s)")
    denom = 1.0 - tau_arr / p.tau_s
    x = tau_arr * p.gap
    if method == "rounded":
        out = np.exp(9.0 - 5.0 * x**TAIL_P) / denom
    elif method == "unrounded":
        c0, c1 = _unrounded_constants()
        out = np.exp(c0 - c1 * x**TAIL_P) / denom
    elif method == "exact":
        flat = np.atleast_1d(tau_arr).ravel()
        vals = []
        for tv in flat:
            fs = FilterSpec(float(tv), p.f_s)
            vals.append(_band_sup_sq(fs, p.f_max) / filter_spectrum(fs, p.f_s) ** 2)
        out = np.asarray(vals).reshape(tau_arr.shape) / denom
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if out.ndim == 0 else out


def _golden(fun, a, b, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def optimize_bound(p: SoProfile, method: str = "rounded", tol: float = 1e-8) -> tuple[float, float]:
    """Minimize :func:`yield_bound` over tau; returns (tau*, bound*).

    64 log-spaced candidates in (0, tau_s) locate a bracket, which golden
    section then shrinks to ``tol * tau_s``.  The bound is minimized in log
    form, which keeps the flat vacuous plateau at small tau harmless.
    """
    ts = p.tau_s * np.logspace(-6, math.log10(1.0 - 1e-6), _BRACKET)

    def lb(tau):
        return math.log(yield_bound(p, float(tau), method))

    vals = np.array([lb(t) for t in ts])
    i = int(np.argmin(vals))
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, ts.size - 1)]
    tau_star = _golden(lb, a, b, tol * p.tau_s)
    return float(tau_star), float(yield_bound(p, tau_star, method))


def brute_force_bound(p: SoProfile, points: int = 100_000, method: str = "rounded") -> tuple[float, float]:
    """Dense uniform tau grid minimum (an independent check on :func:`optimize_bound`)."""
    ts = np.linspace(0.0, p.tau_s, points + 2)[1:-1]
    vals = yield_bound(p, ts, method)
    i = int(np.argmin(vals))
    return float(ts[i]), float(vals[i])


def tail_bound(fs: FilterSpec, f_max: float, host_energy: float) -> float:
    """Output-energy ceiling for a host confined to |f| <= f_max.

    Uses the lower shifted copy only, ``(tau/4)^2 Qh_env^2 E_h``, where
    ``Qh_env`` is the modulus envelope of the bump transform at
    ``tau (f_s - f_max)/2`` (or its peak value 0.444 when that argument is
    below 3, where no tail envelope exists).
    """
    x = fs.tau * (fs.f_s - f_max) / 2.0
    if x >= 3.0:
        log_q = float(bump_tail_envelope(np.array([x]))[0])
    else:
        log_q = math.log(BUMP_PEAK)
    return (fs.tau / 4.0) ** 2 * math.exp(2.0 * log_q) * host_energy


@dataclass(frozen=True)
class YieldMeasurement:
    measured_yield: float
    so_energy: float
    host_energy: float
    output_energy_convolution: float
    output_energy_spectral: float


def empirical_yield(sig: SampledSignal, p: SoProfile, fs: FilterSpec, rtol: float = 1e-6) -> YieldMeasurement:
    """Measure E_s/E_h on a sampled host and the filter output energy two ways.

    E_s is the energy of the samples inside (t0, t0 + tau_s); E_h the
    energy of all samples.  The output energy is computed by direct
    discrete convolution and by the product of zero-padded DFTs; the two
    must agree to ``rtol``.
    """
    if not sig.fully_native:
        raise ValueError("signal must be native-range over the analysis window")
    if sig.t[0] > p.t0 or sig.t[-1] < p.t0 + p.tau_s:
        raise ValueError("signal does not cover the superoscillating window")
    half = int(math.floor(fs.tau / 2.0 / sig.dt))
    if 2 * half + 1 > sig.count:
        raise ValueError("filter support exceeds the signal length")
    h = sig.values
    dt = sig.dt
    t = sig.t
    inside = (t >= p.t0) & (t <= p.t0 + p.tau_s)
    e_s = float(np.sum(h[inside] ** 2) * dt)
    e_h = float(np.sum(h * h) * dt)
    taps = filter_impulse(fs, dt * np.arange(-half, half + 1))
    y = np.convolve(h, taps) * dt
    e_conv = float(np.sum(y * y) * dt)
    n = h.size + taps.size - 1
    Y = np.fft.rfft(h, n) * np.fft.rfft(taps, n) * dt
    # Parseval for a real sequence from its half spectrum
    w = np.full(Y.size, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    e_spec = float(np.sum(w * np.abs(Y) ** 2) * dt / n)
    if abs(e_conv - e_spec) > rtol * max(e_conv, e_spec):
        raise RuntimeError(f"convolution and spectral output energies differ: {e_conv!r} vs {e_spec!r}")
    return YieldMeasurement(e_s / e_h, e_s, e_h, e_conv, e_spec)


def profile_from_waveform(spec) -> SoProfile:
    """Superoscillation profile of a cosine-zero waveform.

    The window is the span |t| < N/(2 f0) holding all 2N reproduced zeros
    (tau_s = N/f0, so f_s tau_s = N); the amplitude is |h(0)| and the host
    bandwidth is the envelope band half-width.
    """
    from .euler import CosineZeroParams
    from .waveform import eval as eval_waveform

    z = spec.zeros
    if not isinstance(z, CosineZeroParams):
        raise ValueError("profile needs cosine zero parameters")
    a_s = abs(float(np.asarray(eval_waveform(spec, np.array([0.0])))[0]))
    return SoProfile(a_s, z.f0, z.N / z.f0, -z.outer_zero, spec.band_halfwidth)
