"""Discrete Fourier analysis of uniformly sampled signals.

Conventions: ``H(f) = int h(t) exp(-i 2 pi f t) dt`` approximated by the
DFT times ``dt`` with the phase of the grid origin restored, so a sampled
band-limited function yields samples of its continuous spectrum.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .specfun import LogSigned

__all__ = [
    "SampledSignal",
    "SpectrumEstimate",
    "spectrum",
    "out_of_band_energy",
    "tail_energy_floor",
    "energy",
    "sum_energy",
    "decay_order",
    "smooth_taper",
    "inverse_fourier_quad",
    "spectrum_to_csv",
]

# magnitudes beyond this are kept only in the log channel
_NATIVE_LOG10_LIMIT = 300.0


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Samples ``values[k] = h(t0 + k dt)`` with an optional log channel.

    ``authoritative[k]`` is True where the native float is exact enough to
    be used; elsewhere only ``(log_sign, log10_abs)`` carry the value.
    """

    t0: float
    dt: float
    values: np.ndarray
    log_sign: np.ndarray | None = None
    log10_abs: np.ndarray | None = None
    authoritative: np.ndarray | None = None
    coarse: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        auth = np.isfinite(v) if self.authoritative is None else np.asarray(self.authoritative, dtype=bool)
        object.__setattr__(self, "authoritative", auth)
        if not np.all(np.isfinite(v[auth])):
            raise ValueError("authoritative samples must be finite")
        for a in (v, auth):
            a.setflags(write=False)

    @classmethod
    def from_log(cls, t0: float, dt: float, log: LogSigned, **kw) -> "SampledSignal":
        """Build the dual-channel signal from log-form samples."""
        l10 = np.asarray(log.log10_abs, dtype=float)
        sign = np.asarray(log.sign, dtype=float)
        # underflow towards zero is harmless; only overflow needs the log channel
        auth = (sign == 0) | (l10 < _NATIVE_LOG10_LIMIT)
        vals = np.where(auth, log.to_float(), np.nan)
        return cls(t0, dt, vals, sign, l10, auth, **kw)

    @classmethod
    def from_function(cls, func, t_min: float, t_max: float, count: int) -> "SampledSignal":
        t = np.linspace(t_min, t_max, count)
        return cls(float(t[0]), float(t[1] - t[0]), func(t))

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.count)

    @property
    def fully_native(self) -> bool:
        return bool(np.all(self.authoritative))

    def window(self, lo: float, hi: float) -> "SampledSignal":
        """Sub-signal on the grid points inside [lo, hi]."""
        t = self.t
        sel = np.flatnonzero((t >= lo) & (t <= hi))
        if sel.size == 0:
            raise ValueError("window contains no samples")
        s = slice(sel[0], sel[-1] + 1)
        pick = (lambda a: None if a is None else a[s])
        return SampledSignal(
            float(t[sel[0]]), self.dt, self.values[s], pick(self.log_sign), pick(self.log10_abs),
            self.authoritative[s], self.coarse, dict(self.meta),
        )

    def to_csv(self) -> str:
        """CSV with a ``# t0=..., dt=...`` header and columns t, value, log10_abs, sign.

        Values are written with 17 significant digits so that reading the
        file back reproduces the samples bit for bit.
        """
        buf = io.StringIO()
        buf.write(f"# t0={self.t0!r} dt={self.dt!r} count={self.count}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value", "log10_abs", "sign"])
        l10 = self.log10_abs if self.log10_abs is not None else np.log10(np.abs(self.values))
        sg = self.log_sign if self.log_sign is not None else np.sign(self.values)
        for tk, v, a, l, s in zip(self.t, self.values, self.authoritative, l10, sg):
            w.writerow(["%.17g" % tk, "%.17g" % v if a else "nan", "%.17g" % l, "%d" % s])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledSignal":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing '# t0=... dt=...' header")
        hdr = dict(item.split("=", 1) for item in lines[0][1:].split())
        rows = list(csv.DictReader(lines[1:]))
        vals = np.array([float(r["value"]) for r in rows])
        l10 = np.array([float(r["log10_abs"]) for r in rows])
        sg = np.array([float(r["sign"]) for r in rows])
        auth = np.isfinite(vals)
        return cls(float(hdr["t0"]), float(hdr["dt"]), vals, sg, l10, auth)


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    """Sampled spectrum on ``freqs`` (ascending, fftshifted)."""

    freqs: np.ndarray
    amplitudes: np.ndarray
    df: float
    nyquist: float
    total_energy: float
    window: str = "none"

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def smooth_taper(count: int, edge_fraction: float = 0.1) -> np.ndarray:
    """Flat-top taper whose edges rise through a smooth (C-infinity) bump step.

    The step ``s(x) = 1 / (1 + exp(1/x - 1/(1-x)))`` on each edge has all
    derivatives vanishing at both ends, so the taper is at least C^2.
    """
    if not 0 < edge_fraction <= 0.5:
        raise ValueError("edge_fraction must lie in (0, 1/2]")
    x = np.linspace(0.0, 1.0, count)
    e = edge_fraction
    w = np.ones(count)

    def step(y):
        out = np.zeros_like(y)
        inside = (y > 0) & (y < 1)
        yi = y[inside]
        with np.errstate(over="ignore"):
            out[inside] = 1.0 / (1.0 + np.exp(1.0 / yi - 1.0 / (1.0 - yi)))
        out[y >= 1] = 1.0
        return out

    w *= step(x / e)
    w *= step((1.0 - x) / e)
    return w


def spectrum(sig: SampledSignal, window: str = "none") -> SpectrumEstimate:
    """DFT estimate of H(f), scaled by dt, with an optional ``"taper"`` window."""
    if not sig.fully_native:
        raise ValueError("signal has samples outside native range; window it first")
    h = sig.values
    if not np.all(np.isfinite(h)):
        raise ValueError("non-finite samples")
    if window == "taper":
        h = h * smooth_taper(h.size)
    elif window != "none":
        raise ValueError(f"unknown window {window!r}")
    n = h.size
    f = np.fft.fftshift(np.fft.fftfreq(n, sig.dt))
    H = np.fft.fftshift(np.fft.fft(h)) * sig.dt * np.exp(-2j * np.pi * f * sig.t0)
    df = 1.0 / (n * sig.dt)
    return SpectrumEstimate(f, H, df, 0.5 / sig.dt, float(np.sum(np.abs(H) ** 2) * df), window)


def out_of_band_energy(est: SpectrumEstimate, f_max: float) -> float:
    """Fraction of spectral energy at |f| > f_max."""
    if not f_max < est.nyquist:
        raise ValueError("f_max must lie below the Nyquist frequency")
    p = est.power
    tot = p.sum()
    if tot == 0:
        return 0.0
    return float(p[np.abs(est.freqs) > f_max].sum() / tot)


def energy(sig: SampledSignal) -> float:
    """Trapezoidal energy over native-channel samples (other samples are excluded)."""
    v = np.where(sig.authoritative, sig.values, 0.0)
    return float(np.trapezoid(v * v, dx=sig.dt))


def sum_energy(sig: SampledSignal) -> float:
    """Rectangle-rule energy sum |h|^2 dt (the Parseval partner of a DFT)."""
    v = np.where(sig.authoritative, sig.values, 0.0)
    return float(np.sum(v * v) * sig.dt)


def tail_energy_floor(sig: SampledSignal, decay: float) -> float:
    """Estimated energy fraction lost beyond the window for tails ~ |t|^decay.

    Each end contributes ``A^2 T / (-2 decay - 1)`` where A is the local
    peak amplitude at the end of the window (largest |h| over the last 5% of
    samples) and T the distance of that end from the window centre.
    """
    if not decay < -0.5:
        return math.inf
    v = np.where(sig.authoritative, sig.values, 0.0)
    n = v.size
    k = max(2, n // 20)
    t = sig.t
    centre = 0.5 * (t[0] + t[-1])
    total = 0.0
    for seg, T in ((v[:k], centre - t[0]), (v[-k:], t[-1] - centre)):
        a = float(np.max(np.abs(seg)))
        total += a * a * T / (-2.0 * decay - 1.0)
    e = sum_energy(sig)
    return total / e if e > 0 else math.inf


def decay_order(sig: SampledSignal, t_range) -> float:
    """Log-log slope of the upper envelope (local maxima) of |h| over t_range (t > 0)."""
    lo, hi = map(float, t_range)
    if not 0 < lo < hi:
        raise ValueError("t_range must satisfy 0 < lo < hi")
    t = sig.t
    sel = (t >= lo) & (t <= hi)
    if sig.log10_abs is not None:
        la = np.asarray(sig.log10_abs)[sel] * math.log(10.0)
    else:
        with np.errstate(divide="ignore"):
            la = np.log(np.abs(sig.values[sel]))
    ts = t[sel]
    if ts.size < 3:
        raise ValueError("too few samples in t_range")
    i = np.flatnonzero((la[1:-1] > la[:-2]) & (la[1:-1] >= la[2:])) + 1
    if i.size < 2:
        # monotone (or constant) magnitude: use every sample
        i = np.arange(ts.size)
    x, y = np.log(ts[i]), la[i]
    ok = np.isfinite(y)
    slope, _ = np.polyfit(x[ok], y[ok], 1)
    return float(slope)


def inverse_fourier_quad(smooth, half_width: float, t, edge_exponent: float = 0.0, tol: float = 1e-13):
    """Gauss-Jacobi quadrature of ``int_{-a}^{a} (1-(f/a)^2)^alpha S(f) e^{i 2 pi f t} df``.

    ``smooth`` is the even, smooth factor S (a vectorized callable); the
    edge behaviour ``(1-(f/a)^2)^alpha`` goes into the Jacobi weight, so the
    rule converges spectrally even when G has a branch point at the band edge.
    Returns the real part (S even); node count doubles until the change is
    below ``tol`` relative to the integral of |G|.
    """
    if not edge_exponent > -1:
        raise ValueError("edge_exponent must exceed -1 for an integrable spectrum")
    t = np.asarray(t, dtype=float)
    a = float(half_width)
    n = int(2 * math.pi * a * float(np.max(np.abs(t), initial=0.0))) + 32
    prev = None
    for _ in range(10):
        x, w = special.roots_jacobi(n, edge_exponent, edge_exponent)
        f = a * x
        sv = smooth(f)
        mass = a * float(np.sum(w * np.abs(sv)))
        val = a * np.cos(2 * np.pi * np.multiply.outer(t, f)) @ (w * sv)
        if prev is not None and np.all(np.abs(val - prev) <= tol * mass):
            return float(val) if val.ndim == 0 else val
        prev = val
        n *= 2
    raise RuntimeError("Gauss-Jacobi quadrature did not converge")


def spectrum_to_csv(est: SpectrumEstimate) -> str:
    """CSV columns f, re, im, power (12 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["f", "re", "im", "power"])
    for f, H in zip(est.freqs, est.amplitudes):
        w.writerow(["%.12g" % f, "%.12g" % H.real, "%.12g" % H.imag, "%.12g" % (abs(H) ** 2)])
    return buf.getvalue()
