"""Superoscillating waveforms: envelope times truncated Euler product.

``h(t) = g_c(t) * prod_n [1 - (t/t_n)]`` where ``g_c`` is a composed
band-limited envelope (optionally with zeros added or removed) and the
product reproduces the first 2N zeros of ``cos(2 pi f0 t)``.  The product
is a polynomial of degree 2N, so h keeps the envelope's band and is square
integrable as long as the envelope tails beat |t|^(2N + 1/2).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .envelope import EnvelopeSpec, Family, log_time_value
from .euler import CosineZeroParams, ZeroSet, product
from .spectral import SampledSignal
from .specfun import LogSigned
from .zero_ops import ZeroLedger, ZeroOp

__all__ = [
    "WaveformSpec",
    "ValidityReport",
    "WaveformDiagnostics",
    "validate",
    "eval_log",
    "eval",
    "sample",
    "diagnostics",
    "so_fidelity",
    "DEFAULT_SAMPLES_PER_PERIOD",
]

DEFAULT_SAMPLES_PER_PERIOD = 32
_MIN_SAMPLES_PER_PERIOD = 8


@dataclass(frozen=True)
class WaveformSpec:
    """Envelope, oscillatory zero source and optional envelope zero operations.

    ``zeros`` is a :class:`CosineZeroParams`, an explicit :class:`ZeroSet`
    or None (envelope only).  ``envelope_ops`` is the ordered list of zero
    additions/removals applied to the envelope before multiplying by the
    product.
    """

    envelope: EnvelopeSpec
    zeros: CosineZeroParams | ZeroSet | None = None
    label: str = ""
    envelope_ops: tuple[ZeroOp, ...] = field(default=())

    @property
    def degree(self) -> int:
        return 0 if self.zeros is None else self.zeros.degree

    @property
    def f0(self) -> float | None:
        return self.zeros.f0 if isinstance(self.zeros, CosineZeroParams) else None

    @property
    def envelope_ledger(self) -> ZeroLedger:
        return ZeroLedger(self.envelope, tuple(self.envelope_ops))

    @property
    def envelope_tail_order(self) -> float:
        return self.envelope_ledger.tail_order

    @property
    def tail_order(self) -> float:
        """Decay exponent d of h itself, |h| ~ |t|^-d (inf for the bump family)."""
        return self.envelope_tail_order - self.degree

    @property
    def zero_spacing(self) -> float:
        return self.envelope.zero_spacing

    @property
    def band_halfwidth(self) -> float:
        return self.envelope.band_halfwidth

    def log_eval(self, t) -> LogSigned:
        return eval_log(self, t)

    # ------------------------------------------------------------ JSON

    def to_dict(self) -> dict:
        d: dict = {"label": self.label, "envelope": self.envelope.to_dict()}
        if isinstance(self.zeros, CosineZeroParams):
            d["zeros"] = {"cosine": {"f0": self.zeros.f0, "N": self.zeros.N}}
        elif isinstance(self.zeros, ZeroSet):
            d["zeros"] = {"explicit": self.zeros.to_list()}
        else:
            d["zeros"] = None
        if self.envelope_ops:
            d["envelope_ops"] = [o.to_dict() for o in self.envelope_ops]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "WaveformSpec":
        extra = set(d) - {"label", "envelope", "zeros", "envelope_ops"}
        if extra:
            raise ValueError(f"unknown waveform fields: {sorted(extra)}")
        env = EnvelopeSpec.from_dict(d["envelope"])
        z = d.get("zeros")
        if z is None:
            zeros = None
        elif "cosine" in z:
            zeros = CosineZeroParams(float(z["cosine"]["f0"]), int(z["cosine"]["N"]))
        elif "explicit" in z:
            zeros = ZeroSet.from_list(z["explicit"])
        else:
            raise ValueError("zeros must hold 'cosine' or 'explicit'")
        ops = tuple(ZeroOp.from_dict(o) for o in d.get("envelope_ops", ()))
        return cls(env, zeros, str(d.get("label", "")), ops)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "WaveformSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ValidityReport:
    passed: bool
    condition: str
    tail_law: str
    tail_exponent: float  # |h| ~ |t|^tail_exponent; -inf for stretched-exponential tails
    superoscillatory: bool

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "condition": self.condition,
            "tail_law": self.tail_law,
            "tail_exponent": self.tail_exponent,
            "superoscillatory": self.superoscillatory,
        }


def validate(spec: WaveformSpec) -> ValidityReport:
    """Square-integrability and superoscillation check.

    h decays as |t|^(2N - d) for an envelope with power-law tails |t|^-d,
    so it is square integrable iff d > 2N + 1/2.  For a sinc^nu envelope
    (d = nu) that is nu > 2N.  Bump envelopes decay faster than any power
    and pass for every N.
    """
    d = spec.envelope_tail_order
    deg = spec.degree
    f0 = spec.f0
    so = f0 is not None and f0 > spec.band_halfwidth
    if math.isinf(d):
        return ValidityReport(True, "stretched-exponential envelope tails dominate any polynomial", "stretched-exponential", -math.inf, so)
    expo = deg - d
    ok = d > deg + 0.5
    if spec.envelope.family is Family.SINC and not spec.envelope_ops:
        nu = spec.envelope.power
        cond = f"ν = {nu} > 2N = {deg}" if ok else f"ν = {nu} ≤ 2N = {deg}: not square-integrable"
    else:
        cond = (
            f"envelope decay order {d:g} > degree {deg} + 1/2"
            if ok
            else f"envelope decay order {d:g} <= degree {deg} + 1/2: not square-integrable"
        )
    return ValidityReport(bool(ok), cond, f"|t|^{expo:g}", float(expo), so)


def eval_log(spec: WaveformSpec, t) -> LogSigned:
    """h(t) in sign/log form (gamma form for cosine zeros, direct product otherwise)."""
    t = np.asarray(t, dtype=float)
    if spec.envelope_ops:
        env = spec.envelope_ledger.log_eval(t)
    else:
        env = log_time_value(spec.envelope, t)
    return env * product(spec.zeros, t)


def eval(spec: WaveformSpec, t):
    """h(t) in native floating point (overflows to +-inf)."""
    return eval_log(spec, t).to_float()


def sample(spec: WaveformSpec, t_range, count: int | None = None, rate: float | None = None) -> SampledSignal:
    """Uniform samples over ``t_range`` as a dual-channel :class:`SampledSignal`.

    Give ``count`` (>= 2) or ``rate`` (samples per second).  Without either,
    the rate is 32 samples per 1/f0.  ``coarse`` is set when the grid has
    fewer than 8 samples per 1/f0.
    """
    lo, hi = map(float, t_range)
    if not hi > lo:
        raise ValueError("t_range must be increasing")
    if count is None:
        if rate is None:
            f_ref = spec.f0 or spec.band_halfwidth
            rate = DEFAULT_SAMPLES_PER_PERIOD * f_ref
        count = int(math.floor((hi - lo) * rate + 1e-9)) + 1
    if count < 2:
        raise ValueError("count must be at least 2")
    dt = (hi - lo) / (count - 1)
    # centred offsets are exact half-integers, so a symmetric range gives an exactly symmetric grid
    t = 0.5 * (lo + hi) + dt * (np.arange(count) - 0.5 * (count - 1))
    log = eval_log(spec, t)
    f_ref = spec.f0 or spec.band_halfwidth
    coarse = dt * f_ref > 1.0 / _MIN_SAMPLES_PER_PERIOD
    return SampledSignal.from_log(float(t[0]), dt, log, coarse=coarse, meta={"label": spec.label})


@dataclass(frozen=True)
class WaveformDiagnostics:
    so_interval: float
    outer_zero: float
    h_at_zero: float
    log10_h_max: float
    t_of_h_max: float

    def to_dict(self) -> dict:
        return {
            "so_interval": self.so_interval,
            "outer_zero": self.outer_zero,
            "h_at_zero": self.h_at_zero,
            "log10_h_max": self.log10_h_max,
            "t_of_h_max": self.t_of_h_max,
        }


def _log_abs(spec, t):
    return np.asarray(eval_log(spec, t).log_mag, dtype=float)


def _peak_search(spec: WaveformSpec, t_max: float):
    """Largest |h| on [0, t_max]: dense scan, then a bounded refinement."""
    zs = spec.zero_spacing
    pieces = []
    f0 = spec.f0
    if f0 is not None:
        inner = min(t_max, spec.zeros.outer_zero * 1.05)
        pieces.append(np.linspace(0.0, inner, int(inner * f0 * 32) + 2))
        start = inner
    else:
        start = 0.0
    if t_max > start:
        pieces.append(np.linspace(start, t_max, int((t_max - start) / zs * 64) + 2))
    grid = np.unique(np.concatenate(pieces))
    la = _log_abs(spec, grid)
    i = int(np.nanargmax(la))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    if b > a:
        res = optimize.minimize_scalar(lambda x: -_log_abs(spec, np.array([x]))[0], bounds=(a, b), method="bounded", options={"xatol": 1e-10 * max(1.0, b)})
        if -res.fun > la[i]:
            return float(res.x), float(-res.fun)
    return float(grid[i]), float(la[i])


def diagnostics(spec: WaveformSpec, t_max: float | None = None) -> WaveformDiagnostics:
    """Superoscillation interval, outer zero, h(0) and the global peak of |h|.

    The peak is searched on |t| <= t_max (h is assumed even).  Without
    t_max the window starts at twice the outer zero plus a few envelope
    lobes and doubles until the peak sits in its inner half (at most 12
    doublings).
    """
    if not isinstance(spec.zeros, CosineZeroParams):
        raise ValueError("diagnostics need cosine zero parameters")
    p = spec.zeros
    h0 = float(eval(spec, np.array([0.0]))[0])
    if t_max is not None:
        tp, lp = _peak_search(spec, float(t_max))
    else:
        T = 2.0 * p.outer_zero + 8.0 * spec.zero_spacing
        for _ in range(12):
            tp, lp = _peak_search(spec, T)
            if tp < 0.5 * T:
                break
            T *= 2.0
    return WaveformDiagnostics(p.so_halfwidth, p.outer_zero, h0, lp / math.log(10.0), tp)


def so_fidelity(spec: WaveformSpec) -> float:
    """Max of |h(t)| / (h(0) |cos 2 pi f0 t|) over cosine extrema t = k/(2 f0) in the superoscillating interval."""
    if not isinstance(spec.zeros, CosineZeroParams):
        raise ValueError("so_fidelity needs cosine zero parameters")
    p = spec.zeros
    kmax = int(math.floor(p.so_halfwidth * 2.0 * p.f0 + 1e-12))
    tk = np.arange(-kmax, kmax + 1) / (2.0 * p.f0)
    la = _log_abs(spec, tk)
    l0 = _log_abs(spec, np.array([0.0]))[0]
    return float(np.exp(np.max(la) - l0))
