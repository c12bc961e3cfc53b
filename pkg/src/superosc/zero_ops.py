"""Adding, removing and shifting real zeros of band-limited functions.

Multiplying by ``1 - t/t0`` (or by ``t`` when t0 = 0) adds a zero and
keeps the band; dividing by ``1 - t/t1`` removes an existing zero and
cannot widen the band.  A :class:`ZeroLedger` records an ordered list of
such operations on a base function and evaluates the result.

Near a removed zero the quotient is a 0/0 limit.  It is evaluated from a
degree-8 interpolating polynomial of the numerator on a Chebyshev stencil
around the zero, divided exactly by ``(t - t1)^k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from .envelope import EnvelopeSpec, log_time_value
from .specfun import LogSigned

__all__ = [
    "ZeroOp",
    "ZeroLedger",
    "ZeroVerificationError",
    "SquareIntegrabilityError",
    "add_zero",
    "remove_zero",
    "shift_zero",
    "hilbert_kernel_ft",
]

_STENCIL_DEGREE = 8
_STENCIL_FRACTION = 0.05  # stencil half-width in units of the zero spacing
_NEAR_FRACTION = 1e-3  # use the polynomial quotient within this * zero spacing
_ZERO_TOL = 1e-8
_DERIV_TOL = 1e-6
_SNAP_FRACTION = 1e-12
_NODES = np.cos(np.pi * (np.arange(_STENCIL_DEGREE + 1) + 0.5) / (_STENCIL_DEGREE + 1))


class ZeroVerificationError(ValueError):
    """The requested location is not a zero of the required multiplicity."""


class SquareIntegrabilityError(ValueError):
    """Adding a zero would leave tails too slow for square integrability."""


@dataclass(frozen=True)
class ZeroOp:
    """One ledger entry: ``kind`` is "add" or "remove".

    ``refined`` holds the polished location used for a removal.
    """

    kind: str
    t: float
    multiplicity: int = 1
    refined: float | None = None

    def to_dict(self) -> dict:
        d = {"op": self.kind, "t": self.t, "multiplicity": self.multiplicity}
        if self.refined is not None:
            d["refined"] = self.refined
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ZeroOp":
        if d["op"] not in ("add", "remove"):
            raise ValueError(f"unknown zero operation {d['op']!r}")
        return cls(d["op"], float(d["t"]), int(d.get("multiplicity", 1)), d.get("refined"))


def _base_log(base, t) -> LogSigned:
    if isinstance(base, EnvelopeSpec):
        return log_time_value(base, t)
    return base.log_eval(t)


@dataclass(frozen=True)
class ZeroLedger:
    """A base function together with an ordered list of zero operations.

    ``base`` is an :class:`EnvelopeSpec` or any object exposing
    ``log_eval(t)``, ``tail_order`` and ``zero_spacing``.
    """

    base: object
    ops: tuple[ZeroOp, ...] = ()

    @property
    def added(self) -> list[tuple[float, int]]:
        return [(o.t, o.multiplicity) for o in self.ops if o.kind == "add"]

    @property
    def removed(self) -> list[tuple[float, int]]:
        return [(o.t, o.multiplicity) for o in self.ops if o.kind == "remove"]

    @property
    def net_decay_delta(self) -> int:
        return sum(k for _, k in self.removed) - sum(k for _, k in self.added)

    @property
    def tail_order(self) -> float:
        """Power-law decay exponent d of the modified function, |f| ~ |t|^-d."""
        return self.base.tail_order + self.net_decay_delta

    @property
    def zero_spacing(self) -> float:
        return self.base.zero_spacing

    @property
    def band_halfwidth(self) -> float:
        return self.base.band_halfwidth

    def ops_to_list(self) -> list[dict]:
        return [o.to_dict() for o in self.ops]

    # ------------------------------------------------------------ evaluation

    def log_eval(self, t) -> LogSigned:
        return self._eval_upto(len(self.ops), np.asarray(t, dtype=float))

    def __call__(self, t):
        return self.log_eval(t).to_float()

    def _eval_upto(self, j: int, t: np.ndarray) -> LogSigned:
        if j == 0:
            return _base_log(self.base, t)
        op = self.ops[j - 1]
        prev = self._eval_upto(j - 1, t)
        if op.kind == "add":
            return prev * _linear_factor(op.t, t) ** op.multiplicity
        t1 = op.refined if op.refined is not None else op.t
        k = op.multiplicity
        scale = self.zero_spacing
        near = np.abs(t - t1) < _NEAR_FRACTION * scale
        fac = _linear_factor(t1, np.where(near, t1 + scale, t))
        out = prev / fac**k
        if np.any(near):
            q = self._quotient_near(j - 1, t1, k, t[near])
            s, lm = np.array(out.sign, ndmin=1), np.array(out.log_mag, ndmin=1)
            s = np.broadcast_to(s, t.shape).copy()
            lm = np.broadcast_to(lm, t.shape).copy()
            s[near], lm[near] = q.sign, q.log_mag
            out = LogSigned(s.reshape(t.shape), lm.reshape(t.shape))
        return out

    def _stencil(self, j: int, t1: float):
        delta = _STENCIL_FRACTION * self.zero_spacing
        vals = self._eval_upto(j, t1 + delta * _NODES)
        ref = float(np.max(vals.log_mag))
        y = np.asarray((vals * LogSigned(1.0, -ref)).to_float())
        coef = P.polyfit(_NODES, y, _STENCIL_DEGREE)
        return coef, ref, delta

    def _quotient_near(self, j: int, t1: float, k: int, tq: np.ndarray) -> LogSigned:
        coef, ref, delta = self._stencil(j, t1)
        q = coef[k:]
        s = (tq - t1) / delta
        val = P.polyval(s, q)
        # f / (1 - t/t1)^k = (-t1/delta)^k q(s);   f / t^k = q(s) / delta^k
        lead = (-t1 / delta) ** k if t1 != 0 else delta ** (-k)
        return LogSigned.from_value(val * lead) * LogSigned(1.0, ref)

    # ------------------------------------------------------------ checks

    def verify_zero(self, t1: float, k: int = 1) -> float:
        """Confirm a zero of multiplicity >= k at t1 and return its refined location.

        The location is polished to the simple root of the (m-1)-th
        derivative of the local interpolant, where m >= k is the multiplicity
        read off the interpolant (a double zero is only resolved to about
        sqrt(eps) by the function itself).  |f| at the polished point must be
        at most 1e-8 of max|f| over t1 +- zero_spacing and the Taylor
        coefficients below order k must vanish to 1e-6 relative.
        """
        j = len(self.ops)
        zs = self.zero_spacing
        t_ref = self._polish(j, t1, k)
        if t_ref is None:
            raise ZeroVerificationError(f"no zero of multiplicity {k} near t = {t1:g}")
        around = self._eval_upto(j, t_ref + zs * np.linspace(-1.0, 1.0, 201))
        top = float(np.max(around.log_mag))
        at = self._eval_upto(j, np.array([t_ref]))
        if not at.is_zero()[0] and at.log_mag[0] - top > math.log(_ZERO_TOL):
            raise ZeroVerificationError(
                f"|f({t1:g})| = {math.exp(at.log_mag[0] - top):.3g} of the local maximum; not a zero"
            )
        coef, ref, _ = self._stencil(j, t_ref)
        # stencil coefficients relative to the local maximum
        rel = np.abs(coef) * math.exp(ref - top)
        if np.any(rel[1:k] > _DERIV_TOL):
            raise ZeroVerificationError(f"zero at {t1:g} has multiplicity below {k}")
        m = k
        while m < _STENCIL_DEGREE - 1 and rel[m] <= _DERIV_TOL:
            m += 1
        if m > k:
            better = self._polish(j, t_ref, m)
            if better is not None:
                t_ref = better
        if abs(t_ref - t1) <= _SNAP_FRACTION * zs:
            t_ref = t1  # the requested location is already exact to rounding
        return float(t_ref)

    def _polish(self, j: int, t1: float, m: int) -> float | None:
        """Newton on the (m-1)-th derivative of the stencil interpolant around t1."""
        coef, _, delta = self._stencil(j, t1)
        dk = P.polyder(coef, m - 1) if m > 1 else coef
        ddk = P.polyder(dk)
        s = 0.0
        for _ in range(50):
            v, d = P.polyval(s, dk), P.polyval(s, ddk)
            if d == 0:
                break
            step = v / d
            s -= step
            if abs(step) < 1e-15 or abs(s) > 1.0:
                break
        if not abs(s) <= 1.0:
            return None
        return t1 + s * delta

    def min_zero_spacing(self) -> float:
        """Smallest gap between neighbouring real zeros near the modified locations.

        Zeros are found as sign changes (refined by Brent's method) and as
        deep local minima of |f| (even multiplicity, refined by bounded
        minimization) on a grid of 200 points per zero spacing.
        """
        pts = [o.t for o in self.ops]
        if not pts:
            return math.inf
        zs = self.zero_spacing
        lo, hi = min(pts) - 2 * zs, max(pts) + 2 * zs
        grid = np.linspace(lo, hi, int(np.ceil((hi - lo) / zs * 200)) + 2)
        h = grid[1] - grid[0]
        v = self.log_eval(grid)
        s = np.asarray(v.sign)
        lm = np.where(s == 0, -np.inf, np.asarray(v.log_mag))
        top = float(np.max(lm))

        def value(x):
            r = self.log_eval(np.array([x]))
            return float(r.sign[0] * math.exp(r.log_mag[0] - top)) if r.sign[0] else 0.0

        def log_abs(x):
            r = self.log_eval(np.array([x]))
            return float(r.log_mag[0]) if r.sign[0] else -1e300

        zeros = list(grid[s == 0])
        for i in np.flatnonzero(s[:-1] * s[1:] < 0):
            zeros.append(optimize.brentq(value, grid[i], grid[i + 1], xtol=1e-14 * zs))
        deep = np.flatnonzero((lm[1:-1] < lm[:-2]) & (lm[1:-1] <= lm[2:]) & (lm[1:-1] - top < math.log(_ZERO_TOL))) + 1
        for i in deep:
            if s[i - 1] * s[i + 1] > 0:
                res = optimize.minimize_scalar(log_abs, bounds=(grid[i - 1], grid[i + 1]), method="bounded", options={"xatol": 1e-12 * zs})
                zeros.append(float(res.x))
        if len(zeros) < 2:
            return math.inf
        z = np.sort(np.array(zeros))
        # merge duplicates found twice (exact grid hits next to a refined crossing)
        keep = np.concatenate([[True], np.diff(z) > 0.5 * h])
        z = z[keep]
        return float(np.min(np.diff(z))) if z.size > 1 else math.inf

    def condition_number(self) -> float:
        """Dimensionless closeness of zeros: min spacing times band half-width."""
        return self.min_zero_spacing() * self.band_halfwidth


def _linear_factor(t0: float, t) -> LogSigned:
    if t0 == 0:
        return LogSigned.from_value(t)
    return LogSigned.from_value(1.0 - np.asarray(t) / t0)


def add_zero(ledger: ZeroLedger, t0: float, multiplicity: int = 1) -> ZeroLedger:
    """Multiply by ``(1 - t/t0)^k`` (``t^k`` when t0 = 0).

    Refused unless the current tails decay at least as fast as |t|^-(k+1),
    so that the result still falls off at least as 1/|t|.
    """
    d = ledger.tail_order
    if not d - multiplicity >= 1:
        raise SquareIntegrabilityError(
            f"tails decay as |t|^-{d:g}; adding {multiplicity} zero(s) needs order >= {multiplicity + 1}"
        )
    return replace(ledger, ops=ledger.ops + (ZeroOp("add", float(t0), int(multiplicity)),))


def remove_zero(ledger: ZeroLedger, t1: float, multiplicity: int = 1) -> ZeroLedger:
    """Divide by ``(1 - t/t1)^k`` after verifying the zero numerically."""
    t_ref = ledger.verify_zero(float(t1), int(multiplicity))
    return replace(ledger, ops=ledger.ops + (ZeroOp("remove", float(t1), int(multiplicity), t_ref),))


def shift_zero(ledger: ZeroLedger, t1: float, t0: float) -> ZeroLedger:
    """Move one zero from t1 to t0: multiply by ``(t - t0)/(t - t1)`` up to a constant."""
    removed = remove_zero(ledger, t1, 1)
    return replace(removed, ops=removed.ops + (ZeroOp("add", float(t0), 1),))


def hilbert_kernel_ft(t1, f):
    """Fourier transform of ``1/(t - t1)`` (principal value): ``-i pi sign(f) exp(-i 2 pi f t1)``."""
    f = np.asarray(f, dtype=float)
    out = -1j * np.pi * np.sign(f) * np.exp(-2j * np.pi * f * np.asarray(t1, dtype=float))
    return complex(out) if out.ndim == 0 else out
