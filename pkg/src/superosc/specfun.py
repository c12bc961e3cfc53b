"""Real-argument special functions and sign/log-magnitude arithmetic.

Gamma-family functions are backed by :mod:`scipy.special` (a Lanczos-class
implementation with reflection for negative arguments); everything here
returns or accepts :class:`LogSigned` where magnitudes can leave the
native double range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "LogSigned",
    "PoleError",
    "log_gamma",
    "log_rgamma",
    "gamma",
    "beta",
    "bessel_j",
    "bessel_j_scaled",
    "sinc",
    "rect",
    "sign",
    "cospi",
]


class PoleError(ValueError):
    """Argument sits on a pole of the gamma function."""


@dataclass(frozen=True, eq=False)
class LogSigned:
    """A real number (or array of them) stored as ``sign * exp(log_mag)``.

    ``sign`` is -1, 0 or +1.  Where ``sign == 0`` the value is exactly zero
    and ``log_mag`` is ``-inf``.
    """

    sign: np.ndarray | float
    log_mag: np.ndarray | float

    def __post_init__(self):
        s = np.asarray(self.sign, dtype=float)
        lm = np.asarray(self.log_mag, dtype=float)
        s, lm = np.broadcast_arrays(s, lm)
        lm = np.where(s == 0, -np.inf, lm)
        if s.ndim == 0:
            s, lm = float(s), float(lm)
        object.__setattr__(self, "sign", s)
        object.__setattr__(self, "log_mag", lm)

    @classmethod
    def from_value(cls, x) -> "LogSigned":
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(np.sign(x), np.log(np.abs(x)))

    @classmethod
    def one(cls, shape=()) -> "LogSigned":
        return cls(np.ones(shape), np.zeros(shape))

    @property
    def shape(self):
        return np.shape(self.sign)

    def __len__(self):
        return len(self.sign)

    def __getitem__(self, idx) -> "LogSigned":
        return LogSigned(np.asarray(self.sign)[idx], np.asarray(self.log_mag)[idx])

    def is_zero(self):
        return np.asarray(self.sign) == 0

    def to_float(self):
        """Native value; overflows to +-inf, underflows to 0."""
        with np.errstate(over="ignore"):
            v = np.asarray(self.sign) * np.exp(np.asarray(self.log_mag))
        return float(v) if np.ndim(v) == 0 else v

    __float__ = to_float

    @property
    def log10_abs(self):
        return np.asarray(self.log_mag) / math.log(10.0)

    def __mul__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_value(other)
        return LogSigned(
            np.asarray(self.sign) * np.asarray(other.sign),
            np.asarray(self.log_mag) + np.asarray(other.log_mag),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_value(other)
        if np.any(np.asarray(other.sign) == 0):
            raise ZeroDivisionError("LogSigned division by zero")
        return LogSigned(
            np.asarray(self.sign) * np.asarray(other.sign),
            np.asarray(self.log_mag) - np.asarray(other.log_mag),
        )

    def __pow__(self, k: int) -> "LogSigned":
        if int(k) != k:
            raise ValueError("LogSigned powers must be integers")
        k = int(k)
        s = np.asarray(self.sign)
        if k == 0:
            return LogSigned.one(np.shape(s))
        return LogSigned(s**k, k * np.asarray(self.log_mag))

    def __neg__(self) -> "LogSigned":
        return LogSigned(-np.asarray(self.sign), self.log_mag)

    def __abs__(self) -> "LogSigned":
        return LogSigned(np.abs(self.sign), self.log_mag)

    def __add__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_value(other)
        s1, l1 = np.broadcast_arrays(np.asarray(self.sign), np.asarray(self.log_mag))
        s2, l2 = np.broadcast_arrays(np.asarray(other.sign), np.asarray(other.log_mag))
        s1, l1, s2, l2 = np.broadcast_arrays(s1, l1, s2, l2)
        big = l1 >= l2
        sb, lb = np.where(big, s1, s2), np.where(big, l1, l2)
        ss, ls = np.where(big, s2, s1), np.where(big, l2, l1)
        with np.errstate(invalid="ignore"):
            r = np.where(sb == 0, 0.0, ss * sb * np.exp(ls - lb))
        mag = 1.0 + r
        with np.errstate(divide="ignore"):
            out_l = np.where(sb == 0, ls, lb + np.log(np.abs(mag)))
        out_s = np.where(sb == 0, ss, sb * np.sign(mag))
        return LogSigned(out_s, out_l)

    __radd__ = __add__

    def __sub__(self, other) -> "LogSigned":
        if not isinstance(other, LogSigned):
            other = LogSigned.from_value(other)
        return self + (-other)

    def __repr__(self):
        return f"LogSigned(sign={self.sign!r}, log_mag={self.log_mag!r})"


def _as_array(x):
    a = np.asarray(x, dtype=float)
    return a, a.ndim == 0


def _is_pole(x):
    return (x <= 0) & (x == np.floor(x))


def log_gamma(x) -> LogSigned:
    """``Gamma(x)`` as a :class:`LogSigned`; raises :class:`PoleError` at 0, -1, -2, ..."""
    a, _ = _as_array(x)
    if np.any(_is_pole(a)):
        raise PoleError(f"gamma has a pole at {a[_is_pole(a)].ravel()[0]:g}")
    return LogSigned(special.gammasgn(a), special.gammaln(a))


def log_rgamma(x) -> LogSigned:
    """``1/Gamma(x)`` as a :class:`LogSigned`; exactly zero at the poles of Gamma."""
    a, _ = _as_array(x)
    pole = _is_pole(a)
    safe = np.where(pole, 0.5, a)
    return LogSigned(np.where(pole, 0.0, special.gammasgn(safe)), -special.gammaln(safe))


def gamma(x):
    return log_gamma(x).to_float()


def beta(x, y):
    """Euler beta function evaluated through log-gamma."""
    return (log_gamma(x) * log_gamma(y) / log_gamma(np.add(x, y))).to_float()


def bessel_j(order, x):
    """Bessel function of the first kind, real order > -1 and real argument.

    Negative arguments are only defined for integer orders (parity
    ``J_n(-x) = (-1)^n J_n(x)``); non-integer orders at x < 0 raise.
    """
    order = float(order)
    if order <= -1:
        raise ValueError("bessel_j requires order > -1")
    a, scalar = _as_array(x)
    if np.any(a < 0) and order != math.floor(order):
        raise ValueError("non-integer order is not real-valued for x < 0")
    out = special.jv(order, a)
    return float(out) if scalar else out


_SCALED_SERIES_CUT = 2.0


def bessel_j_scaled(order, x):
    """Entire function ``J_v(x) / (x/2)^v``, finite and even in x.

    Small |x| uses the power series (so x = 0 gives 1/Gamma(v+1) without
    cancellation); larger |x| divides :func:`bessel_j` by ``(|x|/2)^v``.
    """
    order = float(order)
    if order <= -1:
        raise ValueError("bessel_j_scaled requires order > -1")
    a, scalar = _as_array(x)
    ax = np.abs(a)
    small = ax < _SCALED_SERIES_CUT
    out = np.empty_like(ax)
    if np.any(small):
        z = (ax[small] / 2.0) ** 2
        term = np.full_like(z, 1.0 / special.gamma(order + 1.0))
        acc = term.copy()
        for k in range(1, 40):
            term = -term * z / (k * (order + k))
            acc += term
        out[small] = acc
    if np.any(~small):
        xl = ax[~small]
        out[~small] = special.jv(order, xl) / (xl / 2.0) ** order
    return float(out) if scalar else out


def sinc(t):
    """Normalized sinc, ``sin(pi t)/(pi t)`` with sinc(0) = 1."""
    return np.sinc(t)


def rect(f):
    """Unit rectangle: 1 on |f| < 1/2, 0 outside, 1/2 on the edge."""
    a = np.abs(np.asarray(f, dtype=float))
    out = np.where(a < 0.5, 1.0, np.where(a == 0.5, 0.5, 0.0))
    return float(out) if out.ndim == 0 else out


def sign(f):
    return np.sign(f)


def cospi(x):
    """``cos(pi x)`` with exact argument reduction; exactly 0 at half-integers."""
    a, scalar = _as_array(x)
    r = np.fmod(np.abs(a), 2.0)  # exact
    # cos(pi r) on [0, 2): fold to [0, 1] then to [0, 1/2] with sin/cos swaps
    s = np.where(r > 1.0, -1.0, 1.0)
    r = np.where(r > 1.0, r - 1.0, r)
    # cos(pi r), r in [0,1] == -cos(pi (r-1)) handled above via sign
    out = np.where(
        r <= 0.25,
        np.cos(np.pi * r),
        np.where(r <= 0.75, np.sin(np.pi * (0.5 - r)), -np.cos(np.pi * (1.0 - r))),
    )
    out = s * out
    out = np.where(r == 0.5, 0.0, out)
    return float(out) if scalar else out
