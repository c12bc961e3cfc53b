"""Truncated Euler products over real zero sets.

The truncated cosine product ``prod_{n<=N} [1 - (4 f0 t/(2n-1))^2]`` can be
evaluated three ways here: factor by factor (:func:`product_direct`, any
zero set), through the gamma-function closed form
(:func:`product_gamma_form`, O(1) per point) and through its Gaussian
amplitude approximation (:func:`product_asymptotic`).  All results are
:class:`~superosc.specfun.LogSigned`, because the product outgrows double
precision at moderate |t| once N is in the thousands.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .specfun import LogSigned, PoleError, cospi

__all__ = [
    "ZeroSet",
    "CosineZeroParams",
    "AsymptoticRangeWarning",
    "cosine_zeros",
    "product_direct",
    "product_gamma_form",
    "product_asymptotic",
    "product",
]

_ZERO_RTOL = 1e-12
_CHUNK = 1 << 22


class AsymptoticRangeWarning(UserWarning):
    """The Gaussian amplitude form is used outside N >= 10 f0 |t|."""


@dataclass(frozen=True)
class ZeroSet:
    """Sorted real zeros with multiplicities."""

    zeros: tuple[tuple[float, int], ...]

    def __post_init__(self):
        merged: dict[float, int] = {}
        for t, k in self.zeros:
            t = float(t)
            if int(k) != k or k < 1:
                raise ValueError("multiplicities must be positive integers")
            if t in merged:
                raise ValueError(f"duplicate zero location {t!r}")
            merged[t] = int(k)
        object.__setattr__(self, "zeros", tuple(sorted(merged.items())))

    @classmethod
    def from_locations(cls, locations) -> "ZeroSet":
        return cls(tuple((float(t), 1) for t in locations))

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for t, _ in self.zeros], dtype=float)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([k for _, k in self.zeros], dtype=int)

    @property
    def degree(self) -> int:
        return int(self.multiplicities.sum()) if self.zeros else 0

    @property
    def symmetric(self) -> bool:
        d = dict(self.zeros)
        return all(d.get(-t) == k for t, k in self.zeros)

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    def to_list(self) -> list[dict]:
        return [{"t": t, "multiplicity": k} for t, k in self.zeros]

    @classmethod
    def from_list(cls, items) -> "ZeroSet":
        return cls(tuple((d["t"], d.get("multiplicity", 1)) for d in items))

    @classmethod
    def from_json(cls, text: str) -> "ZeroSet":
        return cls.from_list(json.loads(text))


@dataclass(frozen=True)
class CosineZeroParams:
    """Truncation of the cosine product: frequency ``f0`` (Hz) and index ``N``."""

    f0: float
    N: int

    def __post_init__(self):
        if not self.f0 > 0:
            raise ValueError("f0 must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))

    @property
    def degree(self) -> int:
        return 2 * self.N

    @property
    def so_halfwidth(self) -> float:
        """Half-width sqrt(N)/(4 f0) of the interval where the product tracks the cosine."""
        return math.sqrt(self.N) / (4.0 * self.f0)

    @property
    def outer_zero(self) -> float:
        """N/(2 f0), the edge of the span holding the 2N reproduced zeros."""
        return self.N / (2.0 * self.f0)


def cosine_zeros(p: CosineZeroParams) -> ZeroSet:
    n = np.arange(1, p.N + 1)
    tn = (2 * n - 1) / (4.0 * p.f0)
    return ZeroSet.from_locations(np.concatenate([-tn[::-1], tn]))


def product_direct(zs: ZeroSet, t) -> LogSigned:
    """Factor-by-factor product of ``(1 - t/t_n)^k`` (``t^k`` for a zero at the origin)."""
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    sign = np.ones_like(flat)
    logm = np.zeros_like(flat)
    loc = zs.locations
    mult = zs.multiplicities.astype(float)
    at0 = loc == 0
    if np.any(at0):
        k0 = mult[at0].sum()
        with np.errstate(divide="ignore"):
            logm += k0 * np.log(np.abs(flat))
        sign *= np.where(flat == 0, 0.0, np.sign(flat) ** k0)
    loc, mult = loc[~at0], mult[~at0]
    if zs.symmetric:
        # pair +-t_n into 1 - (t/t_n)^2: exactly even in t
        keep = loc > 0
        loc, mult = loc[keep], mult[keep]
        flat_in = np.abs(flat)
    else:
        flat_in = flat
    if loc.size:
        step = max(1, _CHUNK // loc.size)
        for i in range(0, flat.size, step):
            x = flat_in[i : i + step, None]
            r = x / loc[None, :]
            fac = (1.0 - r) * (1.0 + r) if zs.symmetric else 1.0 - r
            hit = np.abs(x - loc[None, :]) < _ZERO_RTOL * np.abs(loc[None, :])
            with np.errstate(divide="ignore"):
                logm[i : i + step] += np.sum(mult * np.log(np.abs(fac)), axis=1)
            neg = (fac < 0) & (mult % 2 == 1)
            s = np.where(np.count_nonzero(neg, axis=1) % 2 == 1, -1.0, 1.0)
            sign[i : i + step] *= np.where(hit.any(axis=1), 0.0, s)
    return LogSigned(sign.reshape(t.shape), logm.reshape(t.shape))


def product_gamma_form(p: CosineZeroParams, t) -> LogSigned:
    """Closed form ``Gamma(N+1/2-x) Gamma(N+1/2+x) / Gamma(N+1/2)^2 * cos(pi x)``, x = 2 f0 t.

    Raises :class:`PoleError` where ``N + 1/2 -+ x`` is a non-positive
    integer (the product itself is finite there; use :func:`product_direct`).
    """
    x = 2.0 * p.f0 * np.asarray(t, dtype=float)
    y = p.N + 0.5
    # |x| keeps the result exactly even in t
    a, b = y - np.abs(x), y + np.abs(x)
    pole = ((a <= 0) & (a == np.floor(a))) | ((b <= 0) & (b == np.floor(b)))
    if np.any(pole):
        raise PoleError("gamma-form argument on a pole; fall back to product_direct")
    c = cospi(x)
    # exact zero at the reproduced cosine zeros, same tolerance as product_direct
    near = np.abs(x - (np.floor(x) + 0.5)) < _ZERO_RTOL * np.abs(x)
    inside = np.abs(x) < y
    c = np.where(near & inside, 0.0, c)
    logm = special.gammaln(a) + special.gammaln(b) - 2.0 * special.gammaln(y)
    with np.errstate(divide="ignore"):
        logm = logm + np.log(np.abs(c))
    sign = special.gammasgn(a) * special.gammasgn(b) * np.sign(c)
    return LogSigned(sign, logm)


def product_asymptotic(p: CosineZeroParams, t) -> LogSigned:
    """Gaussian-amplitude approximation ``exp[(2 f0 t)^2/(N+1/2)] cos(2 pi f0 t)``.

    Emits :class:`AsymptoticRangeWarning` where N < 10 f0 |t|.
    """
    t = np.asarray(t, dtype=float)
    x = 2.0 * p.f0 * t
    if np.any(p.N < 10.0 * p.f0 * np.abs(t)):
        warnings.warn("N >> f0|t| does not hold at some points", AsymptoticRangeWarning, stacklevel=2)
    c = cospi(x)
    with np.errstate(divide="ignore"):
        return LogSigned(np.sign(c), x * x / (p.N + 0.5) + np.log(np.abs(c)))


def product(source, t) -> LogSigned:
    """Evaluate a zero source: gamma form for cosine parameters (direct at poles), direct otherwise."""
    t = np.asarray(t, dtype=float)
    if source is None:
        return LogSigned.one(t.shape)
    if isinstance(source, ZeroSet):
        return product_direct(source, t)
    x = 2.0 * source.f0 * t
    y = source.N + 0.5
    a, b = y - x, y + x
    pole = ((a <= 0) & (a == np.floor(a))) | ((b <= 0) & (b == np.floor(b)))
    if not np.any(pole):
        return product_gamma_form(source, t)
    sign = np.empty(t.shape)
    logm = np.empty(t.shape)
    ok = ~pole
    g = product_gamma_form(source, t[ok])
    sign[ok], logm[ok] = g.sign, g.log_mag
    d = product_direct(cosine_zeros(source), t[pole])
    sign[pole], logm[pole] = d.sign, d.log_mag
    return LogSigned(sign, logm)
