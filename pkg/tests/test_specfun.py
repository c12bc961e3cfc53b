import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import special

from superosc.specfun import (
    LogSigned,
    PoleError,
    bessel_j,
    bessel_j_scaled,
    beta,
    cospi,
    gamma,
    log_gamma,
    log_rgamma,
    rect,
    sinc,
)

# Gamma(-3/2) = 4 sqrt(pi) / 3 from the reflection formula at x = 2
GAMMA_MINUS_1P5 = 2.3632718012073547030642233
# int_0^1 t^1.5 (1-t)^0.5 dt by 50-digit quadrature (equals pi/16)
BETA_2P5_1P5 = 0.19634954084936207740391521
# J_{3/2}(1e-6) from the three-term power series, 50-digit arithmetic
J1P5_AT_1EM6 = 2.6596152026759518914127061e-10


class TestLogGamma:
    def test_half(self):
        v = log_gamma(0.5)
        assert v.sign == 1
        assert v.log_mag == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)

    def test_one(self):
        v = log_gamma(1.0)
        assert (v.sign, v.log_mag) == (1.0, 0.0)

    def test_negative_half_integer(self):
        assert gamma(-1.5) == pytest.approx(GAMMA_MINUS_1P5, rel=1e-13)
        assert log_gamma(-1.5).sign == 1
        assert log_gamma(-0.5).sign == -1

    @pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -17.0])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            log_gamma(x)

    def test_rgamma_zero_at_poles(self):
        r = log_rgamma(np.array([0.0, -3.0, 2.0]))
        assert list(r.sign) == [0.0, 0.0, 1.0]
        assert r.to_float()[2] == pytest.approx(1.0)

    def test_large_argument_stays_finite(self):
        v = log_gamma(1e5)
        assert math.isfinite(v.log_mag) and v.to_float() == math.inf


class TestGammaBeta:
    def test_beta_uniform(self):
        assert beta(1, 1) == pytest.approx(1.0, rel=1e-15)

    def test_recurrence_example(self):
        assert gamma(4.7) / gamma(3.7) == pytest.approx(3.7, rel=1e-13)

    def test_beta_against_quadrature(self):
        assert beta(2.5, 1.5) == pytest.approx(BETA_2P5_1P5, rel=1e-13)

    def test_beta_no_overflow(self):
        # Gamma(400) overflows a double, the ratio does not
        assert beta(200.0, 200.0) == pytest.approx(math.exp(special.betaln(200.0, 200.0)), rel=1e-12)


class TestBessel:
    def test_zero_of_half_order(self):
        assert bessel_j(0.5, math.pi) == pytest.approx(0.0, abs=1e-15)

    def test_half_order_closed_form(self):
        assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_small_argument_series(self):
        assert bessel_j(1.5, 1e-6) == pytest.approx(J1P5_AT_1EM6, rel=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            bessel_j(-1.0, 1.0)
        with pytest.raises(ValueError):
            bessel_j(0.5, -1.0)
        assert bessel_j(1, -2.0) == pytest.approx(-special.jv(1, 2.0))

    @pytest.mark.parametrize("order", [-0.5, 0.5, 1.5, 3.0, 7.5])
    def test_scaled_series_branch_matches_division(self, order):
        # overlap band just below the series cut: both forms must agree
        x = np.linspace(1.0, 1.999, 50)
        ref = special.jv(order, x) / (x / 2) ** order
        assert np.allclose(bessel_j_scaled(order, x), ref, rtol=1e-12, atol=1e-14)

    def test_scaled_at_zero(self):
        assert bessel_j_scaled(1.5, 0.0) == pytest.approx(1 / special.gamma(2.5), rel=1e-15)


class TestElementary:
    def test_sinc(self):
        assert sinc(0.0) == 1.0
        assert np.all(np.abs(sinc(np.arange(1, 20))) < 1e-15)

    def test_rect(self):
        assert rect(0.49) == 1.0
        assert rect(0.51) == 0.0
        assert rect(0.5) == rect(-0.5) == 0.5

    def test_cospi_exact_zeros(self):
        x = np.arange(-50, 50) + 0.5
        assert np.all(cospi(x) == 0.0)
        assert cospi(1e6) == 1.0 and cospi(3.0) == -1.0

    @given(st.floats(-1e4, 1e4))
    def test_cospi_matches_cos(self, x):
        assert cospi(x) == pytest.approx(math.cos(math.pi * x), abs=1e-11)


def _away_from_half_integers(x, margin=1e-2):
    return abs(x - math.floor(x) - 0.5) > margin


class TestProperties:
    @given(st.floats(-10, 10))
    def test_reflection_identity(self, x):
        assume(_away_from_half_integers(x))
        val = gamma(0.5 - x) * gamma(0.5 + x) * math.cos(math.pi * x)
        assert val == pytest.approx(math.pi, rel=1e-10)

    @given(st.floats(1e-3, 50))
    def test_recurrence(self, x):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)

    @given(st.floats(1e-3, 100))
    def test_half_order_bessel_is_sine(self, x):
        assert bessel_j(0.5, x) * math.sqrt(math.pi * x / 2) == pytest.approx(math.sin(x), abs=1e-10)

    @given(st.lists(st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=40))
    def test_logsigned_product_matches_direct(self, factors):
        acc = LogSigned.one()
        for f in factors:
            acc = acc * LogSigned.from_value(f)
        direct = math.prod(factors)
        assume(1e-300 < abs(direct) < 1e300)
        assert acc.to_float() == pytest.approx(direct, rel=1e-12)

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_logsigned_addition(self, a, b):
        s = (LogSigned.from_value(a) + LogSigned.from_value(b)).to_float()
        assert s == pytest.approx(a + b, rel=1e-12, abs=1e-9 * (abs(a) + abs(b)))


class TestLogSigned:
    def test_zero_sign(self):
        z = LogSigned.from_value(0.0)
        assert z.is_zero() and z.log_mag == -math.inf
        assert (z * LogSigned.from_value(5.0)).is_zero()

    def test_huge_range(self):
        big = LogSigned(1.0, 1000.0) * LogSigned(-1.0, -999.0)
        assert big.to_float() == pytest.approx(-math.e)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            LogSigned.one() / LogSigned.from_value(0.0)

    def test_integer_power_sign(self):
        v = LogSigned.from_value(-2.0)
        assert (v**3).to_float() == pytest.approx(-8.0)
        assert (v**2).to_float() == pytest.approx(4.0)
        with pytest.raises(ValueError):
            v**0.5

    def test_cancellation_to_exact_zero(self):
        v = LogSigned.from_value(3.0) - LogSigned.from_value(3.0)
        assert v.is_zero()
