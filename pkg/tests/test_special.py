import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfcalc.special import PoleError, beta, falling_factorial, gamma, gamma_ratio, log_gamma


def stirling_log_gamma(x: float) -> float:
    """Independent oracle: shift x up past 20, then the Stirling series."""
    shift = 0.0
    while x < 20:
        shift -= math.log(x)
        x += 1
    series = (x - 0.5) * math.log(x) - x + 0.5 * math.log(2 * math.pi)
    bern = [1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156]
    for k, b in enumerate(bern):
        series += b / x ** (2 * k + 1)
    return series + shift


class TestGamma:
    def test_half_is_sqrt_pi(self):
        assert gamma(0.5) == pytest.approx(1.7724538509055160, rel=1e-15)

    def test_integer_is_factorial(self):
        assert gamma(16) == 1307674368000.0

    def test_half_integer_matches_recurrence_product(self):
        prod = Fraction(1)
        for k in range(15):
            prod *= Fraction(2 * k + 1, 2)
        expected = float(prod) * math.sqrt(math.pi)
        assert gamma(15.5) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("x", [0, -1, -2, -7, -3 + 1e-13])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            gamma(x)

    def test_near_pole_but_outside_tolerance_is_finite(self):
        assert math.isfinite(gamma(-3 + 1e-9))

    def test_overflow(self):
        with pytest.raises(OverflowError):
            gamma(172.0)

    def test_accuracy_against_mpmath(self):
        xs = np.concatenate([np.linspace(-29.7, -0.3, 41), np.linspace(0.05, 170, 400)])
        for x in xs:
            if abs(x - round(x)) < 1e-3 and round(x) <= 0:
                continue
            ref = float(mpmath.gamma(mpmath.mpf(float(x))))
            assert gamma(x) == pytest.approx(ref, rel=1e-13), x

    def test_recurrence(self):
        rng = np.random.default_rng(7)
        for x in rng.uniform(0.1, 50, 1000):
            assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)

    @given(st.floats(0.05, 0.95))
    def test_reflection(self, x):
        assert gamma(x) * gamma(1 - x) * math.sin(math.pi * x) / math.pi == pytest.approx(1.0, abs=1e-10)


class TestLogGamma:
    @pytest.mark.parametrize("x", [1.0, 2.0])
    def test_zeros(self, x):
        assert log_gamma(x) == 0.0

    def test_stirling_oracle(self):
        for x in (100.0, 15.5, 3.25, 0.7, 250.0):
            ref = stirling_log_gamma(x)
            assert abs(log_gamma(x) - ref) <= 1e-13 * abs(ref) + 1e-14

    @pytest.mark.parametrize("x", [0.0, -1.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            log_gamma(x)


class TestBeta:
    def test_half_half_is_pi(self):
        assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)

    def test_one_one(self):
        assert beta(1, 1) == pytest.approx(1.0, rel=1e-15)

    def test_exact_rational(self):
        expected = Fraction(6 * math.factorial(14), math.factorial(18))
        assert beta(4, 15) == pytest.approx(float(expected), rel=1e-12)
        assert beta(4, 15) == pytest.approx(8.1699e-5, rel=1e-4)

    @given(st.floats(1e-3, 200), st.floats(1e-3, 200))
    def test_symmetric_bitwise(self, a, b):
        assert beta(a, b) == beta(b, a)

    @given(st.floats(0.05, 30), st.floats(0.05, 30))
    def test_against_mpmath(self, a, b):
        assert beta(a, b) == pytest.approx(float(mpmath.beta(a, b)), rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0, 1), (1, -0.5)])
    def test_domain(self, a, b):
        with pytest.raises(ValueError):
            beta(a, b)


def test_gamma_ratio_without_overflow():
    assert gamma_ratio(16.5, 15.5) == pytest.approx(15.5, rel=1e-13)
    assert gamma_ratio(300.5, 300.0) == pytest.approx(float(mpmath.gamma(300.5) / mpmath.gamma(300)), rel=1e-12)


def test_falling_factorial():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(3, 5) == 0.0
    assert falling_factorial(2.5, 0) == 1.0
    assert falling_factorial(14.5, 3) == pytest.approx(14.5 * 13.5 * 12.5)
