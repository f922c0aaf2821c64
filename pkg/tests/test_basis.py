import math

import mpmath
import numpy as np
import pytest

from gfcalc.basis import (
    basis_tail,
    build,
    convolve_polynomial,
    gfd_of_basis,
    linear_independence_check,
    shifted_jacobi_series,
    tail_bound,
)
from gfcalc.jacobi import LEGENDRE, ConditioningError, Domain, JacobiParams, gauss_jacobi_rule
from gfcalc.kernels import build_pair, classical_pair, kernel_power
from gfcalc.operators import Side
from gfcalc.operators import Kind, OperatorSpec, apply_fps
from gfcalc.series import convolve, differentiate, monomial, reflect

from conftest import EXAMPLE_A


def boundary_oracle(pair, params, n, dps=60):
    """phi_n(1) in extended precision from the binomial form of P̃_n."""
    mpmath.mp.dps = dps
    a, b = mpmath.mpf(params.alpha), mpmath.mpf(params.beta)
    al = mpmath.mpf(pair.alpha)
    total = mpmath.mpf(0)
    # P̃_n(x) = P_n(2x - 1) = sum_k C(n+a,n-k) C(n+b,k) (x-1)^k x^(n-k), expanded in powers of x
    coeffs = [mpmath.mpf(0)] * (n + 1)
    for k in range(n + 1):
        c = mpmath.binomial(n + a, n - k) * mpmath.binomial(n + b, k)
        for i in range(k + 1):
            coeffs[n - k + i] += c * mpmath.binomial(k, i) * (-1) ** (k - i)
    for l, bl in enumerate(pair.b_coeffs):
        for j, cj in enumerate(coeffs):
            total += mpmath.mpf(bl) / mpmath.gamma(al) * cj * mpmath.beta(al + l, j + 1)
    return float(total)


class TestBuild:
    def test_first_function_classical(self, half_pair):
        basis = build(half_pair, N=0)
        (c, e), = basis[0].terms
        assert e == pytest.approx(0.5)
        assert c == pytest.approx(1.0 / math.gamma(1.5), rel=1e-14)
        assert len(basis) == 1

    def test_example_eight_functions(self, example_pair):
        basis = build(example_pair, LEGENDRE, 7)
        assert len(basis) == 8 and basis.N == 7
        x = np.linspace(1e-6, 1.0, 20001)
        V = basis.sample(x)
        assert V.shape == (x.size, 8)
        np.testing.assert_array_equal(basis.sample(0.0), np.zeros((1, 8)))
        for n in range(8):
            s = np.sign(V[:, n])
            assert np.count_nonzero(s[1:] != s[:-1]) == n

    @pytest.mark.parametrize("pair_name", ["half", "example"])
    def test_left_vanishes_at_origin(self, pair_name, half_pair, example_pair):
        pair = half_pair if pair_name == "half" else example_pair
        basis = build(pair, N=8)
        for n in range(9):
            assert basis[n].min_exponent() >= pair.alpha - 1e-14
            assert abs(basis[n](1e-12)) < 1e-5
            assert basis[n](0.0) == 0.0
            assert basis.evaluate(n, 0.0) == 0.0

    def test_right_vanishes_at_one(self, example_pair):
        basis = build(example_pair, N=6, side=Side.RIGHT)
        for n in range(7):
            assert basis[n].reflected
            assert basis[n](1.0) == 0.0
            assert basis.evaluate(n, 1.0) == 0.0
            assert basis.boundary_values[n] == pytest.approx(basis[n](0.0), rel=1e-9, abs=1e-12)

    def test_right_is_mirror_of_left(self, example_pair):
        # phi_n^right(x) = kappa-convolution of P̃_n(1 - .) in u, i.e. (-1)^n phi_n^left(1 - x)
        left = build(example_pair, N=5)
        right = build(example_pair, N=5, side=Side.RIGHT)
        x = np.linspace(0, 1, 21)
        for n in range(6):
            np.testing.assert_allclose(right.evaluate(n, x), (-1) ** n * left.evaluate(n, 1 - x), atol=1e-13)

    def test_conditioning_cap(self, half_pair):
        with pytest.raises(ConditioningError):
            build(half_pair, N=31)

    def test_negative_size(self, half_pair):
        with pytest.raises(ValueError):
            build(half_pair, N=-1)

    @pytest.mark.parametrize("N", [5, 10, 20])
    def test_boundary_values_high_precision(self, example_pair, N):
        basis = build(example_pair, N=N)
        for n in range(N + 1):
            assert basis.boundary_values[n] == pytest.approx(boundary_oracle(example_pair, LEGENDRE, n), abs=1e-12)

    def test_boundary_values_jacobi_params(self, example_pair):
        params = JacobiParams(0.5, -0.5)
        basis = build(example_pair, params, 12)
        for n in range(13):
            assert basis.boundary_values[n] == pytest.approx(boundary_oracle(example_pair, params, n), abs=1e-12)

    def test_stable_matches_series_at_low_order(self, example_pair):
        basis = build(example_pair, N=6)
        x = np.linspace(0, 1, 41)
        for n in range(7):
            np.testing.assert_allclose(basis.evaluate(n, x), basis[n](x), atol=1e-12)

    def test_scalar_evaluate(self, example_pair):
        basis = build(example_pair, N=2)
        assert isinstance(basis.evaluate(1, 0.3), float)


class TestConvolvePolynomial:
    @pytest.mark.parametrize("side", list(Side))
    def test_exact_for_monomials(self, example_pair, side):
        x = np.array([0.1, 0.5, 1.0])
        got = convolve_polynomial(example_pair.kappa, lambda t: t**4, 4, x, side)
        ref = apply_fps(OperatorSpec(side, Kind.INTEGRAL, example_pair), monomial(1.0, 4.0))
        np.testing.assert_allclose(got, ref(x), rtol=1e-13, atol=1e-15)


class TestDerivativeIdentity:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_exact_pair(self, alpha):
        basis = build(classical_pair(alpha), LEGENDRE, 10)
        for n in range(11):
            diff = gfd_of_basis(basis, n) - shifted_jacobi_series(n)
            assert all(abs(c) <= 1e-12 for c in diff.coeffs)

    def test_classical_cubic(self, half_pair):
        basis = build(half_pair, N=3)
        diff = gfd_of_basis(basis, 3) - shifted_jacobi_series(3)
        assert diff.max_abs_coeff() <= 1e-12

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_direct_route_relative(self, alpha):
        basis = build(classical_pair(alpha), LEGENDRE, 10)
        for n in range(11):
            p = shifted_jacobi_series(n)
            diff = gfd_of_basis(basis, n, method="direct") - p
            assert diff.max_abs_coeff() <= 1e-13 * p.max_abs_coeff()

    def test_right_exact_pair(self):
        basis = build(classical_pair(0.5), LEGENDRE, 6, Side.RIGHT)
        for n in range(7):
            out = gfd_of_basis(basis, n)
            assert out.reflected
            diff = out - reflect(shifted_jacobi_series(n))
            assert diff.max_abs_coeff() <= 1e-12

    def test_unknown_method(self, half_pair):
        with pytest.raises(ValueError):
            gfd_of_basis(build(half_pair, N=1), 0, method="spectral")

    def test_example_tail(self, example_pair):
        basis = build(example_pair, N=2)
        tail = basis_tail(basis, 2)
        x = np.linspace(0, 1, 1001)
        grid_max = np.max(np.abs(tail(x)))
        bound = tail_bound(basis, 2)
        assert 0 < grid_max <= bound <= 10 * grid_max
        # the tail is d/dx (r * P̃_2) for the closed-form residual r
        direct = differentiate(convolve(example_pair.residual, shifted_jacobi_series(2)))
        np.testing.assert_allclose(tail(x), direct(x), atol=1e-14)

    def test_tail_decreases_with_truncation(self):
        tails = []
        for M in (2, 8):
            basis = build(build_pair(EXAMPLE_A, 0.5, M), N=2)
            x = np.linspace(0, 1, 1001)
            tails.append(np.max(np.abs(basis_tail(basis, 2)(x))))
        assert tails[1] < tails[0]

    @pytest.mark.parametrize("M", [2, 4, 8])
    @pytest.mark.parametrize("n", [0, 3, 7])
    def test_bound_holds(self, M, n):
        basis = build(build_pair(EXAMPLE_A, 0.5, M), N=n)
        x = np.linspace(0, 1, 1001)
        assert np.max(np.abs(basis_tail(basis, n)(x))) <= tail_bound(basis, n)

    def test_bound_attained_for_constant(self, example_pair):
        basis = build(example_pair, N=0)
        assert tail_bound(basis, 0) == pytest.approx(abs(basis_tail(basis, 0)(1.0)), rel=1e-11)

    def test_order_two_kernel(self, example_pair):
        basis = build(kernel_power(example_pair, 2), N=4)
        x = np.linspace(0, 1, 201)
        for n in range(5):
            assert np.max(np.abs(basis_tail(basis, n)(x))) <= tail_bound(basis, n)


class TestLinearIndependence:
    def test_classical_five(self, half_pair):
        assert linear_independence_check(build(half_pair, N=5)) > 1e-10

    def test_single_function(self, half_pair):
        basis = build(half_pair, N=0)
        # ||x^{1/2}/Γ(3/2)||^2 = 1/(2 Γ(3/2)^2)
        assert linear_independence_check(basis) == pytest.approx(0.5 / math.gamma(1.5) ** 2, rel=1e-12)

    def test_example_ten(self, example_pair):
        value = linear_independence_check(build(example_pair, N=10))
        assert value > 0
        print(f"smallest Gram eigenvalue, example kernel N=10: {value:.3e}")


def projection_error(basis, target, q=80):
    rule = gauss_jacobi_rule(q, LEGENDRE, Domain.SHIFTED)
    sw = np.sqrt(rule.weights)
    V = basis.sample(rule.nodes) * sw[:, None]
    g = target(rule.nodes) * sw
    coef, *_ = np.linalg.lstsq(V, g, rcond=None)
    return float(np.linalg.norm(V @ coef - g))


def test_projection_error_non_increasing(example_pair):
    target = lambda x: np.exp(x) * np.sqrt(x)
    errors = [projection_error(build(example_pair, N=N), target) for N in range(2, 13)]
    for e1, e2 in zip(errors, errors[1:]):
        # nested spans; allow rounding at the level of the least-squares solve
        assert e2 <= e1 + 1e-13
    assert errors[-1] < 1e-3 * errors[0]
