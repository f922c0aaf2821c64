"""General fractional integrals and derivatives with Sonine kernels.

Left-sided operators act by Laplace convolution on [0, x].  Right-sided
operators are evaluated in the reflected variable u = 1 - x, where they
become left-sided: the (-1)^n in front of the right-sided derivatives
cancels the chain-rule sign of d/dx = -d/du, so

    right_op[f](x) = left_op[F](u),   F(u) = f(1 - u).

Results of right-sided operators are therefore reflected series.
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .jacobi import Domain, JacobiParams, gauss_jacobi_rule
from .kernels import OrderNKernel, as_order_n
from .series import (
    FracPowerSeries,
    ReflectionError,
    convolve,
    differentiate,
    inner,
    monomial,
    reflect,
)
from .special import gamma, log_gamma

__all__ = [
    "Kind",
    "OperatorSpec",
    "Side",
    "SingularEvaluationError",
    "apply_callable",
    "apply_fps",
    "check_ftc",
    "check_integration_by_parts",
    "check_rl_caputo_relation",
    "monomial_gfd",
]


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Kind(enum.Enum):
    INTEGRAL = "integral"
    RL_DERIVATIVE = "rl_derivative"
    CAPUTO_DERIVATIVE = "caputo_derivative"


class SingularEvaluationError(ValueError):
    """Pointwise evaluation requested at the kernel's singular endpoint."""


@dataclass(frozen=True)
class OperatorSpec:
    """Which operator to apply: side, kind and an order-n Sonine kernel.

    The integral uses kappa_n, both derivatives use k_n.  A plain
    :class:`~gfcalc.kernels.SonineKernelPair` is accepted as order 1.
    """

    side: Side
    kind: Kind
    kernel: OrderNKernel

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "kernel", as_order_n(self.kernel))

    @property
    def order(self) -> int:
        return self.kernel.n


def _left_apply(kind: Kind, kern: OrderNKernel, f: FracPowerSeries) -> FracPowerSeries:
    n = kern.n
    if kind is Kind.INTEGRAL:
        return convolve(kern.kappa_n, f)
    if kind is Kind.RL_DERIVATIVE:
        return differentiate(convolve(kern.k_n, f), n)
    return convolve(kern.k_n, differentiate(f, n))


def _as_left_input(f: FracPowerSeries) -> FracPowerSeries:
    return reflect(f) if f.reflected else f


def _as_right_input(f: FracPowerSeries) -> FracPowerSeries:
    """The u-series F with f(x) = F(1 - x), as a plain series."""
    if f.reflected:
        return f.with_side(False)
    return reflect(f).with_side(False)


def apply_fps(spec: OperatorSpec, f: FracPowerSeries) -> FracPowerSeries:
    """Apply the operator to a series in closed form.

    Right-sided operators need either a reflected series or a polynomial;
    their output is a reflected series.
    """
    if spec.side is Side.LEFT:
        return _left_apply(spec.kind, spec.kernel, _as_left_input(f))
    out = _left_apply(spec.kind, spec.kernel, _as_right_input(f))
    return out.with_side(True)


def integral(kernel, f, side=Side.LEFT):
    return apply_fps(OperatorSpec(side, Kind.INTEGRAL, kernel), f)


def rl_derivative(kernel, f, side=Side.LEFT):
    return apply_fps(OperatorSpec(side, Kind.RL_DERIVATIVE, kernel), f)


def caputo_derivative(kernel, f, side=Side.LEFT):
    return apply_fps(OperatorSpec(side, Kind.CAPUTO_DERIVATIVE, kernel), f)


def monomial_gfd(a: Sequence[float], alpha: float, p: float) -> FracPowerSeries:
    """Left RL derivative of x^p under k = x^{-alpha}/Γ(1-alpha) sum_j a_j x^j.

    sum_j a_j Γ(j+1-α)Γ(p+1) / (Γ(1-α)Γ(p+j+1-α)) x^{p+j-α}
    """
    if not p > alpha - 1:
        raise ValueError(f"need p > alpha - 1, got p={p}, alpha={alpha}")
    terms = []
    for j, aj in enumerate(a):
        log_c = log_gamma(j + 1 - alpha) + log_gamma(p + 1) - log_gamma(p + j + 1 - alpha)
        terms.append((aj * math.exp(log_c) / gamma(1 - alpha), p + j - alpha))
    return FracPowerSeries(tuple(terms))


# -- black-box functions by quadrature ---------------------------------------


def _convolve_quad(kernel: FracPowerSeries, g: Callable, x: float, q: int, side: Side) -> float:
    """∫ kernel(|x-t|) g(t) dt over [0,x] or [x,1], one Gauss-Jacobi rule per term."""
    total = []
    for c, e in kernel.terms:
        if side is Side.LEFT:
            rule = gauss_jacobi_rule(q, JacobiParams(e, 0.0), Domain.SHIFTED)
            vals = g(x * rule.nodes)
            span = x
        else:
            rule = gauss_jacobi_rule(q, JacobiParams(0.0, e), Domain.SHIFTED)
            vals = g(x + (1.0 - x) * rule.nodes)
            span = 1.0 - x
        total.append(c * span ** (e + 1.0) * 2.0 ** (-e) * rule.integrate(vals))
    return math.fsum(total)


def apply_callable(
    spec: OperatorSpec,
    f: Callable,
    x: float,
    Q: int = 32,
    derivatives: Sequence[Callable] = (),
) -> float:
    """Pointwise value of the operator applied to a black-box function.

    ``derivatives[j-1]`` must be f^{(j)} for j = 1..n when a derivative is
    requested.  Only the Caputo form is integrated; the Riemann-Liouville
    value adds the endpoint terms f^{(j)}(a) k_n^{(n-j-1)}.
    """
    if Q < 2:
        raise ValueError("quadrature order must be at least 2")
    x = float(x)
    kern, n = spec.kernel, spec.order
    left = spec.side is Side.LEFT
    if (left and x <= 0.0) or (not left and x >= 1.0):
        raise SingularEvaluationError(f"cannot evaluate at the kernel endpoint x={x}")
    if spec.kind is Kind.INTEGRAL:
        return _convolve_quad(kern.kappa_n, f, x, Q, spec.side)
    if len(derivatives) < n:
        raise ValueError(f"operator of order {n} needs {n} derivatives of f")
    funcs = [f, *derivatives]
    sign = 1.0 if left or n % 2 == 0 else -1.0
    value = sign * _convolve_quad(kern.k_n, funcs[n], x, Q, spec.side)
    if spec.kind is Kind.CAPUTO_DERIVATIVE:
        return value
    corr = []
    for j in range(n):
        if left:
            corr.append(float(funcs[j](0.0)) * kern.k_n.evaluate(x, nu=n - j - 1))
        else:
            corr.append((-1.0) ** j * float(funcs[j](1.0)) * kern.k_n.evaluate(1.0 - x, nu=n - j - 1))
    return value + math.fsum(corr)


# -- executable identities ---------------------------------------------------


def _grid(side: Side, points: int = 101) -> np.ndarray:
    # drop the endpoint where derivative kernels are singular
    x = np.linspace(0.0, 1.0, points + 1)
    return x[1:] if side is Side.LEFT else x[:-1]


def _dx(f: FracPowerSeries, x, j: int):
    """j-th derivative in x, whichever variable the series is written in."""
    v = f.evaluate(x, nu=j)
    return -v if (f.reflected and j % 2) else v


def _polynomial_input(f: FracPowerSeries) -> FracPowerSeries:
    f = reflect(f) if f.reflected else f
    if not f.is_polynomial():
        raise ReflectionError("identity checks on this side need a polynomial")
    return f


def check_rl_caputo_relation(spec: OperatorSpec, f: FracPowerSeries) -> float:
    """max |Caputo f - (RL f - endpoint terms)| on a 101-point grid."""
    f = _polynomial_input(f)
    kern, n, side = spec.kernel, spec.order, spec.side
    x = _grid(side)
    cap = apply_fps(OperatorSpec(side, Kind.CAPUTO_DERIVATIVE, kern), f).evaluate(x)
    rl = apply_fps(OperatorSpec(side, Kind.RL_DERIVATIVE, kern), f).evaluate(x)
    corr = np.zeros_like(x)
    for j in range(n):
        if side is Side.LEFT:
            corr += f.evaluate(0.0, nu=j) * kern.k_n.evaluate(x, nu=n - j - 1)
        else:
            corr += (-1.0) ** j * f.evaluate(1.0, nu=j) * kern.k_n.evaluate(1.0 - x, nu=n - j - 1)
    return float(np.max(np.abs(cap - (rl - corr))))


def _unit_power(j: int, side: Side) -> FracPowerSeries:
    """{1}^{j+1}: x^j/j! on the left, (1-x)^j/j! on the right."""
    return monomial(1.0 / math.factorial(j), float(j)).with_side(side is Side.RIGHT)


def check_ftc(
    kernel,
    f: FracPowerSeries,
    which: str = "first",
    kind=Kind.RL_DERIVATIVE,
    side=Side.LEFT,
    right_sign: float | None = None,
) -> float:
    """Grid max of the defect in a fundamental theorem of calculus.

    first:  D I f - s f
    second: I D f - s f                                   (RL)
            I D f - (s f - sum_j c_j f^{(j)}(a) {1}^{j+1}) (Caputo)

    with s = 1 on the left.  On the right ``s`` defaults to (-1)^n and
    c_j = (-1)^j.  Since the right-sided derivatives carry their own (-1)^n,
    the identities that hold there use s = 1; pass ``right_sign`` to choose.
    """
    kern = as_order_n(kernel)
    kind, side = Kind(kind), Side(side)
    if kind is Kind.INTEGRAL:
        raise ValueError("kind must be a derivative")
    n = kern.n
    if side is Side.LEFT:
        s = 1.0
    else:
        s = (-1.0) ** n if right_sign is None else float(right_sign)
    I = OperatorSpec(side, Kind.INTEGRAL, kern)
    D = OperatorSpec(side, kind, kern)
    x = _grid(side)
    if which == "first":
        lhs = apply_fps(D, apply_fps(I, f)).evaluate(x)
        rhs = s * f.evaluate(x)
    elif which == "second":
        lhs = apply_fps(I, apply_fps(D, f)).evaluate(x)
        rhs = s * f.evaluate(x)
        if kind is Kind.CAPUTO_DERIVATIVE:
            a = 0.0 if side is Side.LEFT else 1.0
            for j in range(n):
                c = 1.0 if side is Side.LEFT else (-1.0) ** j
                rhs = rhs - c * _dx(f, a, j) * _unit_power(j, side).evaluate(x)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    return float(np.max(np.abs(lhs - rhs)))


def check_integration_by_parts(kernel, f: FracPowerSeries, y: FracPowerSeries) -> float:
    """|∫ f·(left RL D y) dx - ∫ (right RL D f)·y dx| over [0, 1].

    Both integrands are closed-form series, so each side is a finite sum of
    Beta integrals.
    """
    kern = as_order_n(kernel)
    lhs = inner(f, apply_fps(OperatorSpec(Side.LEFT, Kind.RL_DERIVATIVE, kern), y))
    rhs = inner(apply_fps(OperatorSpec(Side.RIGHT, Kind.RL_DERIVATIVE, kern), f), y)
    return abs(lhs - rhs)
