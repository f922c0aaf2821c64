"""Sonine kernel pairs of power-law times power-series form.

    k(x)     = x^{-alpha}/Γ(1-alpha) · sum_j a_j x^j
    kappa(x) = x^{alpha-1}/Γ(alpha)  · sum_j b_j x^j

The associate coefficients b are fixed order by order so that k*kappa = 1
through x^M.  Whatever is left over (the truncation residual) is kept as a
closed-form series and a grid bound rather than being ignored.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .series import EXPONENT_TOL, FracPowerSeries, convolve
from .special import beta, gamma, log_gamma

__all__ = [
    "OrderNKernel",
    "SonineKernelPair",
    "associate_coefficients",
    "build_pair",
    "classical_pair",
    "coefficient_conditions",
    "kernel_power",
    "sonine_residual",
    "verify_modified_sonine",
]

GRID_POINTS = 1001


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _pair_weight(j: int, l: int, alpha: float) -> float:
    """Γ(j+1-alpha)Γ(l+alpha): weight of a_j b_l in the x^{j+l} coefficient."""
    return math.exp(log_gamma(j + 1.0 - alpha) + log_gamma(l + alpha))


def associate_coefficients(a: Sequence[float], alpha: float, M: int) -> list[float]:
    """Coefficients b_0..b_M of the kernel paired with ``a``.

    Solves  sum_{j+l=n} Γ(j+1-α)Γ(l+α) a_j b_l = 0  (n = 1..M) by forward
    substitution, starting from a_0 b_0 = 1.
    """
    _check_alpha(alpha)
    a = [float(v) for v in a]
    if not a or abs(a[0]) < 1e-300:
        raise ValueError("leading coefficient a_0 must be non-zero")
    if M < len(a) - 1:
        raise ValueError(f"truncation order M={M} is below deg(a)={len(a) - 1}")
    b = [1.0 / a[0]]
    for n in range(1, M + 1):
        acc = math.fsum(
            _pair_weight(n - l, l, alpha) * a[n - l] * b[l]
            for l in range(n)
            if n - l < len(a)
        )
        b.append(-acc / (_pair_weight(0, n, alpha) * a[0]))
    return b


def coefficient_conditions(a: Sequence[float], b: Sequence[float], alpha: float):
    """Left-hand sides of the pairing conditions n = 0..len(b)-1.

    Entry 0 is a_0 b_0 - 1; each entry comes with the largest magnitude of
    the terms summed, for relative checks.
    """
    out = [(a[0] * b[0] - 1.0, 1.0)]
    for n in range(1, len(b)):
        terms = [
            _pair_weight(n - l, l, alpha) * a[n - l] * b[l]
            for l in range(n + 1)
            if n - l < len(a)
        ]
        out.append((math.fsum(terms), max(abs(t) for t in terms)))
    return out


def _kernel_series(coeffs, alpha, order_shift):
    # order_shift = 1-alpha for k, alpha for kappa
    norm = 1.0 / gamma(order_shift)
    return FracPowerSeries(
        tuple((norm * c, order_shift - 1.0 + j) for j, c in enumerate(coeffs))
    )


def _grid_max(series: FracPowerSeries, skip_origin: bool = False) -> float:
    x = np.linspace(0.0, 1.0, GRID_POINTS)
    if skip_origin:
        x = x[1:]
    if series.is_zero:
        return 0.0
    return float(np.max(np.abs(series.evaluate(x))))


@dataclass(frozen=True)
class SonineKernelPair:
    alpha: float
    a_coeffs: tuple[float, ...]
    b_coeffs: tuple[float, ...]
    M: int
    k: FracPowerSeries
    kappa: FracPowerSeries
    residual: FracPowerSeries
    residual_bound: float

    @property
    def is_exact(self) -> bool:
        return self.residual.is_zero

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "a": list(self.a_coeffs),
            "extend_to": self.M,
            "b": list(self.b_coeffs),
            "residual_bound": self.residual_bound,
            "residual": self.residual.to_dict(),
        }


#: Residual coefficients below this fraction of their summed contributions
#: are rounding noise and are dropped.
CHOP_RTOL = 1e-13


def sonine_residual(k, kappa: FracPowerSeries | None = None, n: int = 1):
    """(k*kappa - x^{n-1}/(n-1)!, grid max) in closed form.

    ``k`` may also be a :class:`SonineKernelPair`, in which case its own
    kernels are used.
    """
    if isinstance(k, SonineKernelPair):
        k, kappa = k.k, k.kappa
    groups: dict[float, list[float]] = {}

    def push(c, e):
        for key in groups:
            if abs(key - e) <= EXPONENT_TOL:
                groups[key].append(c)
                return
        groups[e] = [c]

    for c1, e1 in k.terms:
        for c2, e2 in kappa.terms:
            push(c1 * c2 * beta(e1 + 1.0, e2 + 1.0), e1 + e2 + 1.0)
    push(-1.0 / math.factorial(n - 1), float(n - 1))
    terms = []
    for e, cs in groups.items():
        c = math.fsum(cs)
        if abs(c) > CHOP_RTOL * math.fsum(abs(v) for v in cs):
            terms.append((c, e))
    residual = FracPowerSeries(tuple(terms))
    return residual, _grid_max(residual)


def build_pair(a: Sequence[float], alpha: float, M: int | None = None) -> SonineKernelPair:
    a = tuple(float(v) for v in a)
    if M is None:
        M = len(a) - 1
    b = tuple(associate_coefficients(a, alpha, M))
    k = _kernel_series(a, alpha, 1.0 - alpha)
    kappa = _kernel_series(b, alpha, alpha)
    residual, bound = sonine_residual(k, kappa)
    return SonineKernelPair(alpha, a, b, M, k, kappa, residual, bound)


def classical_pair(alpha: float) -> SonineKernelPair:
    """(h_{1-alpha}, h_alpha): the Riemann-Liouville / Caputo kernels."""
    return build_pair((1.0,), alpha, 0)


@dataclass(frozen=True)
class OrderNKernel:
    base: SonineKernelPair
    n: int
    k_n: FracPowerSeries
    kappa_n: FracPowerSeries

    @property
    def alpha(self) -> float:
        return self.base.alpha


def kernel_power(pair: SonineKernelPair, n: int = 1) -> OrderNKernel:
    """n-fold self-convolutions k_n = k*...*k and kappa_n = kappa*...*kappa."""
    if n < 1:
        raise ValueError("kernel order must be at least 1")
    k_n, kappa_n = pair.k, pair.kappa
    for _ in range(n - 1):
        k_n = convolve(k_n, pair.k)
        kappa_n = convolve(kappa_n, pair.kappa)
    return OrderNKernel(pair, n, k_n, kappa_n)


def as_order_n(kernel) -> OrderNKernel:
    """Accept a pair or an order-n kernel; pairs become order 1."""
    if isinstance(kernel, OrderNKernel):
        return kernel
    if isinstance(kernel, SonineKernelPair):
        return kernel_power(kernel, 1)
    raise TypeError(f"expected a Sonine kernel, got {type(kernel).__name__}")


def verify_modified_sonine(onk: OrderNKernel):
    """Residual k_n*kappa_n - x^{n-1}/(n-1)! and its grid max."""
    return sonine_residual(onk.k_n, onk.kappa_n, onk.n)
