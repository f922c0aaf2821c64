"""Jacobi convolution series phi_n = kappa * P̃_n.

The general fractional derivative with the paired kernel k maps phi_n back to
the shifted Jacobi polynomial P̃_n, which is what makes the Petrov-Galerkin
stiffness matrix diagonal.  Left series vanish at x = 0, right series at
x = 1.

Each phi_n is stored as a closed-form series for the operator algebra, but
its monomial coefficients grow like 5.8^n while phi_n itself stays O(1), so
pointwise values are taken from the stable route instead: the kernel
convolution against P̃_n evaluated by its recurrence, integrated with a
Gauss-Jacobi rule that is exact for the polynomial factor.
"""

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import (
    LEGENDRE,
    Domain,
    JacobiParams,
    eval_shifted,
    gauss_jacobi_rule,
    monomial_coefficients,
    sup_norm,
)
from .kernels import OrderNKernel, as_order_n, verify_modified_sonine
from .operators import Kind, OperatorSpec, Side, apply_fps
from .series import FracPowerSeries, convolve, differentiate, polynomial, reflect
from .special import falling_factorial

__all__ = [
    "ConvolutionBasis",
    "basis_tail",
    "build",
    "convolve_polynomial",
    "gfd_of_basis",
    "linear_independence_check",
    "shifted_jacobi_series",
    "tail_bound",
]


def shifted_jacobi_series(n: int, params: JacobiParams = LEGENDRE) -> FracPowerSeries:
    """P̃_n as a polynomial series in x."""
    return polynomial(monomial_coefficients(n, params))


def convolve_polynomial(kernel: FracPowerSeries, p, degree: int, x, side=Side.LEFT) -> np.ndarray:
    """kernel * p at the points ``x`` for a polynomial p of the given degree.

    Left: ∫_0^x kernel(x-t) p(t) dt.  Right: ∫_x^1 kernel(t-x) p(t) dt.
    Each kernel term c·s^e gets its own Gauss-Jacobi rule with the factor
    (1-y)^e (left) or y^e (right) as weight, so the result is exact up to
    rounding for ``degree`` <= 2Q-1.
    """
    side = Side(side)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = degree // 2 + 2
    out = np.zeros_like(x)
    span = x if side is Side.LEFT else 1.0 - x
    for c, e in kernel.terms:
        if side is Side.LEFT:
            rule = gauss_jacobi_rule(q, JacobiParams(e, 0.0), Domain.SHIFTED)
            t = x[:, None] * rule.nodes[None, :]
        else:
            rule = gauss_jacobi_rule(q, JacobiParams(0.0, e), Domain.SHIFTED)
            t = x[:, None] + span[:, None] * rule.nodes[None, :]
        vals = np.asarray(p(np.clip(t, 0.0, 1.0)), dtype=float)
        out += c * 2.0 ** (-e) * span ** (e + 1.0) * (vals @ rule.weights)
    return out


@dataclass(frozen=True)
class ConvolutionBasis:
    """phi_0..phi_N for a kernel, Jacobi parameters and side.

    ``boundary_values`` holds phi_n at the endpoint where the series do not
    vanish: x = 1 for a left basis, x = 0 for a right one.
    """

    kernel: OrderNKernel
    params: JacobiParams
    N: int
    side: Side
    phi: tuple[FracPowerSeries, ...]
    boundary_values: tuple[float, ...]

    def __len__(self):
        return len(self.phi)

    def __getitem__(self, n: int) -> FracPowerSeries:
        return self.phi[n]

    def evaluate(self, n: int, x):
        """phi_n(x) by the stable quadrature route."""
        x_arr = np.asarray(x, dtype=float)
        kappa = self.kernel.kappa_n
        v = convolve_polynomial(kappa, lambda t: eval_shifted(n, self.params, t), n, x_arr, self.side)
        return float(v[0]) if x_arr.ndim == 0 else v

    def sample(self, x) -> np.ndarray:
        """Matrix with one column per basis function, rows at the points ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.column_stack([self.evaluate(n, x) for n in range(self.N + 1)])


def build(kernel, params: JacobiParams = LEGENDRE, N: int = 0, side=Side.LEFT) -> ConvolutionBasis:
    """Closed-form basis; monomial expansion limits N to ``jacobi.N_MAX``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    kern = as_order_n(kernel)
    side = Side(side)
    integral = OperatorSpec(side, Kind.INTEGRAL, kern)
    phi = tuple(apply_fps(integral, shifted_jacobi_series(n, params)) for n in range(N + 1))
    end = 1.0 if side is Side.LEFT else 0.0
    basis = ConvolutionBasis(kern, params, N, side, phi, ())
    bvals = tuple(float(v) for v in basis.sample(end)[0])
    object.__setattr__(basis, "boundary_values", bvals)
    return basis


def gfd_of_basis(basis: ConvolutionBasis, n: int, method: str = "associative") -> FracPowerSeries:
    """Riemann-Liouville derivative of phi_n with the basis kernel.

    ``"direct"`` differentiates k_m * phi_n as stored.  The default regroups
    the convolution as (k_m * kappa_m) * P̃_n, so the Sonine product is
    formed once and an exact pair returns P̃_n term for term instead of up to
    rounding in the large monomial coefficients of P̃_n.
    """
    kern = basis.kernel
    if method == "direct":
        spec = OperatorSpec(basis.side, Kind.RL_DERIVATIVE, kern)
        return apply_fps(spec, basis.phi[n])
    if method != "associative":
        raise ValueError(f"unknown method {method!r}")
    m = kern.n
    residual, _ = verify_modified_sonine(kern)
    p = shifted_jacobi_series(n, basis.params)
    if basis.side is Side.RIGHT:
        p = reflect(p).with_side(False)
    # d^m/dx^m of x^{m-1}/(m-1)! * p is p itself
    out = p + differentiate(convolve(residual, p), m)
    return out.with_side(basis.side is Side.RIGHT)


def basis_tail(basis: ConvolutionBasis, n: int) -> FracPowerSeries:
    """D phi_n - P̃_n; reflected for a right basis."""
    p = shifted_jacobi_series(n, basis.params)
    if basis.side is Side.RIGHT:
        p = reflect(p)
    return gfd_of_basis(basis, n) - p


def tail_bound(basis: ConvolutionBasis, n: int) -> float:
    """Closed-form sup bound on the tail D phi_n - P̃_n.

    With r = k_m*kappa_m - x^{m-1}/(m-1)! the tail is the m-th derivative of
    r * P̃_n.  Every exponent of r exceeds m - 1, so no boundary terms
    survive and

        |tail| <= sup|P̃_n| · ∫_0^1 |r^{(m)}|  <=  sup|P̃_n| · sum_j |c_j (e_j)_{m-1}|

    where (e)_{m-1} is the falling factorial.
    """
    residual, _ = verify_modified_sonine(basis.kernel)
    m = basis.kernel.n
    total = math.fsum(abs(c * falling_factorial(e, m - 1)) for c, e in residual.terms)
    # a relative rounding allowance keeps the bound valid when it is attained
    return sup_norm(n, basis.params) * total * (1.0 + 1e-12)


def linear_independence_check(basis: ConvolutionBasis, grid_size: int = 64) -> float:
    """Smallest eigenvalue of the Gram matrix (phi_i, phi_j) on [0, 1].

    The inner products use a ``grid_size``-point Gauss-Legendre rule.
    """
    rule = gauss_jacobi_rule(grid_size, LEGENDRE, Domain.SHIFTED)
    V = basis.sample(rule.nodes)
    gram = V.T @ (rule.weights[:, None] * V)
    return float(np.linalg.eigvalsh(gram)[0])
