"""Jacobi and shifted Jacobi polynomials, and Gauss-Jacobi quadrature.

Reference polynomials P_n^{a,b} live on [-1, 1] with weight
(1-x)^a (1+x)^b.  Shifted polynomials P̃_n(x) = P_n(2x-1) live on [0, 1]
with weight (2-2x)^a (2x)^b, so every shifted inner product is half the
corresponding reference one.
"""

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .special import log_gamma

__all__ = [
    "ConditioningError",
    "Domain",
    "JacobiParams",
    "QuadratureError",
    "QuadratureRule",
    "N_MAX",
    "eval_jacobi",
    "eval_jacobi_derivative",
    "eval_shifted",
    "gauss_jacobi_rule",
    "monomial_coefficients",
    "orthogonality_constant",
    "sturm_liouville_eigenvalue",
    "sup_norm",
    "weight",
]

#: Largest degree for which the monomial expansion is trusted in doubles.
N_MAX = 30


class ConditioningError(ValueError):
    """Raised when a monomial expansion would lose too many digits."""


class QuadratureError(RuntimeError):
    """Raised when a quadrature rule cannot be constructed or resolved."""


class Domain(enum.Enum):
    REFERENCE = "reference"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class JacobiParams:
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(
                f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})"
            )

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.beta, self.alpha)


LEGENDRE = JacobiParams(0.0, 0.0)


def _as_domain(domain) -> Domain:
    return domain if isinstance(domain, Domain) else Domain(domain)


def _check_interval(x, lo, hi):
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
        raise ValueError(f"argument outside [{lo}, {hi}]")
    return x


def _jacobi_pair(n, a, b, x):
    """(P_n, P_{n-1}) by the three-term recurrence, n >= 1."""
    p_prev = np.ones_like(x)
    p = 0.5 * (a + b + 2.0) * x + 0.5 * (a - b)
    for k in range(1, n):
        s = 2 * k + a + b
        lower = 2.0 * (k + a) * (k + b) / ((s + 1.0) * s)
        diag = (b * b - a * a) / ((s + 2.0) * s)
        upper = 2.0 * (k + 1) * (k + a + b + 1.0) / ((s + 2.0) * (s + 1.0))
        p_prev, p = p, ((x - diag) * p - lower * p_prev) / upper
    return p, p_prev


def _jacobi(n, a, b, x):
    if n == 0:
        return np.ones_like(x)
    return _jacobi_pair(n, a, b, x)[0]


def _value_and_derivative(n, a, b, x):
    """P_n and P_n' at interior points from one recurrence pass.

    (2n+a+b)(1-x^2) P_n' = n((a-b) - (2n+a+b)x) P_n + 2(n+a)(n+b) P_{n-1}
    """
    p, p_prev = _jacobi_pair(n, a, b, x)
    s = 2 * n + a + b
    dp = (n * ((a - b) - s * x) * p + 2.0 * (n + a) * (n + b) * p_prev) / (s * (1.0 - x * x))
    return p, dp


def eval_jacobi(n: int, params: JacobiParams, x):
    """P_n^{a,b}(x) on [-1, 1] by the three-term recurrence (P_0 = 1)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = _check_interval(x, -1.0, 1.0)
    out = _jacobi(n, params.alpha, params.beta, x)
    return float(out) if out.ndim == 0 else out


def eval_jacobi_derivative(n: int, params: JacobiParams, x):
    """d/dx P_n^{a,b}(x) = (n+a+b+1)/2 · P_{n-1}^{a+1,b+1}(x)."""
    if n == 0:
        return 0.0 * np.asarray(x, dtype=float)
    a, b = params.alpha, params.beta
    return 0.5 * (n + a + b + 1.0) * eval_jacobi(n - 1, JacobiParams(a + 1, b + 1), x)


def eval_shifted(n: int, params: JacobiParams, x):
    """Shifted Jacobi polynomial P̃_n^{a,b}(x) = P_n^{a,b}(2x - 1) on [0, 1]."""
    x = _check_interval(x, 0.0, 1.0)
    return eval_jacobi(n, params, np.clip(2.0 * x - 1.0, -1.0, 1.0))


def monomial_coefficients(n: int, params: JacobiParams) -> list[float]:
    """Coefficients c_0..c_n with P̃_n(x) = sum_j c_j x^j.

    Built from the hypergeometric form of P_n^{b,a}(1-2x) with every gamma
    ratio written as a finite product, so integer parameter sums are safe.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > N_MAX:
        raise ConditioningError(
            f"monomial expansion of degree {n} exceeds N_MAX={N_MAX}"
        )
    a, b = params.alpha, params.beta
    coeffs = []
    for m in range(n + 1):
        c = math.comb(n, m) / math.factorial(n)
        for i in range(m + 1, n + 1):
            c *= i + b
        for i in range(m):
            c *= n + a + b + 1 + i
        coeffs.append(c if (n + m) % 2 == 0 else -c)
    return coeffs


def orthogonality_constant(n: int, params: JacobiParams, domain=Domain.REFERENCE) -> float:
    """Squared weighted norm of the degree-n polynomial on the given domain."""
    a, b = params.alpha, params.beta
    if n == 0:
        # (a+b+1)Γ(a+b+1) folded into Γ(a+b+2) so a+b = -1 is harmless
        log_g = (a + b + 1) * math.log(2.0) + log_gamma(a + 1) + log_gamma(b + 1) - log_gamma(a + b + 2)
        g = math.exp(log_g)
    else:
        log_g = (
            (a + b + 1) * math.log(2.0)
            + log_gamma(n + a + 1)
            + log_gamma(n + b + 1)
            - log_gamma(n + a + b + 1)
            - log_gamma(n + 1)
        )
        g = math.exp(log_g) / (2 * n + a + b + 1)
    if _as_domain(domain) is Domain.SHIFTED:
        g *= 0.5
    return g


def sturm_liouville_eigenvalue(n: int, params: JacobiParams) -> float:
    return n * (n + params.alpha + params.beta + 1.0)


def weight(params: JacobiParams, x):
    """Shifted Jacobi weight (2-2x)^a (2x)^b on [0, 1]."""
    x = _check_interval(x, 0.0, 1.0)
    a, b = params.alpha, params.beta
    if (a < 0 and np.any(x >= 1.0)) or (b < 0 and np.any(x <= 0.0)):
        raise ZeroDivisionError("weight is singular at an endpoint with negative exponent")
    out = (2.0 - 2.0 * x) ** a * (2.0 * x) ** b
    return float(out) if out.ndim == 0 else out


def sup_norm(n: int, params: JacobiParams) -> float:
    """max |P_n^{a,b}| on [-1, 1] (endpoint value; valid when max(a,b) >= -1/2)."""
    q = max(params.alpha, params.beta)
    if q < -0.5:
        # maximum sits at an interior extremum; sample densely
        from scipy.optimize import minimize_scalar

        xs = np.cos(np.linspace(0.0, math.pi, 4001))[::-1]
        vals = np.abs(eval_jacobi(n, params, xs))
        i = int(np.argmax(vals))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        res = minimize_scalar(
            lambda t: -abs(float(eval_jacobi(n, params, t))),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-14},
        )
        return max(float(vals[i]), -float(res.fun))
    return math.exp(log_gamma(n + q + 1) - log_gamma(n + 1) - log_gamma(q + 1))


@dataclass(frozen=True)
class QuadratureRule:
    params: JacobiParams
    nodes: np.ndarray
    weights: np.ndarray
    domain: Domain

    @property
    def point_count(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Weighted sum of integrand samples taken at :attr:`nodes`."""
        return float(np.dot(self.weights, values))

    def __call__(self, func) -> float:
        return self.integrate(func(self.nodes))


@functools.lru_cache(maxsize=512)
def _reference_rule(q: int, a: float, b: float):
    # Jacobi matrix; k = 0 (diagonal) and k = 1 (off-diagonal) are written
    # with their removable a + b factors cancelled
    diag = np.empty(q)
    diag[0] = (b - a) / (a + b + 2.0)
    if q > 1:
        s = 2.0 * np.arange(1, q) + a + b
        diag[1:] = (b * b - a * a) / (s * (s + 2.0))
        off2 = np.empty(q - 1)
        off2[0] = 4.0 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
        k1 = np.arange(2, q, dtype=float)
        s1 = 2 * k1 + a + b
        off2[1:] = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))
        x = eigh_tridiagonal(diag, np.sqrt(off2), eigvals_only=True, check_finite=False)
    else:
        x = diag.copy()
    # Newton polish on the recurrence, then weights from the derivative.
    # Convergence is quadratic, so after a step below 1e-12 the remaining
    # node error is far below rounding.
    converged = False
    for _ in range(3):
        p, dp = _value_and_derivative(q, a, b, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-12:
            converged = True
            break
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) >= 1.0) or np.any(np.diff(x) <= 0):
        raise QuadratureError(f"Gauss-Jacobi node solve failed for Q={q}, ({a}, {b})")
    if converged:
        # move P' to the polished nodes to first order: at a root the Jacobi
        # equation gives P''/P' = -(b - a - (a+b+2)x)/(1 - x^2)
        xs = x + step
        dp = dp * (1.0 + step * (b - a - (a + b + 2.0) * xs) / (1.0 - xs * xs))
    else:
        _, dp = _value_and_derivative(q, a, b, x)
    log_c = (
        (a + b + 1) * math.log(2.0)
        + log_gamma(q + a + 1)
        + log_gamma(q + b + 1)
        - log_gamma(q + a + b + 1)
        - log_gamma(q + 1)
    )
    w = math.exp(log_c) / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_jacobi_rule(q: int, params: JacobiParams, domain=Domain.REFERENCE) -> QuadratureRule:
    """Q-point Gauss rule, exact through degree 2Q-1 under the domain's weight."""
    if q < 1:
        raise ValueError("quadrature needs at least one point")
    domain = _as_domain(domain)
    x, w = _reference_rule(int(q), float(params.alpha), float(params.beta))
    if domain is Domain.SHIFTED:
        x, w = 0.5 * (x + 1.0), 0.5 * w
        x.setflags(write=False)
        w.setflags(write=False)
    return QuadratureRule(params, x, w, domain)
