"""Diagonal Petrov-Galerkin solver for D^(k) f = g, f(0) = 0, f(1) = b.

Trial functions are the left Jacobi convolution series phi_n and test
functions the shifted Jacobi polynomials P̃_m.  Because D^(k) phi_n = P̃_n,
the stiffness matrix is diagonal: every coefficient except the last is a
single weighted projection of g, and the last one is fixed by the boundary
row at x = 1 (Tau closure).

Size convention: ``N`` counts trial functions, phi_0..phi_{N-1}.  N - 1
coefficients come from projections and one from the boundary row.
"""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import ConvolutionBasis, build, convolve_polynomial
from .jacobi import (
    LEGENDRE,
    Domain,
    JacobiParams,
    QuadratureError,
    eval_shifted,
    gauss_jacobi_rule,
    orthogonality_constant,
)
from .kernels import SonineKernelPair, build_pair
from .operators import Side, monomial_gfd
from .series import FracPowerSeries, convolve, differentiate, monomial
from .special import falling_factorial, log_gamma

__all__ = [
    "BVPSpec",
    "ConvergenceRow",
    "GalerkinSolution",
    "QuadratureWarning",
    "TauSingularityError",
    "TAU_TOL",
    "consistency_floor",
    "convergence_study",
    "evaluate_solution",
    "loglog_slope",
    "mse",
    "case_exponent",
    "project_rhs",
    "rows_to_csv",
    "solve",
]

#: Closure refuses when |phi_{N-1}(1)| is at or below this.
TAU_TOL = 1e-10
#: Relative disagreement between Q and 2Q point projections that triggers a warning.
QUAD_RTOL = 1e-10
MSE_POINTS = 1001

#: Kernel of the worked examples: a = (0.5, 0.25, 0.25), alpha = 0.5.
EXAMPLE_A = (0.5, 0.25, 0.25)
EXAMPLE_ALPHA = 0.5


class TauSingularityError(ZeroDivisionError):
    """The boundary row cannot be solved because phi_{N-1}(1) vanishes."""


class QuadratureWarning(UserWarning):
    """Projections at Q and 2Q points disagree."""


@dataclass(frozen=True)
class BVPSpec:
    kernel: SonineKernelPair
    rhs: FracPowerSeries | Callable
    boundary: float = 1.0
    N: int = 10
    params: JacobiParams = LEGENDRE
    quadrature: int | None = None

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if isinstance(self.rhs, FracPowerSeries) and self.rhs.reflected:
            raise ValueError("right-hand side must be a left (unreflected) series")


@dataclass(frozen=True)
class GalerkinSolution:
    coefficients: tuple[float, ...]
    basis: ConvolutionBasis
    boundary: float
    tau_residual: float
    kernel_residual_bound: float

    @property
    def N(self) -> int:
        return len(self.coefficients)

    def evaluate(self, x, method: str = "stable"):
        return evaluate_solution(self, x, method)

    __call__ = evaluate

    def as_series(self) -> FracPowerSeries:
        """sum_n f̂_n phi_n as one closed-form series."""
        out = FracPowerSeries()
        for c, phi in zip(self.coefficients, self.basis.phi):
            out = out + phi.scale(c)
        return out

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "coefficients": list(self.coefficients),
            "tau_residual": self.tau_residual,
            "kernel_residual_bound": self.kernel_residual_bound,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _moment(e: float, m: int, params: JacobiParams) -> float:
    """∫_0^1 x^e P̃_m(x) w(x) dx by Rodrigues' formula and m integrations by parts.

    (2-2x)^a (2x)^b P̃_m = 2^{a+b} (-1)^m/m! d^m[(1-x)^{m+a} x^{m+b}]  gives

        2^{a+b} (e)_m / m! · B(e+b+1, m+a+1).
    """
    a, b = params.alpha, params.beta
    ff = falling_factorial(e, m)
    if ff == 0.0:
        return 0.0
    log_mag = (
        (a + b) * math.log(2.0)
        + log_gamma(e + b + 1.0)
        + log_gamma(m + a + 1.0)
        - log_gamma(e + b + m + a + 2.0)
        - log_gamma(m + 1.0)
    )
    return ff * math.exp(log_mag)


def _quad_project(g: Callable, params: JacobiParams, m: int, q: int) -> float:
    rule = gauss_jacobi_rule(q, params, Domain.SHIFTED)
    vals = np.asarray(g(rule.nodes), dtype=float) * eval_shifted(m, params, rule.nodes)
    return rule.integrate(vals)


def project_rhs(g, params: JacobiParams = LEGENDRE, m: int = 0, Q: int | None = None, strict: bool = False) -> float:
    """(g, P̃_m)_w / γ̃_m.

    Series are projected in closed form.  Callables use Gauss-Jacobi rules at
    Q and 2Q points; disagreement beyond 1e-10 relative warns, or raises
    :class:`QuadratureError` when ``strict``.
    """
    gamma_m = orthogonality_constant(m, params, Domain.SHIFTED)
    if isinstance(g, FracPowerSeries):
        if not all(e + params.beta > -1 for e in g.exponents):
            raise ValueError("right-hand side is not integrable against the weight")
        return math.fsum(c * _moment(e, m, params) for c, e in g.terms) / gamma_m
    q = Q if Q is not None else max(32, m + 8)
    if q < 1:
        raise ValueError("quadrature order must be positive")
    coarse = _quad_project(g, params, m, q)
    fine = _quad_project(g, params, m, 2 * q)
    scale = max(abs(fine), 1e-300)
    if abs(coarse - fine) > QUAD_RTOL * scale and abs(coarse - fine) > 1e-300:
        msg = f"projection onto P̃_{m} changes by {abs(coarse - fine):.3g} between Q={q} and Q={2 * q}"
        if strict:
            raise QuadratureError(msg)
        warnings.warn(msg, QuadratureWarning, stacklevel=2)
    return fine / gamma_m


def solve(spec: BVPSpec, strict: bool = False) -> GalerkinSolution:
    """Diagonal projections for f̂_0..f̂_{N-2}, boundary row for f̂_{N-1}."""
    N = spec.N
    basis = build(spec.kernel, spec.params, N - 1, Side.LEFT)
    last = basis.boundary_values[N - 1]
    if abs(last) <= TAU_TOL:
        raise TauSingularityError(
            f"|phi_{N - 1}(1)| = {abs(last):.3g} is below {TAU_TOL:g}; the boundary row is singular"
        )
    coeffs = [project_rhs(spec.rhs, spec.params, m, spec.quadrature, strict) for m in range(N - 1)]
    partial = math.fsum(c * v for c, v in zip(coeffs, basis.boundary_values))
    coeffs.append((spec.boundary - partial) / last)
    return GalerkinSolution(
        coefficients=tuple(coeffs),
        basis=basis,
        boundary=float(spec.boundary),
        tau_residual=abs(last),
        kernel_residual_bound=spec.kernel.residual_bound,
    )


def evaluate_solution(sol: GalerkinSolution, x, method: str = "stable"):
    """sum_n f̂_n phi_n(x); exactly 0 at x = 0.

    The default writes the sum as kappa * (sum_n f̂_n P̃_n) and integrates
    it with an exact Gauss-Jacobi rule.  ``method="series"`` evaluates the
    closed-form phi_n instead, which loses digits as N grows.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise ValueError("solution is defined on [0, 1]")
    pts = np.atleast_1d(x_arr)
    basis, coeffs = sol.basis, sol.coefficients
    if method == "series":
        V = np.column_stack([p.evaluate(pts) for p in basis.phi]) * np.asarray(coeffs)
        out = np.array([math.fsum(row) for row in V])
    elif method == "stable":
        def poly(t):
            return sum(c * eval_shifted(n, basis.params, t) for n, c in enumerate(coeffs))

        out = convolve_polynomial(basis.kernel.kappa_n, poly, len(coeffs) - 1, pts, Side.LEFT)
    else:
        raise ValueError(f"unknown method {method!r}")
    out[pts == 0.0] = 0.0
    return float(out[0]) if x_arr.ndim == 0 else out


def mse(sol, reference: Callable, grid_points: int = MSE_POINTS) -> float:
    """Mean of squared errors on the uniform grid i/(grid_points-1)."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    x = np.linspace(0.0, 1.0, grid_points)
    approx = evaluate_solution(sol, x) if isinstance(sol, GalerkinSolution) else np.asarray(sol(x), float)
    err = approx - np.asarray(reference(x), dtype=float)
    return float(np.mean(err * err))


# -- convergence studies -------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    mse: float


def case_exponent(case: str) -> float:
    """Exponent p of the manufactured solution x^p for a named case."""
    cases = {"x15": 15.0, "x155": 15.5}
    try:
        return cases[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}; expected one of {sorted(cases)}") from None


def convergence_study(
    case: str = "x15",
    N_list: Sequence[int] = (2, 4, 6, 8, 10),
    kernel: SonineKernelPair | None = None,
    params: JacobiParams = LEGENDRE,
    rhs=None,
    reference: Callable | None = None,
    boundary: float = 1.0,
) -> list[ConvergenceRow]:
    """MSE against the exact solution for each N.

    Named cases manufacture g from x^p with the kernel's own coefficients;
    ``case="custom"`` takes ``rhs`` and ``reference`` instead.
    """
    if list(N_list) != sorted(N_list):
        raise ValueError("N_list must be ascending")
    if kernel is None:
        kernel = build_pair(EXAMPLE_A, EXAMPLE_ALPHA)
    if case == "custom":
        if rhs is None or reference is None:
            raise ValueError("custom case needs rhs and reference")
    else:
        p = case_exponent(case)
        rhs = monomial_gfd(kernel.a_coeffs, kernel.alpha, p)
        reference = lambda x, p=p: np.asarray(x, dtype=float) ** p
        boundary = 1.0
    rows = []
    for N in N_list:
        sol = solve(BVPSpec(kernel, rhs, boundary, int(N), params))
        rows.append(ConvergenceRow(int(N), mse(sol, reference)))
    return rows


def loglog_slope(rows: Sequence[ConvergenceRow], n_min: int | None = None, n_max: int | None = None) -> float | None:
    """Least-squares slope of log(mse) against log(N); None for fewer than two rows."""
    pts = [
        (r.N, r.mse)
        for r in rows
        if (n_min is None or r.N >= n_min) and (n_max is None or r.N <= n_max) and r.mse > 0
    ]
    if len(pts) < 2:
        return None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def consistency_floor(
    kernel: SonineKernelPair, p: float, N: int | None = None, grid_points: int = MSE_POINTS
) -> float:
    """MSE contributed by the kernel truncation alone for the x^p case.

    With k*kappa = 1 + r, inverting the manufactured g with kappa gives
    x^p + delta, delta = d/dx (r * x^p).  Given ``N``, the boundary row also
    shifts delta(1) onto the last trial function, and the floor is the MSE of
    delta - delta(1) phi_{N-1} / phi_{N-1}(1).  Refinement in N cannot go
    below this.
    """
    if kernel.residual.is_zero:
        return 0.0
    defect = differentiate(convolve(kernel.residual, monomial(1.0, p)), 1)
    x = np.linspace(0.0, 1.0, grid_points)
    v = defect.evaluate(x)
    if N is not None:
        basis = build(kernel, LEGENDRE, N - 1, Side.LEFT)
        v = v - defect.evaluate(1.0) * basis.evaluate(N - 1, x) / basis.boundary_values[N - 1]
    return float(np.mean(v * v))


def rows_to_csv(rows: Sequence[ConvergenceRow], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "mse"])
    for r in rows:
        w.writerow([r.N, format(r.mse, ".17g")])
    return buf.getvalue()
