"""Finite fractional power series  s(x) = sum_m c_m x^{e_m},  e_m > -1.

Every kernel, basis function, right-hand side and closed-form solution in
the package is one of these.  Laplace convolution is exact termwise:

    (c1 x^{e1}) * (c2 x^{e2}) = c1 c2 B(e1+1, e2+1) x^{e1+e2+1}

A series flagged ``reflected`` stands for sum_m c_m (1-x)^{e_m}; this is
how right-sided objects are carried, so only left convolution exists.
"""

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .special import beta, falling_factorial, gamma

__all__ = [
    "AdmissibilityError",
    "FracPowerSeries",
    "ReflectionError",
    "SingularityError",
    "TermLimitError",
    "EXPONENT_TOL",
    "MAX_TERMS",
    "ZERO_COEFF",
    "constant",
    "convolve",
    "differentiate",
    "from_json",
    "inner",
    "monomial",
    "polynomial",
    "power_kernel",
    "reflect",
]

EXPONENT_TOL = 1e-12
ZERO_COEFF = 1e-300
MAX_TERMS = 20_000


class AdmissibilityError(ValueError):
    """An operation would leave a term with exponent <= -1."""


class ReflectionError(ValueError):
    """Exact reflection x -> 1-x needs a polynomial."""


class SingularityError(ZeroDivisionError):
    """Evaluation at a point where a negative power blows up."""


class TermLimitError(MemoryError):
    """Term count exceeded :data:`MAX_TERMS` before merging."""


def _canonical(pairs: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    items = sorted((float(e), float(c)) for c, e in pairs)
    if len(items) > MAX_TERMS:
        raise TermLimitError(f"{len(items)} terms exceed the limit of {MAX_TERMS}")
    out: list[list[float]] = []
    for e, c in items:
        if out and abs(e - out[-1][1]) <= EXPONENT_TOL:
            out[-1][2].append(c)
        else:
            out.append([None, e, [c]])
    merged = []
    for _, e, cs in out:
        c = math.fsum(cs)
        if abs(c) >= ZERO_COEFF:
            merged.append((c, e))
    return tuple(merged)


@dataclass(frozen=True)
class FracPowerSeries:
    terms: tuple[tuple[float, float], ...] = ()
    reflected: bool = False

    def __post_init__(self):
        terms = _canonical(self.terms)
        for c, e in terms:
            if not e > -1:
                raise AdmissibilityError(f"exponent {e} is not integrable at the origin")
        object.__setattr__(self, "terms", terms)

    # -- inspection ---------------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def coeffs(self) -> list[float]:
        return [c for c, _ in self.terms]

    @property
    def exponents(self) -> list[float]:
        return [e for _, e in self.terms]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self) -> float:
        return self.terms[0][1] if self.terms else math.inf

    def is_polynomial(self) -> bool:
        return all(e >= 0 and abs(e - round(e)) <= EXPONENT_TOL for _, e in self.terms)

    def abs_coeff_sum(self) -> float:
        """sum |c_m|, an upper bound for sup_{[0,1]} |s|."""
        return math.fsum(abs(c) for c, _ in self.terms)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c, _ in self.terms), default=0.0)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x, nu: int = 0):
        """Value (or ``nu``-th derivative) at ``x``; compensated per-point sums.

        Derivatives are taken in the series' own variable, so for a
        reflected series they are d/du with u = 1 - x.
        """
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        u = np.atleast_1d(1.0 - x_arr if self.reflected else x_arr)
        if np.any(u < 0):
            raise ValueError("series argument outside the unit interval")
        cols = []
        for c, e in self.terms:
            if nu:
                c = c * falling_factorial(e, nu)
                if c == 0.0:
                    continue
                e = e - nu
            if e < 0 and np.any(u == 0):
                raise SingularityError(f"term x^{e} is singular at the endpoint")
            with np.errstate(divide="ignore"):
                cols.append(c * u ** e if e != 0 else np.full_like(u, c))
        if not cols:
            out = np.zeros_like(u)
        else:
            mat = np.stack(cols, axis=1)
            out = np.array([math.fsum(row) for row in mat])
        return float(out[0]) if scalar else out

    __call__ = evaluate

    # -- algebra ------------------------------------------------------------

    def _same_side(self, other: "FracPowerSeries"):
        if self.reflected != other.reflected:
            raise ValueError("cannot combine left and reflected series")

    def __add__(self, other):
        if not isinstance(other, FracPowerSeries):
            return NotImplemented
        self._same_side(other)
        return FracPowerSeries(self.terms + other.terms, self.reflected)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if not isinstance(other, FracPowerSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: float) -> "FracPowerSeries":
        return FracPowerSeries(tuple((factor * c, e) for c, e in self.terms), self.reflected)

    def __mul__(self, factor):
        if isinstance(factor, FracPowerSeries):
            return NotImplemented
        return self.scale(float(factor))

    __rmul__ = __mul__

    def convolve(self, other: "FracPowerSeries") -> "FracPowerSeries":
        return convolve(self, other)

    def __matmul__(self, other):
        return convolve(self, other)

    def differentiate(self, n: int = 1) -> "FracPowerSeries":
        return differentiate(self, n)

    def with_side(self, reflected: bool) -> "FracPowerSeries":
        """Same coefficients reinterpreted in x (False) or in 1-x (True)."""
        return replace(self, reflected=reflected)

    def integral(self) -> float:
        """Exact ∫_0^1 s(x) dx."""
        return math.fsum(c / (e + 1.0) for c, e in self.terms)

    def allclose(self, other: "FracPowerSeries", atol: float = 1e-12) -> bool:
        return (self - other).max_abs_coeff() <= atol

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"terms": [[c, e] for c, e in self.terms]}
        if self.reflected:
            d["reflected"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self):
        var = "(1-x)" if self.reflected else "x"
        body = " + ".join(f"{c:.6g}*{var}^{e:g}" for c, e in self.terms) or "0"
        return f"FracPowerSeries({body})"


def from_json(text_or_dict) -> FracPowerSeries:
    d = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    terms = d["terms"]
    if any(len(t) != 2 for t in terms):
        raise ValueError("each term must be a [coeff, exponent] pair")
    return FracPowerSeries(tuple((float(c), float(e)) for c, e in terms), bool(d.get("reflected", False)))


def monomial(coeff: float, exponent: float) -> FracPowerSeries:
    return FracPowerSeries(((coeff, exponent),))


def constant(value: float = 1.0) -> FracPowerSeries:
    return monomial(value, 0.0)


def polynomial(coeffs: Sequence[float], reflected: bool = False) -> FracPowerSeries:
    """sum_j coeffs[j] x^j."""
    return FracPowerSeries(tuple((c, float(j)) for j, c in enumerate(coeffs)), reflected)


def power_kernel(order: float) -> FracPowerSeries:
    """x^{order-1}/Γ(order), the Riemann-Liouville kernel."""
    return monomial(1.0 / gamma(order), order - 1.0)


def convolve(s1: FracPowerSeries, s2: FracPowerSeries) -> FracPowerSeries:
    """Laplace convolution ∫_0^x s1(x-t) s2(t) dt, exact."""
    s1._same_side(s2)
    if len(s1) * len(s2) > MAX_TERMS:
        raise TermLimitError(f"convolution would produce {len(s1) * len(s2)} terms")
    out = []
    for c1, e1 in s1.terms:
        for c2, e2 in s2.terms:
            out.append((c1 * c2 * beta(e1 + 1.0, e2 + 1.0), e1 + e2 + 1.0))
    return FracPowerSeries(tuple(out), s1.reflected)


def differentiate(s: FracPowerSeries, n: int = 1) -> FracPowerSeries:
    """Termwise n-th derivative; terms hitting an integer exponent below n vanish."""
    if n < 0:
        raise ValueError("derivative order must be non-negative")
    terms = list(s.terms)
    for _ in range(n):
        nxt = []
        for c, e in terms:
            if abs(e) <= EXPONENT_TOL:
                continue
            c, e = c * e, e - 1.0
            if not e > -1:
                raise AdmissibilityError(
                    f"derivative leaves non-integrable term {c:g} x^{e:g}"
                )
            nxt.append((c, e))
        terms = nxt
    return FracPowerSeries(tuple(terms), s.reflected)


def reflect(s: FracPowerSeries) -> FracPowerSeries:
    """Re-expand a polynomial about the other endpoint: s(x) = result(1-x)."""
    if not s.is_polynomial():
        raise ReflectionError("only polynomial series can be reflected exactly")
    out = []
    for c, e in s.terms:
        k = int(round(e))
        for j in range(k + 1):
            out.append((c * math.comb(k, j) * (-1.0) ** j, float(j)))
    return FracPowerSeries(tuple(out), not s.reflected)


def inner(s1: FracPowerSeries, s2: FracPowerSeries) -> float:
    """Exact ∫_0^1 s1(x) s2(x) dx for any mix of plain and reflected series."""
    total = []
    if s1.reflected == s2.reflected:
        for c1, e1 in s1.terms:
            for c2, e2 in s2.terms:
                if not e1 + e2 > -1:
                    raise AdmissibilityError("product is not integrable")
                total.append(c1 * c2 / (e1 + e2 + 1.0))
    else:
        for c1, e1 in s1.terms:
            for c2, e2 in s2.terms:
                total.append(c1 * c2 * beta(e1 + 1.0, e2 + 1.0))
    return math.fsum(total)
