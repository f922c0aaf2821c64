"""Gamma-family scalar functions.

Thin, validated wrappers over the C library implementations exposed by
:mod:`math`.  Ratios of large gammas must go through :func:`log_gamma`
differences (see :func:`gamma_ratio`).
"""

import math

__all__ = [
    "PoleError",
    "gamma",
    "log_gamma",
    "beta",
    "gamma_ratio",
    "falling_factorial",
]

_POLE_TOL = 1e-12


class PoleError(ValueError):
    """Raised when a gamma-type function is evaluated at a pole."""


def _near_nonpositive_integer(x: float) -> bool:
    r = round(x)
    return r <= 0 and abs(x - r) < _POLE_TOL


def gamma(x: float) -> float:
    """Euler gamma function for real ``x`` off the poles.

    Raises :class:`PoleError` at (or within 1e-12 of) a non-positive integer
    and :class:`OverflowError` for ``x`` above ~171.6.
    """
    x = float(x)
    if _near_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x={x!r}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise OverflowError(f"gamma({x!r}) overflows a double; use log_gamma") from None


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function, for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    """Euler beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b) for a, b > 0."""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ValueError(f"beta requires positive arguments, got ({a!r}, {b!r})")
    # fixed argument order makes beta(a, b) == beta(b, a) bit-for-bit
    lo, hi = (a, b) if a <= b else (b, a)
    return math.exp(math.lgamma(lo) + math.lgamma(hi) - math.lgamma(lo + hi))


def gamma_ratio(a: float, b: float) -> float:
    """Return Γ(a)/Γ(b) for positive ``a`` and ``b`` without overflow."""
    return math.exp(log_gamma(a) - log_gamma(b))


def falling_factorial(x: float, n: int) -> float:
    """x (x-1) ... (x-n+1), i.e. Γ(x+1)/Γ(x-n+1) with exact zeros."""
    out = 1.0
    for i in range(n):
        out *= x - i
    return out
