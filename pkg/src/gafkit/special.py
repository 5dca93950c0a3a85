"""Scalar special functions for the expansion weights and the Chase variance.

All quantities here are dimensionless.  The hypergeometric value is only
needed at the fixed parameter triple (1/2, 1/2; 3/2), where the power series
and the elementary closed form ``arcsin(sqrt(x))/sqrt(x)`` must agree; both
are provided so each can serve as the other's oracle.
"""

from __future__ import annotations

import math
from fractions import Fraction

from scipy.integrate import quad

# Series term magnitude cutoff, relative to the partial sum.
_SERIES_RTOL = 1e-16
_SERIES_MAX_TERMS = 10**6


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``a (a+1) ... (a+n-1)``; empty product 1 for n = 0."""
    if n < 0:
        raise ValueError("pochhammer requires n >= 0")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def pochhammer_fraction(a: int, n: int) -> Fraction:
    """Exact rising factorial for integer ``a``, as a big rational."""
    if n < 0:
        raise ValueError("pochhammer requires n >= 0")
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def hyp2f1_half_series(x: float) -> float:
    """Power series for 2F1(1/2, 1/2; 3/2; x) on [0, 1).

    Terms decay geometrically for x < 1; summation stops when a term falls
    below ``1e-16`` of the partial sum.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"argument must lie in [0, 1), got {x}")
    total = 1.0
    term = 1.0
    for n in range(_SERIES_MAX_TERMS):
        term *= (n + 0.5) ** 2 / ((n + 1.5) * (n + 1.0)) * x
        total += term
        if abs(term) < _SERIES_RTOL * abs(total):
            break
    return total


def hyp2f1_half_closed(x: float) -> float:
    """Closed form ``arcsin(sqrt(x))/sqrt(x)`` (limit 1 at x = 0)."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"argument must lie in [0, 1), got {x}")
    if x == 0.0:
        return 1.0
    s = math.sqrt(x)
    return math.asin(s) / s


def hyp2f1_half(x: float) -> float:
    """2F1(1/2, 1/2; 3/2; x), with the series checked against the closed form.

    The two evaluations must agree within 1e-12; a mismatch signals numerical
    trouble and raises.
    """
    series = hyp2f1_half_series(x)
    closed = hyp2f1_half_closed(x)
    if abs(series - closed) > 1e-12 * max(1.0, abs(closed)):
        raise ArithmeticError(
            f"hyp2f1 series/closed-form disagreement at x={x}: {series} vs {closed}"
        )
    return closed


def incomplete_beta_sym(d: int) -> float:
    """Symmetric incomplete Beta integral over [1/(d+1), 1 - 1/(d+1)].

    ``int t**(-1/2) (1-t)**(-1/2) dt = pi - 4 (d+1)**(-1/2) 2F1(1/2,1/2;3/2;1/(d+1))``.
    """
    if d < 2:
        raise ValueError(f"requires d >= 2, got {d}")
    return math.pi - 4.0 / math.sqrt(d + 1) * hyp2f1_half(1.0 / (d + 1))


def incomplete_beta_quadrature(d: int) -> float:
    """Adaptive-quadrature evaluation of the same integral (cross-check oracle).

    The integrand's inverse-square-root singularities sit at 0 and 1, outside
    the integration interval, so plain adaptive quadrature converges; the
    substitution u = arcsin(sqrt(t)) shows the transformed integrand is the
    constant 2, i.e. the integral is benign.
    """
    if d < 2:
        raise ValueError(f"requires d >= 2, got {d}")
    a = 1.0 / (d + 1)
    val, err = quad(lambda t: 1.0 / math.sqrt(t * (1.0 - t)), a, 1.0 - a, limit=200)
    if err > 1e-10:
        raise ArithmeticError(f"quadrature error estimate too large: {err}")
    return val


def rhs_bound(kind: str, x: float) -> float:
    """Named right-hand sides of the two growth inequalities.

    * ``series_bound`` at s: ``2 s log(e**(1/2) / (1 - s))``,
    * ``circle_mean`` at r: ``2 r**2 log(1/(1 - r**2)) + r**2``.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"argument must lie in [0, 1), got {x}")
    if kind == "series_bound":
        return 2.0 * x * (0.5 - math.log1p(-x))
    if kind == "circle_mean":
        r2 = x * x
        return -2.0 * r2 * math.log1p(-r2) + r2
    raise ValueError(f"kind must be 'series_bound' or 'circle_mean', got {kind!r}")
