"""Tail probabilities used by the test battery."""

import math

__all__ = ["gamma_p", "gamma_q", "chi_square_pvalue", "normal_pvalue", "poisson_sf"]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _series_p(a, x):
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _continued_fraction_q(a, x):
    # modified Lentz evaluation of the Legendre continued fraction
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _series_p(a, x))
    return max(0.0, 1.0 - _continued_fraction_q(a, x))


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _series_p(a, x))
    return min(1.0, _continued_fraction_q(a, x))


def chi_square_pvalue(stat: float, dof: int) -> float:
    """P(X >= stat) for X chi-square with ``dof`` degrees of freedom."""
    if dof < 1:
        raise ValueError("dof must be a positive integer")
    if stat < 0:
        raise ValueError("chi-square statistic must be non-negative")
    return gamma_q(dof / 2.0, stat / 2.0)


def normal_pvalue(z: float) -> float:
    """Two-sided standard normal tail P(|Z| >= |z|)."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def poisson_sf(y: int, lam: float) -> float:
    """P(Y >= y) for Y ~ Poisson(lam)."""
    if y <= 0:
        return 1.0
    # P(Y >= y) = P(y, lam), the lower regularized gamma
    return gamma_p(float(y), lam)
