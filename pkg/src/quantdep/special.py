"""Univariate normal and Student t distribution functions.

The Student t routines go through the regularized incomplete beta function so
that lower-tail probabilities keep full relative precision, which the corner
limits of the t copula depend on.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp

from .core import DomainError


def _check_open_unit(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any((arr <= 0.0) | (arr >= 1.0)):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return arr


def _as_result(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def std_normal_cdf(x):
    """Standard normal distribution function."""
    return _as_result(sp.ndtr(np.asarray(x, dtype=float)), x)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on (0, 1)."""
    return _as_result(sp.ndtri(_check_open_unit(p)), p)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return _as_result(np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi), x)


def _check_nu(nu):
    if not (nu > 0 and np.isfinite(nu)):
        raise DomainError(f"degrees of freedom must be positive, got {nu!r}")


def t_cdf(x, nu):
    """Student t cdf without argument checks; accepts +-inf."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = 0.5 * sp.betainc(0.5 * nu, 0.5, nu / (nu + x * x))
    tail = np.where(np.isinf(x), 0.0, tail)
    return np.where(x < 0.0, tail, 1.0 - tail)


def t_quantile(p, nu):
    """Student t quantile without argument checks; maps 0 and 1 to -inf and inf."""
    p = np.asarray(p, dtype=float)
    lo = np.minimum(p, 1.0 - p)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ib = sp.betaincinv(0.5 * nu, 0.5, 2.0 * lo)
        x = np.sqrt(nu * (1.0 / ib - 1.0))
    x = np.where(lo <= 0.0, np.inf, x)
    x = np.where(p == 0.5, 0.0, x)
    return np.where(p < 0.5, -x, x)


def t_pdf(x, nu):
    x = np.asarray(x, dtype=float)
    logc = sp.gammaln(0.5 * (nu + 1.0)) - sp.gammaln(0.5 * nu) - 0.5 * np.log(nu * np.pi)
    return np.exp(logc - 0.5 * (nu + 1.0) * np.log1p(x * x / nu))


def student_t_cdf(x, nu):
    """Student t distribution function with ``nu`` degrees of freedom.

    Lower-tail values are accurate in the relative sense, e.g.
    ``student_t_cdf(-1e10, 1)`` is ``1 / (pi * 1e10)`` to machine precision.
    """
    _check_nu(nu)
    return _as_result(t_cdf(x, nu), x)


def student_t_quantile(p, nu):
    """Inverse of :func:`student_t_cdf` on (0, 1)."""
    _check_nu(nu)
    return _as_result(t_quantile(_check_open_unit(p), nu), p)
