"""Sampling from copulas and rank-based estimates on data.

Random streams come from ``numpy.random.default_rng(seed)`` (PCG64), so a
seed fixes every draw bit for bit.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .core import FD_STEP, Copula, CopulaError, DomainError, QuantilePoint, clamp_interval
from .dependence import Direction

BRACKET = (1e-12, 1.0 - 1e-12)
BISECTION_STEPS = 42  # bracket width below 1e-12


class SamplerUnavailable(CopulaError):
    """The copula has neither a sampler nor a usable conditional cdf."""


class EmptyConditioningSet(CopulaError):
    """No observation falls in the conditioning band."""


def _conditional_2given1(C: Copula):
    if C.cond_2given1 is not None:
        return lambda v, u: np.asarray(C.cond_2given1(v, u, "right"), float)
    if C.quadrature:
        return None

    def fd(v, u):
        h = np.where(u + FD_STEP <= 1.0, FD_STEP, -FD_STEP)
        return (C.cdf(u + h, v) - C.cdf(u, v)) / h

    return fd


def sample_copula(C: Copula, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` pairs from ``C`` as an ``(n, 2)`` array.

    The copula's own sampler is used when present. Otherwise u is uniform
    and v solves ``C_{2|1}(v | u) = w`` for uniform w by vectorized
    bisection on ``[1e-12, 1 - 1e-12]``; exact cdfs without analytic
    conditionals are differenced in u.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    rng = np.random.default_rng(seed)
    if C.sampler is not None:
        return np.asarray(C.sampler(n, rng), float)
    cond = _conditional_2given1(C)
    if cond is None:
        raise SamplerUnavailable(f"{C.describe()}: no sampler and no conditional cdf")
    u = rng.random(n)
    w = rng.random(n)
    lo = np.full(n, BRACKET[0])
    hi = np.full(n, BRACKET[1])
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = cond(mid, u) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.column_stack([u, 0.5 * (lo + hi)])


def pseudo_observations(data) -> np.ndarray:
    """Normalized ranks ``rank / (n + 1)`` per column, ties in input order."""
    x = np.asarray(data, float)
    if x.ndim != 2 or x.shape[1] != 2 or x.shape[0] < 1:
        raise DomainError(f"expected an (n, 2) array with n >= 1, got shape {x.shape}")
    if np.isnan(x).any():
        raise DomainError("data contain NaN")
    n = x.shape[0]
    ranks = np.column_stack([rankdata(x[:, j], method="ordinal") for j in (0, 1)])
    return ranks / (n + 1.0)


def _in_band(x, a, t):
    lo, hi = clamp_interval(a, t)
    return (x > lo) & (x <= hi)


def empirical_qdc(po, pt: QuantilePoint, t: float,
                  direction: Direction = Direction.Y_GIVEN_X) -> tuple[float, int]:
    """Finite-t plug-in estimate on pseudo-observations.

    Counts pairs in the joint band ``((p-t)^+, (p+t)^-] x ((q-t)^+, (q+t)^-]``
    relative to those in the conditioning band.

    Returns
    -------
    value : float
    count : int
        Size of the conditioning set.
    """
    if not 0.0 < t <= 0.5:
        raise DomainError(f"t must lie in (0, 1/2], got {t}")
    po = np.asarray(po, float)
    in_u = _in_band(po[:, 0], pt.p, t)
    in_v = _in_band(po[:, 1], pt.q, t)
    cond = in_u if Direction.parse(direction) is Direction.Y_GIVEN_X else in_v
    m = int(cond.sum())
    if m == 0:
        raise EmptyConditioningSet(f"no observation in the conditioning band at {pt}, t={t}")
    return float((in_u & in_v).sum()) / m, m


def empirical_tail(po, t: float, which: str = "lower") -> float:
    """Relative frequency of a joint corner exceedance given the U event."""
    if not 0.0 < t <= 0.5:
        raise DomainError(f"t must lie in (0, 1/2], got {t}")
    po = np.asarray(po, float)
    if which == "lower":
        a, b = po[:, 0] <= t, po[:, 1] <= t
    elif which == "upper":
        a, b = po[:, 0] > 1.0 - t, po[:, 1] > 1.0 - t
    else:
        raise DomainError(f"which must be 'lower' or 'upper', got {which!r}")
    m = int(a.sum())
    if m == 0:
        raise EmptyConditioningSet(f"no observation in the {which} corner at t={t}")
    return float((a & b).sum()) / m


def empirical_copula(po, u, v):
    """Empirical copula ``#{U_i <= u, V_i <= v} / n`` on a grid of (u, v)."""
    po = np.asarray(po, float)
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    out = np.array([np.mean((po[:, 0] <= a) & (po[:, 1] <= b)) for a, b in zip(u.ravel(), v.ravel())])
    return out.reshape(u.shape)
