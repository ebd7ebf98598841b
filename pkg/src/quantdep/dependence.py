"""Quantile dependence coefficients.

``lambda_{Y|X}(q|p)`` is the limit as ``t -> 0+`` of

    V_C([(p-t)^+, (p+t)^-] x [(q-t)^+, (q+t)^-]) / ((p+t)^- - (p-t)^+),

the probability that V falls in a shrinking band around q given that U falls
in a shrinking band around p. ``lambda_{X|Y}(p|q)`` divides by the width of
the q-band instead. Three routes are offered:

* ``qdc_volume`` evaluates the ratio above on a geometric schedule of t;
* ``qdc_conditional`` differentiates the rectangle volume in t, which turns
  the ratio into one-sided conditional cdfs at the moving corners;
* ``qdc_closed_form`` returns the exact value carried by a family.

Limits are soft: when the trace does not settle within ``abs_tol`` the
estimate is returned with ``converged=False``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    FD_STEP,
    BoundaryClass,
    Copula,
    CopulaError,
    DomainError,
    QuantilePoint,
    Rectangle,
    clamp_interval,
    rectangle_volume,
    survival,
)

KINK_TOL = 1e-12
JUMP_FLOOR = 1e-14
JITTER = 1e-3  # relative to t, used to step off kink lines in qdc_conditional


class NotConverged(CopulaError):
    """A numerical limit did not settle within tolerance."""

    def __init__(self, estimate):
        super().__init__(f"limit did not converge; last value {estimate.value:.6g}")
        self.estimate = estimate


class MissingConditional(CopulaError):
    """No usable conditional cdf for the conditional route."""


class BoundaryPoint(CopulaError, ValueError):
    """The EV formula was asked for a point on the boundary of the square."""


class Direction(enum.Enum):
    Y_GIVEN_X = "Y|X"
    X_GIVEN_Y = "X|Y"

    @classmethod
    def parse(cls, s) -> "Direction":
        if isinstance(s, cls):
            return s
        key = str(s).strip().upper().replace("_GIVEN_", "|")
        for d in cls:
            if key in (d.value, d.name):
                return d
        raise DomainError(f"unknown direction {s!r}; expected Y|X or X|Y")


@dataclass(frozen=True)
class LimitSchedule:
    """Geometric sequence ``t_k = t0 * ratio^k`` for ``k < max_steps``.

    Attributes
    ----------
    t0 : float
        First bandwidth, in (0, 1/2].
    ratio : float
        Contraction factor in (0, 1).
    max_steps : int
        Number of bandwidths tried, at least 3.
    abs_tol : float
        Convergence threshold on successive raw or extrapolated ratios.
    extrapolate : bool
        Use first-order Richardson extrapolation when the trace is
        consistent with ``R(t) = lambda + c t``.
    """

    t0: float = 2.0 ** -4
    ratio: float = 0.5
    max_steps: int = 24
    abs_tol: float = 1e-4
    extrapolate: bool = True

    def __post_init__(self):
        if not 0.0 < self.t0 <= 0.5:
            raise DomainError(f"t0 must lie in (0, 1/2], got {self.t0}")
        if not 0.0 < self.ratio < 1.0:
            raise DomainError(f"ratio must lie in (0, 1), got {self.ratio}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 3:
            raise DomainError(f"max_steps must be an integer >= 3, got {self.max_steps}")
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")

    def ts(self):
        return [self.t0 * self.ratio ** k for k in range(int(self.max_steps))]


@dataclass(frozen=True)
class QdcEstimate:
    value: float
    converged: bool
    method: str
    trace: tuple = field(default_factory=tuple)

    def require(self) -> "QdcEstimate":
        """Return self, or raise :class:`NotConverged`."""
        if not self.converged:
            raise NotConverged(self)
        return self

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "method": self.method,
            "trace": [[t, r] for t, r in self.trace],
        }


def _clamp01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


def _linear_consistent(d1: float, d2: float, r: float) -> bool:
    # successive differences of lambda + c t shrink by the schedule ratio
    return abs(d2 - r * d1) <= 0.2 * r * abs(d1) + 1e-13


def numeric_limit(fn: Callable[[float], float], sched: LimitSchedule) -> tuple[float, bool, tuple]:
    """Limit of ``fn(t)`` as ``t -> 0+`` over ``sched``.

    Returns ``(value, converged, trace)``. A step passes when the last two
    ratios differ by at most ``abs_tol``, or when the last three look linear
    in t and successive Richardson extrapolants agree within ``abs_tol``.
    Convergence needs two passing steps in a row, so at least four
    evaluations: band edges sweeping across a singular segment give short
    runs of exactly linear ratios that must not be mistaken for the limit.
    The reported value is the last extrapolant when the last three ratios
    look linear, else the last raw ratio.
    """
    r = sched.ratio
    R, E, trace = [], [], []
    converged = False
    passes = 0
    for t in sched.ts():
        val = float(fn(t))
        R.append(val)
        trace.append((t, val))
        if len(R) >= 2:
            E.append((R[-1] - r * R[-2]) / (1.0 - r))
        if len(R) >= 3:
            d1, d2 = R[-2] - R[-3], R[-1] - R[-2]
            ok = abs(d2) <= sched.abs_tol or (
                sched.extrapolate and _linear_consistent(d1, d2, r)
                and abs(E[-1] - E[-2]) <= sched.abs_tol)
            passes = passes + 1 if ok else 0
            if passes >= 2:
                converged = True
                break
    value = R[-1]
    if sched.extrapolate and len(R) >= 3 and _linear_consistent(R[-2] - R[-3], R[-1] - R[-2], r):
        value = E[-1]
    return value, converged, tuple(trace)


def dual_direction(value: float, pt: QuantilePoint) -> float:
    """Convert ``lambda_{Y|X}(q|p)`` into ``lambda_{X|Y}(p|q)``.

    The bands have equal widths unless exactly one of p, q sits on the
    boundary, where the clamped band is half as wide.
    """
    p_in = pt.p_class is BoundaryClass.INTERIOR
    q_in = pt.q_class is BoundaryClass.INTERIOR
    factor = 1.0
    if p_in and not q_in:
        factor = 2.0
    elif q_in and not p_in:
        factor = 0.5
    out = factor * float(value)
    if out > 1.0 + 1e-9:
        warnings.warn(f"dual_direction: {out:.6g} exceeds 1 at {pt}; clamped", RuntimeWarning)
    return _clamp01(out)


def _bands(pt: QuantilePoint, t: float) -> Rectangle:
    u1, u2 = clamp_interval(pt.p, t)
    v1, v2 = clamp_interval(pt.q, t)
    return Rectangle(u1, u2, v1, v2)


def volume_ratio(C: Copula, pt: QuantilePoint, t: float,
                 direction: Direction = Direction.Y_GIVEN_X) -> float:
    """Finite-t ratio whose limit defines the coefficient."""
    R = _bands(pt, t)
    width = (R.u2 - R.u1) if direction is Direction.Y_GIVEN_X else (R.v2 - R.v1)
    return rectangle_volume(C, R) / width


def qdc_volume(C: Copula, pt: QuantilePoint, direction: Direction = Direction.Y_GIVEN_X,
               sched: Optional[LimitSchedule] = None) -> QdcEstimate:
    """Coefficient as the limit of C-volume ratios."""
    sched = sched or LimitSchedule()
    direction = Direction.parse(direction)
    value, conv, trace = numeric_limit(lambda t: volume_ratio(C, pt, t, direction), sched)
    return QdcEstimate(_clamp01(value), conv, "volume", trace)


def _corner_derivative(C: Copula, u: float, v: float, s1: int, s2: int, t: float,
                       analytic: bool) -> float:
    """Derivative of ``C`` along the motion ``(s1, s2)`` of a rectangle corner."""
    if u <= 0.0 or v <= 0.0:
        return 0.0
    if u >= 1.0:
        return float(s2)
    if v >= 1.0:
        return float(s1)
    if analytic:
        # step perpendicular to the motion so both partials come from the
        # same smooth piece when the corner rides along a kink line
        eps = JITTER * t
        a = min(max(u - s2 * eps, 0.0), 1.0)
        b = min(max(v + s1 * eps, 0.0), 1.0)
        side_u = "right" if s1 >= 0 else "left"
        side_v = "right" if s2 >= 0 else "left"
        c21 = float(C.cond_2given1(b, a, side_u))
        c12 = float(C.cond_1given2(a, b, side_v))
        return s1 * c21 + s2 * c12
    h = min(FD_STEP, JITTER * t)
    if s1 > 0:
        h = min(h, 1.0 - u)
    if s2 > 0:
        h = min(h, 1.0 - v)
    return float(C.cdf(u + s1 * h, v + s2 * h) - C.cdf(u, v)) / h


def conditional_ratio(C: Copula, pt: QuantilePoint, t: float, analytic: bool = True) -> float:
    """Derivative in t of the band volume divided by that of the p-band width.

    Covers every boundary class of (p, q) at once: a clamped rectangle edge
    does not move, and corners on the edges u = 1 or v = 1 pick up the
    uniform margins.
    """
    p, q = pt.p, pt.q
    su = [(-1 if p - t > 0.0 else 0), (1 if p + t < 1.0 else 0)]
    sv = [(-1 if q - t > 0.0 else 0), (1 if q + t < 1.0 else 0)]
    us = [max(p - t, 0.0), min(p + t, 1.0)]
    vs = [max(q - t, 0.0), min(q + t, 1.0)]
    total = 0.0
    for i in (0, 1):
        for j in (0, 1):
            sign = 1.0 if i == j else -1.0
            total += sign * _corner_derivative(C, us[i], vs[j], su[i], sv[j], t, analytic)
    return total / (abs(su[0]) + abs(su[1]))


def qdc_conditional(C: Copula, pt: QuantilePoint, direction: Direction = Direction.Y_GIVEN_X,
                    sched: Optional[LimitSchedule] = None, allow_fd: bool = True) -> QdcEstimate:
    """Coefficient from one-sided conditional cdfs at the band corners.

    Analytic conditionals are used when the copula has both; otherwise the
    cdf is differenced along each corner's direction of motion.
    """
    sched = sched or LimitSchedule()
    direction = Direction.parse(direction)
    analytic = C.has_conditionals
    if not analytic and not allow_fd:
        raise MissingConditional(f"{C.describe()} has no analytic conditional cdfs")
    value, conv, trace = numeric_limit(lambda t: conditional_ratio(C, pt, t, analytic), sched)
    value = _clamp01(value)
    if direction is Direction.X_GIVEN_Y:
        value = dual_direction(value, pt)
    return QdcEstimate(value, conv, "conditional", trace)


def qdc_closed_form(C: Copula, pt: QuantilePoint,
                    direction: Direction = Direction.Y_GIVEN_X) -> Optional[QdcEstimate]:
    """Exact coefficient when ``C`` carries one, else ``None``."""
    if C.closed_form_qdc is None:
        return None
    value = _clamp01(C.closed_form_qdc(pt.p, pt.q))
    if Direction.parse(direction) is Direction.X_GIVEN_Y:
        value = dual_direction(value, pt)
    return QdcEstimate(value, True, "closed_form", ())


def qdc(C: Copula, pt: QuantilePoint, direction: Direction = Direction.Y_GIVEN_X,
        sched: Optional[LimitSchedule] = None, method: str = "auto") -> QdcEstimate:
    """Dispatch to a method; ``auto`` prefers closed form, then analytic
    conditionals, then volumes."""
    method = method.replace("-", "_")
    direction = Direction.parse(direction)
    if method == "volume":
        return qdc_volume(C, pt, direction, sched)
    if method == "conditional":
        return qdc_conditional(C, pt, direction, sched)
    if method == "closed_form":
        est = qdc_closed_form(C, pt, direction)
        if est is None:
            raise MissingConditional(f"{C.describe()} has no closed-form coefficient")
        return est
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    est = qdc_closed_form(C, pt, direction)
    if est is not None:
        return est
    if C.has_conditionals:
        est = qdc_conditional(C, pt, direction, sched)
        if est.converged:
            return est
    return qdc_volume(C, pt, direction, sched)


def qdc_grid(C: Copula, resolution: int, direction: Direction = Direction.Y_GIVEN_X,
             sched: Optional[LimitSchedule] = None, method: str = "auto") -> list:
    """Rows ``(p, q, estimate)`` over ``{i / resolution}^2``, p-major."""
    if int(resolution) != resolution or resolution < 2:
        raise DomainError(f"resolution must be an integer >= 2, got {resolution}")
    n = int(resolution)
    rows = []
    for i in range(n + 1):
        for j in range(n + 1):
            p, q = i / n, j / n
            rows.append((p, q, qdc(C, QuantilePoint(p, q), direction, sched, method)))
    return rows


def ev_qdc(A, pt: QuantilePoint, steep_correction: bool = False) -> QdcEstimate:
    """Coefficient of the EV copula with Pickands function ``A`` at an
    interior point.

    With ``Delta = ln q / ln(pq)`` the value is
    ``(Delta / p) exp(ln(pq) A(Delta)) [A'(Delta+) - A'(Delta-)]``; the jump
    is read only at registered kinks, so every other point gives exactly 0.

    The formula is the mass density of the kink curve
    ``q = p^(Delta/(1-Delta))`` per unit of p. When that curve is steeper
    than the diagonal it leaves the square band through the q-edges, and the
    band ratio tends to the density divided by the slope;
    ``steep_correction=True`` applies that factor ``min(1, 1/slope)``.
    """
    p, q = pt.p, pt.q
    if pt.p_class is not BoundaryClass.INTERIOR or pt.q_class is not BoundaryClass.INTERIOR:
        raise BoundaryPoint(f"ev_qdc needs p, q in (0, 1), got ({p}, {q})")
    lp, lq = math.log(p), math.log(q)
    delta = lq / (lp + lq)
    jump = 0.0
    for k in A.kinks:
        if abs(delta - k) <= KINK_TOL:
            jump = float(A.d_right(k) - A.d_left(k))
            break
    if jump <= JUMP_FLOOR:
        return QdcEstimate(0.0, True, "closed_form", ())
    value = delta / p * math.exp((lp + lq) * float(A.eval(delta))) * jump
    if steep_correction:
        slope = delta / (1.0 - delta) * q / p
        value *= min(1.0, 1.0 / slope)
    return QdcEstimate(_clamp01(value), True, "closed_form", ())


def _corner_rect(t: float) -> Rectangle:
    return Rectangle(0.0, t, 0.0, t)


def tail_coefficients(C: Copula, sched: Optional[LimitSchedule] = None):
    """Lower and upper tail coefficients as numeric limits.

    The lower one is ``lim C(t, t) / t``; the upper one is the lower
    coefficient of the survival copula.

    Returns
    -------
    (QdcEstimate, QdcEstimate)
    """
    sched = sched or LimitSchedule()
    S = survival(C)
    lo = numeric_limit(lambda t: rectangle_volume(C, _corner_rect(t)) / t, sched)
    hi = numeric_limit(lambda t: rectangle_volume(S, _corner_rect(t)) / t, sched)
    return (QdcEstimate(_clamp01(lo[0]), lo[1], "volume", lo[2]),
            QdcEstimate(_clamp01(hi[0]), hi[1], "volume", hi[2]))


def archimedean_tails(g, sched: Optional[LimitSchedule] = None):
    """Tail coefficients of the Archimedean copula generated by ``g``.

    ``phi'(0) > -inf`` forces a zero lower coefficient and ``phi'(1) < 0`` a
    zero upper one. Otherwise the limits ``phi_inv(2 phi(t)) / t`` and
    ``2 - (1 - phi_inv(2 phi(1 - t))) / t`` are taken numerically.

    Returns
    -------
    (QdcEstimate, QdcEstimate)
    """
    sched = sched or LimitSchedule()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d0 = float(g.d_right(0.0))
        d1 = float(g.d_left(1.0))
    exact = QdcEstimate(0.0, True, "closed_form", ())
    if math.isfinite(d0):
        lo = exact
    else:
        v, c, tr = numeric_limit(lambda t: float(g.phi_inv(2.0 * g.phi(t))) / t, sched)
        lo = QdcEstimate(_clamp01(v), c, "generator", tr)
    if d1 < 0.0:
        hi = exact
    else:
        def ratio(t):
            return 2.0 - (1.0 - float(g.phi_inv(2.0 * g.phi(1.0 - t)))) / t

        v, c, tr = numeric_limit(ratio, sched)
        hi = QdcEstimate(_clamp01(v), c, "generator", tr)
    return lo, hi
