"""Copula abstraction, rectangle volumes and copula transforms.

A :class:`Copula` is an immutable record of capabilities. Only ``cdf`` is
mandatory; analytic conditional cdfs, a sampler, an accurate rectangle-volume
routine and a closed-form quantile dependence coefficient are optional and
are discovered by the consumers in :mod:`quantdep.dependence` and
:mod:`quantdep.empirical`.

Conditional cdfs follow the signatures ``cond_2given1(v, u, side)`` for
``P(V <= v | U = u)`` and ``cond_1given2(u, v, side)`` for
``P(U <= u | V = v)``; ``side`` is ``"right"`` or ``"left"`` and picks the
one-sided derivative where the cdf has a kink.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping, Optional

import numpy as np

VOLUME_TOL = 1e-12
FD_STEP = 1e-6


class CopulaError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CopulaError, ValueError):
    """An argument lies outside the domain of a function."""


class NegativeVolume(CopulaError):
    """A rectangle received a clearly negative C-volume."""


class DegenerateAtBoundary(CopulaError):
    """A numerical conditional was requested on the boundary of the square."""


def unit_value(x, name: str = "value") -> float:
    """Return ``x`` as a float after checking that it lies in [0, 1]."""
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if math.isnan(x) or not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return x


class BoundaryClass(enum.Enum):
    INTERIOR = "interior"
    ZERO = "zero"
    ONE = "one"

    @classmethod
    def of(cls, x: float) -> "BoundaryClass":
        if x == 0.0:
            return cls.ZERO
        if x == 1.0:
            return cls.ONE
        return cls.INTERIOR


@dataclass(frozen=True)
class QuantilePoint:
    """A pair (p, q) of quantile levels in the closed unit square."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", unit_value(self.p, "p"))
        object.__setattr__(self, "q", unit_value(self.q, "q"))

    @property
    def p_class(self) -> BoundaryClass:
        return BoundaryClass.of(self.p)

    @property
    def q_class(self) -> BoundaryClass:
        return BoundaryClass.of(self.q)


@dataclass(frozen=True)
class Rectangle:
    u1: float
    u2: float
    v1: float
    v2: float

    def __post_init__(self):
        for name in ("u1", "u2", "v1", "v2"):
            object.__setattr__(self, name, unit_value(getattr(self, name), name))
        if self.u1 > self.u2 or self.v1 > self.v2:
            raise DomainError(f"rectangle corners out of order: {self}")


@dataclass(frozen=True)
class Copula:
    """Immutable capability record for a bivariate copula.

    Attributes
    ----------
    cdf : callable
        ``cdf(u, v)``. Families with exact formulas accept numpy arrays.
    label : str
        Family identifier.
    params : mapping
        Parameter record, read-only.
    cond_2given1, cond_1given2 : callable, optional
        Analytic conditional cdfs (see module docstring).
    sampler : callable, optional
        ``sampler(n, rng)`` returning an ``(n, 2)`` array of (u, v) draws.
    closed_form_qdc : callable, optional
        ``closed_form_qdc(p, q)`` giving the exact ``lambda_{Y|X}(q|p)``.
    volume : callable, optional
        ``volume(rect)``; an accurate C-volume for quadrature-backed cdfs,
        where differencing four cdf values would lose the small volumes
        that limits in t are built from.
    generator, pickands : optional
        The Archimedean generator or Pickands function the copula was built
        from, when there is one.
    model : optional
        Underlying data-generating model, e.g. a regression model that can
        also simulate raw (x, y) pairs.
    quadrature : bool
        True when ``cdf`` is evaluated by numerical integration.
    """

    cdf: Callable[..., Any]
    label: str
    params: Mapping[str, Any] = field(default_factory=dict)
    cond_2given1: Optional[Callable[..., Any]] = None
    cond_1given2: Optional[Callable[..., Any]] = None
    sampler: Optional[Callable[[int, np.random.Generator], np.ndarray]] = None
    closed_form_qdc: Optional[Callable[[float, float], float]] = None
    volume: Optional[Callable[[Rectangle], float]] = None
    generator: Any = None
    pickands: Any = None
    model: Any = None
    quadrature: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __call__(self, u, v):
        return self.cdf(u, v)

    @property
    def has_conditionals(self) -> bool:
        return self.cond_2given1 is not None and self.cond_1given2 is not None

    def describe(self) -> str:
        if not self.params:
            return self.label
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.label}{{{inner}}}"


def clamp_interval(a: float, t: float) -> tuple[float, float]:
    """Return ``((a - t)^+, (a + t)^-)``, the band of half-width t about a
    clipped to [0, 1]."""
    return max(a - t, 0.0), min(a + t, 1.0)


def c_volume(C: Copula, R: Rectangle) -> float:
    """Four-corner C-volume of ``R``.

    Rounding-level negatives (above ``-VOLUME_TOL``) are clipped to zero;
    anything more negative means the cdf is not 2-increasing.
    """
    cdf = C.cdf
    vol = float(cdf(R.u2, R.v2) - cdf(R.u2, R.v1) - cdf(R.u1, R.v2) + cdf(R.u1, R.v1))
    if vol < 0.0:
        if vol < -VOLUME_TOL:
            raise NegativeVolume(f"{C.describe()}: volume {vol:.3e} on {R}")
        vol = 0.0
    return vol


def rectangle_volume(C: Copula, R: Rectangle) -> float:
    """C-volume of ``R`` using the copula's own volume routine when it has one."""
    if R.u1 == R.u2 or R.v1 == R.v2:
        return 0.0
    if C.volume is not None:
        vol = float(C.volume(R))
        if vol < -VOLUME_TOL:
            raise NegativeVolume(f"{C.describe()}: volume {vol:.3e} on {R}")
        return max(vol, 0.0)
    return c_volume(C, R)


def _flip(side: str) -> str:
    return "left" if side == "right" else "right"


def _flip_rect(R: Rectangle, u: bool, v: bool) -> Rectangle:
    u1, u2 = (1.0 - R.u2, 1.0 - R.u1) if u else (R.u1, R.u2)
    v1, v2 = (1.0 - R.v2, 1.0 - R.v1) if v else (R.v1, R.v2)
    return Rectangle(max(u1, 0.0), max(u2, 0.0), max(v1, 0.0), max(v2, 0.0))


def _flip_sampler(sampler, u: bool, v: bool):
    if sampler is None:
        return None

    def draw(n, rng):
        uv = np.array(sampler(n, rng), dtype=float)
        if u:
            uv[:, 0] = 1.0 - uv[:, 0]
        if v:
            uv[:, 1] = 1.0 - uv[:, 1]
        return uv

    return draw


def survival(C: Copula) -> Copula:
    """Survival copula, the copula of (1 - U, 1 - V)."""
    c21, c12, cf, vol = C.cond_2given1, C.cond_1given2, C.closed_form_qdc, C.volume
    return Copula(
        cdf=lambda u, v: u + v - 1.0 + C.cdf(1.0 - u, 1.0 - v),
        label=f"survival({C.label})",
        params=C.params,
        cond_2given1=None if c21 is None else
        (lambda v, u, side="right": 1.0 - c21(1.0 - v, 1.0 - u, _flip(side))),
        cond_1given2=None if c12 is None else
        (lambda u, v, side="right": 1.0 - c12(1.0 - u, 1.0 - v, _flip(side))),
        sampler=_flip_sampler(C.sampler, True, True),
        closed_form_qdc=None if cf is None else (lambda p, q: cf(1.0 - p, 1.0 - q)),
        volume=None if vol is None else (lambda R: vol(_flip_rect(R, True, True))),
        quadrature=C.quadrature,
    )


def reflect_v(C: Copula) -> Copula:
    """Copula of (U, 1 - V): ``u - C(u, 1 - v)``."""
    c21, c12, cf, vol = C.cond_2given1, C.cond_1given2, C.closed_form_qdc, C.volume
    return Copula(
        cdf=lambda u, v: u - C.cdf(u, 1.0 - v),
        label=f"reflect_v({C.label})",
        params=C.params,
        cond_2given1=None if c21 is None else
        (lambda v, u, side="right": 1.0 - c21(1.0 - v, u, side)),
        cond_1given2=None if c12 is None else
        (lambda u, v, side="right": c12(u, 1.0 - v, _flip(side))),
        sampler=_flip_sampler(C.sampler, False, True),
        closed_form_qdc=None if cf is None else (lambda p, q: cf(p, 1.0 - q)),
        volume=None if vol is None else (lambda R: vol(_flip_rect(R, False, True))),
        quadrature=C.quadrature,
    )


def reflect_u(C: Copula) -> Copula:
    """Copula of (1 - U, V): ``v - C(1 - u, v)``."""
    c21, c12, cf, vol = C.cond_2given1, C.cond_1given2, C.closed_form_qdc, C.volume
    return Copula(
        cdf=lambda u, v: v - C.cdf(1.0 - u, v),
        label=f"reflect_u({C.label})",
        params=C.params,
        cond_2given1=None if c21 is None else
        (lambda v, u, side="right": c21(v, 1.0 - u, _flip(side))),
        cond_1given2=None if c12 is None else
        (lambda u, v, side="right": 1.0 - c12(1.0 - u, v, _flip(side))),
        sampler=_flip_sampler(C.sampler, True, False),
        closed_form_qdc=None if cf is None else (lambda p, q: cf(1.0 - p, q)),
        volume=None if vol is None else (lambda R: vol(_flip_rect(R, True, False))),
        quadrature=C.quadrature,
    )


def convex_mix(C1: Copula, C2: Copula, omega: float, label: str = "mix") -> Copula:
    """Pointwise convex combination ``omega * C1 + (1 - omega) * C2``."""
    w = unit_value(omega, "omega")

    def combine(f1, f2):
        if f1 is None or f2 is None:
            return None
        return lambda *args: w * f1(*args) + (1.0 - w) * f2(*args)

    sampler = None
    if C1.sampler is not None and C2.sampler is not None:
        def sampler(n, rng):
            first = rng.random(n) < w
            a = C1.sampler(n, rng)
            b = C2.sampler(n, rng)
            return np.where(first[:, None], a, b)

    volume = None
    if C1.volume is not None or C2.volume is not None:
        def volume(R):
            return w * rectangle_volume(C1, R) + (1.0 - w) * rectangle_volume(C2, R)

    return Copula(
        cdf=combine(C1.cdf, C2.cdf),
        label=label,
        params={"omega": w, "left": C1.describe(), "right": C2.describe()},
        cond_2given1=combine(C1.cond_2given1, C2.cond_2given1),
        cond_1given2=combine(C1.cond_1given2, C2.cond_1given2),
        sampler=sampler,
        closed_form_qdc=combine(C1.closed_form_qdc, C2.closed_form_qdc),
        volume=volume,
        quadrature=C1.quadrature or C2.quadrature,
    )


def _one_sided_step(x: float, side: str) -> float:
    h = FD_STEP if side == "right" else -FD_STEP
    if not 0.0 <= x + h <= 1.0:
        h = -h
    return h


def conditional_2given1(C: Copula, v: float, u: float, side: str = "right") -> float:
    """``P(V <= v | U = u)``: analytic when available, else a one-sided
    finite difference of the cdf in u with step ``FD_STEP``."""
    if C.cond_2given1 is not None:
        return float(np.clip(C.cond_2given1(v, u, side), 0.0, 1.0))
    if u <= 0.0 or u >= 1.0:
        raise DegenerateAtBoundary(f"{C.describe()}: no analytic C_2|1 at u={u}")
    h = _one_sided_step(u, side)
    d = (C.cdf(u + h, v) - C.cdf(u, v)) / h
    return float(np.clip(d, 0.0, 1.0))


def conditional_1given2(C: Copula, u: float, v: float, side: str = "right") -> float:
    """``P(U <= u | V = v)``; see :func:`conditional_2given1`."""
    if C.cond_1given2 is not None:
        return float(np.clip(C.cond_1given2(u, v, side), 0.0, 1.0))
    if v <= 0.0 or v >= 1.0:
        raise DegenerateAtBoundary(f"{C.describe()}: no analytic C_1|2 at v={v}")
    h = _one_sided_step(v, side)
    d = (C.cdf(u, v + h) - C.cdf(u, v)) / h
    return float(np.clip(d, 0.0, 1.0))


def grid_violations(C: Copula, n: int = 21, tol: Optional[float] = None) -> list[str]:
    """Check groundedness, uniform margins, 2-increasingness and the
    Frechet-Hoeffding bounds on an ``n`` x ``n`` grid.

    Returns a list of human-readable violations; empty means the copula
    passed. ``tol`` defaults to 1e-12 for exact cdfs and 1e-9 for
    quadrature-backed ones.
    """
    if tol is None:
        tol = 1e-9 if C.quadrature else 1e-12
    g = np.linspace(0.0, 1.0, n)
    vals = np.array([[float(C.cdf(a, b)) for b in g] for a in g])
    out = []
    for i, a in enumerate(g):
        if abs(vals[i, 0]) > tol:
            out.append(f"C({a:g}, 0) = {vals[i, 0]:.3e}")
        if abs(vals[0, i]) > tol:
            out.append(f"C(0, {a:g}) = {vals[0, i]:.3e}")
        if abs(vals[i, -1] - a) > tol:
            out.append(f"C({a:g}, 1) - {a:g} = {vals[i, -1] - a:.3e}")
        if abs(vals[-1, i] - a) > tol:
            out.append(f"C(1, {a:g}) - {a:g} = {vals[-1, i] - a:.3e}")
    uu, vv = np.meshgrid(g, g, indexing="ij")
    lower = np.maximum(uu + vv - 1.0, 0.0)
    upper = np.minimum(uu, vv)
    for i, j in zip(*np.nonzero((vals < lower - tol) | (vals > upper + tol))):
        out.append(f"Frechet bounds violated at ({g[i]:g}, {g[j]:g}): {vals[i, j]!r}")
    vol = vals[1:, 1:] - vals[1:, :-1] - vals[:-1, 1:] + vals[:-1, :-1]
    for i, j in zip(*np.nonzero(vol < -max(tol, VOLUME_TOL))):
        out.append(f"negative volume {vol[i, j]:.3e} on cell ({g[i]:g}, {g[j]:g})")
    return out
