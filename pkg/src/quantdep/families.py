"""Concrete copula families.

Every constructor returns an immutable :class:`~quantdep.core.Copula`.
Families with exact cdfs accept numpy arrays in ``cdf`` and in their
conditionals; the Gaussian and Student t cdfs are one-dimensional
integrals of their analytic conditional cdfs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy import special as sp

from .core import Copula, DomainError, Rectangle
from .special import t_cdf, t_pdf, t_quantile

# Closed-form indicators such as I{p = q} are evaluated with this slack so
# that grid points like (0.3, 0.7) land on p + q = 1.
ON_LINE_TOL = 1e-9

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12


def _side_pick(side, right, left):
    return right if side == "right" else left


# --- Frechet-Hoeffding bounds and independence ---------------------------

def _m_cond(x, y, side="right"):
    # d min(x, y) / dx
    x, y = np.asarray(x, float), np.asarray(y, float)
    tie = 0.0 if side == "right" else 1.0
    return np.where(x < y, 1.0, np.where(x > y, 0.0, tie))


def _w_cond(x, y, side="right"):
    # d max(x + y - 1, 0) / dx
    x, y = np.asarray(x, float), np.asarray(y, float)
    s = x + y - 1.0
    tie = 1.0 if side == "right" else 0.0
    return np.where(s > 0.0, 1.0, np.where(s < 0.0, 0.0, tie))


def m_qdc(p: float, q: float) -> float:
    return 1.0 if abs(p - q) <= ON_LINE_TOL else 0.0


def w_qdc(p: float, q: float) -> float:
    return 1.0 if abs(p + q - 1.0) <= ON_LINE_TOL else 0.0


def make_frechet_upper() -> Copula:
    def sampler(n, rng):
        u = rng.random(n)
        return np.column_stack([u, u])

    return Copula(
        cdf=lambda u, v: np.minimum(u, v),
        label="frechet-upper",
        cond_2given1=lambda v, u, side="right": _m_cond(u, v, side),
        cond_1given2=lambda u, v, side="right": _m_cond(v, u, side),
        sampler=sampler,
        closed_form_qdc=m_qdc,
    )


def make_frechet_lower() -> Copula:
    def sampler(n, rng):
        u = rng.random(n)
        return np.column_stack([u, 1.0 - u])

    return Copula(
        cdf=lambda u, v: np.maximum(np.add(u, v) - 1.0, 0.0),
        label="frechet-lower",
        cond_2given1=lambda v, u, side="right": _w_cond(u, v, side),
        cond_1given2=lambda u, v, side="right": _w_cond(v, u, side),
        sampler=sampler,
        closed_form_qdc=w_qdc,
    )


def make_product() -> Copula:
    return Copula(
        cdf=lambda u, v: np.multiply(u, v),
        label="independence",
        cond_2given1=lambda v, u, side="right": np.asarray(v, float) + 0.0 * np.asarray(u, float),
        cond_1given2=lambda u, v, side="right": np.asarray(u, float) + 0.0 * np.asarray(v, float),
        sampler=lambda n, rng: rng.random((n, 2)),
        closed_form_qdc=lambda p, q: 0.0,
    )


# --- elliptical copulas ---------------------------------------------------

def _elliptical(label, params, quantile, cdf1, pdf1, cond, sampler, closed_form):
    """Assemble a copula whose cdf integrates ``cond`` against the margin
    density in the quantile scale z = quantile(w)."""

    def cdf_scalar(u, v):
        if u <= 0.0 or v <= 0.0:
            return 0.0
        if u >= 1.0:
            return float(v)
        if v >= 1.0:
            return float(u)
        zu = float(quantile(u))
        y = float(quantile(v))
        val, _ = integrate.quad(lambda z: pdf1(z) * cond(y, z), -np.inf, zu,
                                epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        return min(max(val, 0.0), min(u, v))

    def cdf(u, v):
        if np.ndim(u) == 0 and np.ndim(v) == 0:
            return cdf_scalar(float(u), float(v))
        return np.vectorize(cdf_scalar, otypes=[float])(u, v)

    def volume(R: Rectangle):
        z1, z2 = float(quantile(R.u1)), float(quantile(R.u2))
        y1, y2 = float(quantile(R.v1)), float(quantile(R.v2))
        val, _ = integrate.quad(lambda z: pdf1(z) * (cond(y2, z) - cond(y1, z)), z1, z2,
                                epsabs=1e-15 * (R.u2 - R.u1), epsrel=1e-11, limit=200)
        return val

    def c21(v, u, side="right"):
        return cond(quantile(v), quantile(u))

    def c12(u, v, side="right"):
        return cond(quantile(u), quantile(v))

    return Copula(
        cdf=cdf,
        label=label,
        params=params,
        cond_2given1=c21,
        cond_1given2=c12,
        sampler=sampler,
        closed_form_qdc=closed_form,
        volume=volume,
        quadrature=True,
    )


def make_gaussian(rho: float) -> Copula:
    """Gaussian copula with correlation ``rho``; ``rho = +-1`` give M and W."""
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    if rho == 1.0:
        return _relabel(make_frechet_upper(), "gaussian", {"rho": rho})
    if rho == -1.0:
        return _relabel(make_frechet_lower(), "gaussian", {"rho": rho})
    s = math.sqrt(1.0 - rho * rho)

    def cond(y, z):
        # P(Y <= y | Z = z) in normal scores; z = +-inf handled as a limit
        y, z = np.asarray(y, float), np.asarray(z, float)
        with np.errstate(invalid="ignore"):
            arg = (y - rho * z) / s
            lim = np.where(np.isinf(y), np.sign(y) * np.inf,
                           np.where(rho == 0.0, y, -np.sign(rho) * z))
        return sp.ndtr(np.where(np.isnan(arg), lim, arg))

    def sampler(n, rng):
        z1 = rng.standard_normal(n)
        z2 = rho * z1 + s * rng.standard_normal(n)
        return np.column_stack([sp.ndtr(z1), sp.ndtr(z2)])

    return _elliptical(
        "gaussian", {"rho": rho}, sp.ndtri, sp.ndtr,
        lambda z: np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi),
        cond, sampler, lambda p, q: 0.0,
    )


def student_t_corner(rho: float, nu: float, concordant: bool) -> float:
    """Corner coefficient ``2 T_{nu+1}(-sqrt((nu+1)(1-+rho)/(1+-rho)))``.

    ``concordant`` selects the (0,0)/(1,1) corners; otherwise (0,1)/(1,0).
    """
    a, b = (1.0 - rho, 1.0 + rho) if concordant else (1.0 + rho, 1.0 - rho)
    return float(2.0 * t_cdf(-math.sqrt((nu + 1.0) * a / b), nu + 1.0))


def make_student_t(rho: float, nu: float) -> Copula:
    """Student t copula with correlation ``rho`` and ``nu`` degrees of freedom."""
    rho, nu = float(rho), float(nu)
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    if not nu >= 1.0 or nu != int(nu):
        raise DomainError(f"nu must be a positive integer, got {nu}")
    params = {"rho": rho, "nu": int(nu)}
    if rho == 1.0:
        return _relabel(make_frechet_upper(), "student-t", params)
    if rho == -1.0:
        return _relabel(make_frechet_lower(), "student-t", params)
    k = math.sqrt((1.0 - rho * rho) / (nu + 1.0))

    def cond(y, z):
        y, z = np.asarray(y, float), np.asarray(z, float)
        with np.errstate(invalid="ignore", over="ignore"):
            arg = (y - rho * z) / (k * np.sqrt(nu + z * z))
            # as |z| -> inf the argument tends to -rho sign(z) / k
            lim = np.where(np.isinf(y), np.sign(y) * np.inf, -rho * np.sign(z) / k)
        arg = np.where(np.isfinite(z) | np.isinf(y), arg, lim)
        return t_cdf(arg, nu + 1.0)

    def sampler(n, rng):
        z1 = t_quantile(rng.random(n), nu)
        x = t_quantile(rng.random(n), nu + 1.0)
        z2 = rho * z1 + x * k * np.sqrt(nu + z1 * z1)
        return np.column_stack([t_cdf(z1, nu), t_cdf(z2, nu)])

    lam_same = student_t_corner(rho, nu, True)
    lam_opp = student_t_corner(rho, nu, False)

    def closed_form(p, q):
        if p in (0.0, 1.0) and q in (0.0, 1.0):
            return lam_same if p == q else lam_opp
        return 0.0

    return _elliptical(
        "student-t", params, lambda w: t_quantile(w, nu), lambda z: t_cdf(z, nu),
        lambda z: t_pdf(z, nu), cond, sampler, closed_form,
    )


# --- extreme-value copulas ------------------------------------------------

@dataclass(frozen=True)
class PickandsFunction:
    """Pickands dependence function A on [0, 1] with one-sided derivatives.

    ``kinks`` lists the points where ``d_left`` and ``d_right`` differ.
    All callables accept numpy arrays.
    """

    eval: Callable
    d_left: Callable
    d_right: Callable
    kinks: tuple = ()
    label: str = ""


def pickands_independence() -> PickandsFunction:
    zero = lambda t: np.zeros_like(np.asarray(t, float))
    return PickandsFunction(lambda t: np.ones_like(np.asarray(t, float)), zero, zero, (), "independence")


def pickands_cuadras_auge(theta: float) -> PickandsFunction:
    """``A(t) = 1 - theta * min(t, 1 - t)``."""
    th = float(theta)
    return PickandsFunction(
        eval=lambda t: 1.0 - th * np.minimum(t, 1.0 - np.asarray(t, float)),
        d_left=lambda t: np.where(np.asarray(t) <= 0.5, -th, th),
        d_right=lambda t: np.where(np.asarray(t) < 0.5, -th, th),
        kinks=(0.5,) if th > 0 else (),
        label="cuadras-auge",
    )


def pickands_flat(theta: float) -> PickandsFunction:
    """``A(t) = max(t, 1 - t, theta)`` with theta in [1/2, 1]."""
    th = float(theta)

    def d(t, right):
        t = np.asarray(t, float)
        lo, hi = (t < 1.0 - th, t < th) if right else (t <= 1.0 - th, t <= th)
        return np.where(lo, -1.0, np.where(hi, 0.0, 1.0))

    kinks = tuple(sorted({1.0 - th, th})) if th < 1.0 else ()
    return PickandsFunction(
        eval=lambda t: np.maximum(np.maximum(t, 1.0 - np.asarray(t, float)), th),
        d_left=lambda t: d(t, False),
        d_right=lambda t: d(t, True),
        kinks=kinks,
        label="ev-flat",
    )


def make_ev(A: PickandsFunction, label: str = "ev", params=None,
            closed_form: Optional[Callable] = None) -> Copula:
    """Extreme-value copula ``exp(ln(uv) A(ln v / ln(uv)))``."""

    def cdf(u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            luv = np.log(u) + np.log(v)
            tau = np.log(v) / luv
            val = np.exp(luv * A.eval(np.nan_to_num(tau)))
        out = np.where(u >= 1.0, v, np.where(v >= 1.0, u, val))
        out = np.where((u <= 0.0) | (v <= 0.0), 0.0, out)
        return float(out) if out.ndim == 0 else out

    def c21(v, u, side="right"):
        u, v = np.asarray(u, float), np.asarray(v, float)
        dA = _side_pick(side, A.d_right, A.d_left)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            luv = np.log(u) + np.log(v)
            tau = np.nan_to_num(np.log(v) / luv)
            val = np.exp(luv * A.eval(tau) - np.log(u)) * (A.eval(tau) - tau * dA(tau))
            at_u0 = v ** (1.0 + A.d_right(0.0))
            at_u1 = v * (1.0 - A.d_left(1.0))
        out = np.where(u <= 0.0, at_u0, np.where(u >= 1.0, at_u1, val))
        out = np.where(v <= 0.0, 0.0, np.where(v >= 1.0, 1.0, out))
        return np.clip(out, 0.0, 1.0)

    def c12(u, v, side="right"):
        u, v = np.asarray(u, float), np.asarray(v, float)
        # tau decreases as v increases
        dA = _side_pick(side, A.d_left, A.d_right)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            luv = np.log(u) + np.log(v)
            tau = np.nan_to_num(np.log(v) / luv)
            val = np.exp(luv * A.eval(tau) - np.log(v)) * (A.eval(tau) + (1.0 - tau) * dA(tau))
            at_v0 = u ** (1.0 - A.d_left(1.0))
            at_v1 = u * (1.0 + A.d_right(0.0))
        out = np.where(v <= 0.0, at_v0, np.where(v >= 1.0, at_v1, val))
        out = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, out))
        return np.clip(out, 0.0, 1.0)

    return Copula(
        cdf=cdf, label=label, params=params or {}, cond_2given1=c21, cond_1given2=c12,
        closed_form_qdc=closed_form, pickands=A,
    )


def cuadras_auge_qdc(theta: float) -> Callable[[float, float], float]:
    """``theta * p^(1-theta) * I{p = q}`` on the closed square."""
    th = float(theta)
    return lambda p, q: th * p ** (1.0 - th) if abs(p - q) <= ON_LINE_TOL else 0.0


def ev_flat_qdc(theta: float, steep_correction: bool = True) -> Callable[[float, float], float]:
    """Coefficient of the EV copula with ``A(t) = max(t, 1 - t, theta)``.

    Interior points carry mass on the kink curves ``p^theta = q^(1-theta)``
    (weight ``theta p^((2 theta - 1)/(1 - theta))``) and
    ``p^(1-theta) = q^theta`` (weight ``1 - theta``). Square bands see only
    a fraction ``1 / slope`` of a curve steeper than the diagonal, so with
    ``steep_correction`` each weight is multiplied by ``min(1, 1 / slope)``;
    without it the uncorrected weights are returned. At the corners the
    lower and upper tail coefficients apply and the remaining boundary is
    zero.
    """
    th = float(theta)

    def qdc(p, q):
        if p in (0.0, 1.0) or q in (0.0, 1.0):
            if p == q == 1.0:
                return 2.0 * (1.0 - th)
            if p == q == 0.0:
                return 1.0 if th == 0.5 else 0.0
            return 0.0
        val = 0.0
        if abs(p ** th - q ** (1.0 - th)) <= ON_LINE_TOL:
            w = th * p ** ((2.0 * th - 1.0) / (1.0 - th))
            slope = th / (1.0 - th) * q / p
            val += w * min(1.0, 1.0 / slope) if steep_correction else w
        if abs(p ** (1.0 - th) - q ** th) <= ON_LINE_TOL:
            w = 1.0 - th
            slope = (1.0 - th) / th * q / p
            val += w * min(1.0, 1.0 / slope) if steep_correction else w
        return val

    return qdc


def make_cuadras_auge(theta: float) -> Copula:
    th = float(theta)
    if not 0.0 <= th <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {th}")
    if th == 0.0:
        return _relabel(make_product(), "cuadras-auge", {"theta": th})
    if th == 1.0:
        return _relabel(make_frechet_upper(), "cuadras-auge", {"theta": th})
    return make_ev(pickands_cuadras_auge(th), "cuadras-auge", {"theta": th},
                   cuadras_auge_qdc(th))


def make_ev_flat(theta: float) -> Copula:
    th = float(theta)
    if not 0.5 <= th <= 1.0:
        raise DomainError(f"theta must lie in [1/2, 1], got {th}")
    if th == 0.5:
        return _relabel(make_frechet_upper(), "ev-flat", {"theta": th})
    if th == 1.0:
        return _relabel(make_product(), "ev-flat", {"theta": th})
    return make_ev(pickands_flat(th), "ev-flat", {"theta": th}, ev_flat_qdc(th))


# --- Archimedean copulas --------------------------------------------------

@dataclass(frozen=True)
class ArchimedeanGenerator:
    """Generator phi with pseudo-inverse and one-sided derivatives.

    ``phi0`` is phi(0), infinite for strict generators. Callables accept
    numpy arrays.
    """

    phi: Callable
    phi_inv: Callable
    d_left: Callable
    d_right: Callable
    phi0: float
    kinks: tuple = ()
    label: str = ""

    @property
    def strict(self) -> bool:
        return math.isinf(self.phi0)


def generator_clayton(alpha: float) -> ArchimedeanGenerator:
    """``phi(t) = (t^-alpha - 1) / alpha``, alpha > 0."""
    a = float(alpha)

    def phi(t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.expm1(-a * np.log(t)) / a

    def phi_inv(s):
        s = np.asarray(s, float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(-np.log1p(a * s) / a)

    def d(t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore", over="ignore"):
            return -(t ** (-a - 1.0))

    return ArchimedeanGenerator(phi, phi_inv, d, d, math.inf, (), "clayton")


def generator_gumbel(alpha: float) -> ArchimedeanGenerator:
    """``phi(t) = (-ln t)^alpha``, alpha >= 1."""
    a = float(alpha)

    def phi(t):
        with np.errstate(divide="ignore"):
            return (-np.log(np.asarray(t, float))) ** a

    def phi_inv(s):
        return np.exp(-(np.asarray(s, float) ** (1.0 / a)))

    def d(t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -a * (-np.log(t)) ** (a - 1.0) / t
        if a == 1.0:
            out = -1.0 / t
        return np.where(t >= 1.0, -1.0 if a == 1.0 else 0.0, out)

    return ArchimedeanGenerator(phi, phi_inv, d, d, math.inf, (), "gumbel")


def generator_ex8(theta: float) -> ArchimedeanGenerator:
    """Piecewise-linear non-strict generator with a kink at theta / 2.

    ``phi(t) = k (theta - t)`` on [0, theta/2] and ``1 - t`` on [theta/2, 1],
    where ``k = (2 - theta) / theta``.
    """
    th = float(theta)
    k = (2.0 - th) / th
    half = 0.5 * th

    def phi(t):
        t = np.asarray(t, float)
        return np.where(t <= half, k * (th - t), 1.0 - t)

    def phi_inv(s):
        s = np.asarray(s, float)
        return np.where(s <= 1.0 - half, 1.0 - s,
                        np.where(s <= 2.0 - th, th - s / k, 0.0))

    def d_left(t):
        return np.where(np.asarray(t, float) <= half, -k, -1.0)

    def d_right(t):
        return np.where(np.asarray(t, float) < half, -k, -1.0)

    return ArchimedeanGenerator(phi, phi_inv, d_left, d_right, 2.0 - th, (half,), "ex8")


def make_archimedean(g: ArchimedeanGenerator, label: str = "archimedean", params=None,
                     closed_form: Optional[Callable] = None) -> Copula:
    """Archimedean copula ``phi_inv(phi(u) + phi(v))``.

    No analytic conditionals are attached: generators may have kinks, so
    consumers fall back to one-sided finite differences of the cdf.
    """

    def cdf(u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        with np.errstate(invalid="ignore", over="ignore"):
            val = g.phi_inv(g.phi(u) + g.phi(v))
        out = np.where(u >= 1.0, v, np.where(v >= 1.0, u, np.clip(val, 0.0, 1.0)))
        out = np.where((u <= 0.0) | (v <= 0.0), 0.0, out)
        return float(out) if out.ndim == 0 else out

    return Copula(cdf=cdf, label=label, params=params or {}, closed_form_qdc=closed_form,
                  generator=g)


def ex8_qdc(theta: float) -> Callable[[float, float], float]:
    """Piecewise coefficient of the ex8 Archimedean copula."""
    th = float(theta)
    k = (2.0 - th) / th
    half = 0.5 * th
    tol = ON_LINE_TOL

    def qdc(p, q):
        if abs(p - half) <= tol and q == 1.0:
            return 0.5 * (1.0 - 1.0 / k)
        if p <= half + tol and abs(q + k * p - 1.0) <= tol:
            return 1.0 / k
        if p >= half - tol and abs(p + k * q - 1.0) <= tol:
            return 1.0 / k
        if p > half + tol and abs(p + q - 1.0 - half) <= tol:
            return 1.0 - 1.0 / k
        return 0.0

    return qdc


def make_archimedean_ex8(theta: float) -> Copula:
    th = float(theta)
    if not 0.0 < th <= 1.0:
        raise DomainError(f"theta must lie in (0, 1], got {th}")
    return make_archimedean(generator_ex8(th), "archimedean-ex8", {"theta": th},
                            ex8_qdc(th))


def make_clayton(alpha: float) -> Copula:
    a = float(alpha)
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"alpha must be positive, got {a}")
    return make_archimedean(generator_clayton(a), "clayton", {"alpha": a})


def make_gumbel(alpha: float) -> Copula:
    a = float(alpha)
    if not a >= 1.0 or math.isinf(a):
        raise DomainError(f"alpha must be >= 1, got {a}")
    return make_archimedean(generator_gumbel(a), "gumbel", {"alpha": a})


# --- shuffle of M ---------------------------------------------------------

def shuffle_qdc(p: float, q: float) -> float:
    on = (abs(p - q / 3.0) <= ON_LINE_TOL
          or abs(p - (2.0 - q) / 3.0) <= ON_LINE_TOL
          or abs(p - (q + 2.0) / 3.0) <= ON_LINE_TOL)
    return 1.0 / 3.0 if on else 0.0


def shuffle_map(x):
    """Piecewise-linear map sending X ~ U(0,1) to Y along three segments."""
    x = np.asarray(x, float)
    return np.where(x < 1.0 / 3.0, 3.0 * x,
                    np.where(x < 2.0 / 3.0, 2.0 - 3.0 * x, 3.0 * x - 2.0))


def make_shuffle() -> Copula:
    """Copula of (X, Y) with Y a three-piece shuffle of X."""

    def cdf(u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        out = np.where(u < v / 3.0, u,
                       np.where(u < (2.0 - v) / 3.0, v / 3.0,
                                np.where(u < (v + 2.0) / 3.0, u - 2.0 * (1.0 - v) / 3.0, v)))
        return float(out) if out.ndim == 0 else out

    def sampler(n, rng):
        x = rng.random(n)
        return np.column_stack([x, shuffle_map(x)])

    return Copula(cdf=cdf, label="shuffle3", sampler=sampler, closed_form_qdc=shuffle_qdc)


def _relabel(C: Copula, label: str, params) -> Copula:
    from dataclasses import replace

    return replace(C, label=label, params=params)
