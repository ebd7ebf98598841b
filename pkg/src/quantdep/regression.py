"""Copula of a heteroscedastic regression model.

The model is ``Y = beta0 + beta1 X + |X| Z`` with ``X, Z`` iid standard
normal, so ``Y | X = x ~ N(beta0 + beta1 x, x^2)``. The margin of
``Y - beta0`` is

    G(y) = int phi(x) Phi((y - beta1 x) / |x|) dx,

which is symmetric about zero. Writing it as ``1/2 + sign(y) H(|y|)`` with

    H(y) = int_0^inf phi(s) [Phi(y/s - |beta1|) - Phi(-y/s - |beta1|)] ds

keeps full precision near the median, where the density of ``Y - beta0``
has a logarithmic singularity. All integrals over ``s`` are taken on a
log scale so that the transition at ``s ~ |y|`` is resolved for tiny ``y``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy import special as sp
from scipy.interpolate import PchipInterpolator

from .core import Copula, CopulaError, DomainError, Rectangle

S_MAX = 40.0  # phi(40) underflows; the s-integrals are cut there
TABLE_POINTS = 2001
TABLE_SPAN = 8.0  # table covers [-8 sigma, 8 sigma], sigma^2 = 1 + beta1^2
SQRT2 = math.sqrt(2.0)


class QuadratureFailure(CopulaError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _quad(f, a, b, points=None, epsabs=1e-14, epsrel=1e-12):
    pts = None
    if points:
        pts = sorted(x for x in set(points) if a < x < b) or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(f, a, b, points=pts, epsabs=epsabs, epsrel=epsrel,
                                        limit=200, full_output=1)[:3]
    if not math.isfinite(val) or err > max(1e3 * epsabs, 1e-6 * abs(val), 1e-15):
        raise QuadratureFailure(f"quad on [{a}, {b}] returned {val} +- {err}")
    return val


def _phi(s):
    return math.exp(-0.5 * s * s) / math.sqrt(2.0 * math.pi)


def _ndtr_diff(a2, a1):
    """``Phi(a2) - Phi(a1)`` evaluated on the side that avoids cancellation."""
    if a1 > 0.0:
        return sp.ndtr(-a1) - sp.ndtr(-a2)
    return sp.ndtr(a2) - sp.ndtr(a1)


@dataclass(frozen=True)
class RegressionModel:
    """Tabulated margin of the regression model.

    ``g_cdf`` and ``g_inv`` act on the centered response ``Y - beta0``. The
    PCHIP table is used for bracketing roots and for mapping simulated
    responses to pseudo-observations; point evaluations go through
    quadrature.
    """

    beta0: float
    beta1: float
    _y: np.ndarray = field(init=False, repr=False)
    _h: np.ndarray = field(init=False, repr=False)
    _interp: PchipInterpolator = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        b0, b1 = float(self.beta0), float(self.beta1)
        if not (math.isfinite(b0) and math.isfinite(b1)):
            raise DomainError(f"betas must be finite, got {self.beta0}, {self.beta1}")
        object.__setattr__(self, "beta0", b0)
        object.__setattr__(self, "beta1", b1)
        sigma = math.sqrt(1.0 + b1 * b1)
        y = np.linspace(0.0, TABLE_SPAN * sigma, TABLE_POINTS // 2 + 1)
        h = np.array([0.0] + [self.centered_mass(v) for v in y[1:]])
        h = np.maximum.accumulate(h)
        object.__setattr__(self, "_y", y)
        object.__setattr__(self, "_h", h)
        object.__setattr__(self, "_interp", PchipInterpolator(y, h))
        object.__setattr__(self, "_cache", {})

    # --- margin ---------------------------------------------------------

    def _d(self, r):
        b = abs(self.beta1)
        if b == 0.0:
            return sp.erf(r / SQRT2)
        return 0.5 * (sp.erfc((b - r) / SQRT2) - sp.erfc((b + r) / SQRT2))

    def centered_mass(self, y: float) -> float:
        """``H(y) = G(y) - 1/2`` for ``y >= 0``."""
        if y <= 0.0:
            return 0.0
        if math.isinf(y):
            return 0.5
        s_lo = 1e-3 * y
        head = 0.5 * sp.erf(s_lo / SQRT2)  # D(y/s) = 1 for s < s_lo
        if s_lo >= S_MAX:
            return head
        ly = math.log(y)

        def f(w):
            s = math.exp(w)
            return _phi(s) * self._d(y / s) * s

        body = _quad(f, math.log(s_lo), math.log(S_MAX), points=[ly - 3, ly, ly + 3, 0.0],
                     epsabs=1e-16 * min(y, 1.0), epsrel=1e-12)
        return min(head + body, 0.5)

    def g_cdf(self, y: float) -> float:
        y = float(y)
        h = self.centered_mass(abs(y))
        return 0.5 + h if y >= 0 else 0.5 - h

    def g_cdf_table(self, y):
        """Tabulated G, exact beyond the table range."""
        y = np.asarray(y, float)
        ay = np.abs(y)
        inside = ay <= self._y[-1]
        h = np.where(inside, self._interp(np.minimum(ay, self._y[-1])), 0.0)
        for i in np.flatnonzero(~inside):
            h.flat[i] = self.centered_mass(float(ay.flat[i]))
        return 0.5 + np.sign(y) * h

    def _solve_centered(self, h: float) -> float:
        if h in self._cache:
            return self._cache[h]
        if h <= 0.0:
            return 0.0
        if h >= 0.5:
            return math.inf
        y, tab = self._y, self._h
        if h <= tab[1]:
            hi = y[1]
            lo = hi / 16.0
            while self.centered_mass(lo) >= h:
                lo /= 16.0
        elif h > tab[-1]:
            lo = y[-1]
            hi = 2.0 * lo
            while self.centered_mass(hi) < h:
                lo, hi = hi, 2.0 * hi
                if hi > 1e4:
                    return hi
        else:
            i = int(np.searchsorted(tab, h))
            lo, hi = y[i - 1], y[i]
            lo = max(lo, hi * 1e-6)
        w = optimize.brentq(lambda w: self.centered_mass(math.exp(w)) - h,
                            math.log(lo), math.log(hi), xtol=1e-15, rtol=1e-15, maxiter=200)
        val = math.exp(w)
        self._cache[h] = val
        return val

    def g_inv(self, p: float) -> float:
        """Quantile of ``Y - beta0``; ``p - 1/2`` is formed exactly."""
        p = float(p)
        if p <= 0.0:
            return -math.inf
        if p >= 1.0:
            return math.inf
        h = p - 0.5
        y = self._solve_centered(abs(h))
        return y if h >= 0 else -y

    # --- copula ---------------------------------------------------------

    def _strip(self, s_lo, s_hi, sign, y1, y2, epsabs):
        """``int_{s_lo}^{s_hi} phi(s) [Phi(y2/s - sign b) - Phi(y1/s - sign b)] ds``."""
        bs = sign * self.beta1
        s_hi = min(s_hi, S_MAX)
        if s_hi <= s_lo:
            return 0.0

        def g(s):
            a2 = y2 / s - bs if math.isfinite(y2) else y2
            a1 = y1 / s - bs if math.isfinite(y1) else y1
            return _ndtr_diff(a2, a1)

        ys = [abs(y) for y in (y1, y2) if math.isfinite(y) and y != 0.0]
        total = 0.0
        if s_lo <= 0.0:
            # below eps the bracket is constant in s
            eps = min(1e-4 * min(ys + [1.0]), s_hi)
            total += 0.5 * sp.erf(eps / SQRT2) * g(0.5 * eps)
            s_lo = eps
            if s_hi <= s_lo:
                return total
        pts = [math.log(y) + d for y in ys for d in (-3.0, 0.0, 3.0)] + [0.0]

        def f(w):
            s = math.exp(w)
            return _phi(s) * g(s) * s

        total += _quad(f, math.log(s_lo), math.log(s_hi), points=pts, epsabs=epsabs, epsrel=1e-11)
        return total

    def volume(self, R: Rectangle) -> float:
        """C-volume of ``R`` as a single integral over x of the conditional."""
        z1, z2 = sp.ndtri(R.u1), sp.ndtri(R.u2)
        y1, y2 = self.g_inv(R.v1), self.g_inv(R.v2)
        if y1 == y2 or z1 == z2:
            return 0.0
        epsabs = max(1e-14 * (R.u2 - R.u1), 1e-300)
        total = 0.0
        if z1 < 0.0:
            total += self._strip(max(-z2, 0.0), -z1, -1.0, y1, y2, epsabs)
        if z2 > 0.0:
            total += self._strip(max(z1, 0.0), z2, 1.0, y1, y2, epsabs)
        return total

    def cdf_scalar(self, u: float, v: float) -> float:
        if u <= 0.0 or v <= 0.0:
            return 0.0
        if u >= 1.0:
            return float(v)
        if v >= 1.0:
            return float(u)
        val = self.volume(Rectangle(0.0, u, 0.0, v))
        return min(max(val, 0.0), min(u, v))

    def cond_2given1(self, v, u, side="right"):
        def one(v, u):
            if v <= 0.0:
                return 0.0
            if v >= 1.0:
                return 1.0
            z, y = sp.ndtri(u), self.g_inv(v)
            if z == 0.0:
                return 1.0 if y > 0 else (0.0 if y < 0 else float(sp.ndtr(-self.beta1)))
            if math.isinf(z):
                return float(sp.ndtr(-self.beta1 * math.copysign(1.0, z)))
            return float(sp.ndtr((y - self.beta1 * z) / abs(z)))

        if np.ndim(u) == 0 and np.ndim(v) == 0:
            return one(float(v), float(u))
        return np.vectorize(one, otypes=[float])(v, u)

    def simulate(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Raw ``(x, y)`` draws of the model."""
        x = rng.standard_normal(n)
        z = rng.standard_normal(n)
        return np.column_stack([x, self.beta0 + self.beta1 * x + np.abs(x) * z])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        xy = self.simulate(n, rng)
        return np.column_stack([sp.ndtr(xy[:, 0]), self.g_cdf_table(xy[:, 1] - self.beta0)])

    def copula(self) -> Copula:
        def cdf(u, v):
            if np.ndim(u) == 0 and np.ndim(v) == 0:
                return self.cdf_scalar(float(u), float(v))
            return np.vectorize(self.cdf_scalar, otypes=[float])(u, v)

        return Copula(
            cdf=cdf,
            label="regression",
            params={"beta0": self.beta0, "beta1": self.beta1},
            cond_2given1=self.cond_2given1,
            sampler=self.sample,
            volume=self.volume,
            model=self,
            quadrature=True,
        )


def make_regression_model(beta0: float, beta1: float) -> Copula:
    """Copula of ``(X, Y)`` with ``Y | X = x ~ N(beta0 + beta1 x, x^2)``."""
    return RegressionModel(beta0, beta1).copula()
