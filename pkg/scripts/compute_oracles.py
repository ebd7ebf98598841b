"""Recompute the frozen reference values in tests/oracles.py.

Every number here comes from a route independent of the package: mpmath
integration of bivariate densities, direct linear-scale quadrature of the
regression margin, and closed forms evaluated in high precision.
"""

import mpmath as mp
import numpy as np
from scipy import integrate, optimize, stats

mp.mp.dps = 30


def bivariate_t_cdf(u, v, rho, nu):
    a = mp.mpf(stats.t.ppf(u, nu))
    b = mp.mpf(stats.t.ppf(v, nu))
    c = mp.gamma((nu + 2) / mp.mpf(2)) / (mp.gamma(nu / mp.mpf(2)) * nu * mp.pi * mp.sqrt(1 - rho ** 2))

    def dens(x, y):
        q = (x * x - 2 * rho * x * y + y * y) / (nu * (1 - rho ** 2))
        return c * (1 + q) ** (-(nu + 2) / mp.mpf(2))

    return float(mp.quad(dens, [-mp.inf, min(a, 0), a], [-mp.inf, min(b, 0), b]))


def t_corner(rho, nu, same):
    a, b = (1 - mp.mpf(rho), 1 + mp.mpf(rho)) if same else (1 + mp.mpf(rho), 1 - mp.mpf(rho))
    x = -mp.sqrt((nu + 1) * a / b)
    n = nu + 1
    # Student t cdf through the incomplete beta function
    return float(2 * mp.betainc(n / mp.mpf(2), mp.mpf(1) / 2, 0, n / (n + x * x), regularized=True) / 2)


def regression_margin(y, b1):
    f = lambda x: stats.norm.pdf(x) * stats.norm.cdf((y - b1 * x) / abs(x))
    return (integrate.quad(f, -np.inf, 0, epsabs=1e-14, limit=400)[0]
            + integrate.quad(f, 0, np.inf, epsabs=1e-14, limit=400)[0])


def regression_cdf(u, v, b1):
    y = optimize.brentq(lambda y: regression_margin(y, b1) - v, -60, 60, xtol=1e-14)
    z = stats.norm.ppf(u)
    f = lambda x: stats.norm.pdf(x) * stats.norm.cdf((y - b1 * x) / abs(x))
    val = integrate.quad(f, -np.inf, min(z, 0.0), epsabs=1e-14, limit=400)[0]
    if z > 0:
        val += integrate.quad(f, 0.0, z, epsabs=1e-14, limit=400)[0]
    return val


if __name__ == "__main__":
    print("T_NU1_RHO0_HALF =", repr(bivariate_t_cdf(0.5, 0.5, 0.0, 1)))
    print("T_NU1_RHO0_03_06 =", repr(bivariate_t_cdf(0.3, 0.6, 0.0, 1)))
    print("T_NU3_RHO05_03_07 =", repr(bivariate_t_cdf(0.3, 0.7, 0.5, 3)))
    for rho, nu in [(0.0, 1), (0.5, 3), (-0.5, 3)]:
        print(f"corner rho={rho} nu={nu}:", repr(t_corner(rho, nu, True)), repr(t_corner(rho, nu, False)))
    print("REG_MARGIN_B1_2_AT_05 =", repr(regression_margin(0.5, 2.0)))
    print("REG_CDF_B1_1_03_06 =", repr(regression_cdf(0.3, 0.6, 1.0)))
    print("REG_CDF_B1_M2_07_04 =", repr(regression_cdf(0.7, 0.4, -2.0)))
    rng = np.random.default_rng(2024)
    # rho = 0 is not independence: both coordinates share one chi-square
    z = rng.standard_normal((2_000_000, 2)) / np.sqrt(rng.chisquare(1, size=(2_000_000, 1)))
    print("monte carlo t nu=1 rho=0 C(0.3,0.6):", np.mean((z[:, 0] <= stats.t.ppf(0.3, 1)) & (z[:, 1] <= stats.t.ppf(0.6, 1))))
