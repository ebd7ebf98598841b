import math

import numpy as np
import pytest

from quantdep.core import Rectangle
from quantdep.regression import RegressionModel, make_regression_model

import oracles


@pytest.fixture(scope="module")
def models():
    return {b: RegressionModel(0.0, b) for b in (0.0, 1.0, -1.0, 2.0, -2.0)}


def test_margin_matches_direct_quadrature(models):
    assert models[2.0].g_cdf(0.5) == pytest.approx(oracles.REG_MARGIN_B1_2_AT_05, abs=1e-12)


@pytest.mark.parametrize("b1", [0.0, 1.0, 2.0])
def test_margin_symmetric(models, b1):
    m = models[b1]
    for y in [1e-9, 0.01, 0.7, 3.0, 12.0]:
        assert m.g_cdf(-y) == pytest.approx(1.0 - m.g_cdf(y), abs=1e-14)


def test_margin_monotone_table(models):
    y = np.linspace(-10, 10, 401)
    assert np.all(np.diff(models[1.0].g_cdf_table(y)) >= 0)


def test_g_inv_round_trip(models):
    m = models[1.0]
    for p in [1e-6, 0.1, 0.5 - 2.0 ** -27, 0.5, 0.5 + 2.0 ** -20, 0.9, 0.9999]:
        assert m.g_cdf(m.g_inv(p)) == pytest.approx(p, abs=1e-13)
    assert m.g_inv(0.0) == -math.inf and m.g_inv(1.0) == math.inf


def test_g_inv_odd(models):
    m = models[2.0]
    assert m.g_inv(0.5 - 2.0 ** -12) == -m.g_inv(0.5 + 2.0 ** -12)


def test_cdf_matches_direct_quadrature(models):
    assert models[1.0].cdf_scalar(0.3, 0.6) == pytest.approx(oracles.REG_CDF_B1_1_03_06, abs=1e-10)
    assert models[-2.0].cdf_scalar(0.7, 0.4) == pytest.approx(oracles.REG_CDF_B1_M2_07_04, abs=1e-10)


@pytest.mark.parametrize("b1", [0.0, 2.0])
def test_uniform_margins(models, b1):
    C = models[b1].copula()
    for u in np.linspace(0, 1, 11):
        assert C.cdf(u, 1.0) == pytest.approx(u, abs=1e-6)
        assert C.cdf(1.0, u) == pytest.approx(u, abs=1e-6)


def test_beta0_invariance():
    g = np.linspace(0.1, 0.9, 5)
    base = make_regression_model(0.0, 0.0)
    for b0 in (1.0, 5.0):
        C = make_regression_model(b0, 0.0)
        for u in g:
            for v in g:
                assert C.cdf(u, v) == pytest.approx(base.cdf(u, v), abs=1e-8)


def test_volume_matches_cdf_differences(models):
    C = models[1.0].copula()
    R = Rectangle(0.2, 0.55, 0.3, 0.8)
    four = C.cdf(0.55, 0.8) - C.cdf(0.55, 0.3) - C.cdf(0.2, 0.8) + C.cdf(0.2, 0.3)
    assert C.volume(R) == pytest.approx(four, abs=1e-11)


def test_conditional_matches_fd(models):
    C = models[1.0].copula()
    h = 1e-4
    for u, v in [(0.2, 0.6), (0.7, 0.3), (0.6, 0.55)]:
        fd = (C.cdf(u + h, v) - C.cdf(u - h, v)) / (2 * h)
        assert C.cond_2given1(v, u) == pytest.approx(fd, abs=1e-6)


def test_simulation_raw_and_pseudo_share_stream(models):
    m = models[-1.0]
    xy = m.simulate(50, np.random.default_rng(4))
    uv = m.sample(50, np.random.default_rng(4))
    np.testing.assert_allclose(uv[:, 0], 0.5 * (1 + np.vectorize(math.erf)(xy[:, 0] / math.sqrt(2))), atol=1e-15)
    assert np.all(np.argsort(uv[:, 1]) == np.argsort(xy[:, 1]))
