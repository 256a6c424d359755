"""Backend parity: compiled kernels versus the numpy fallback."""

import numpy as np
import pytest
from scipy import stats

from elm_lab import kernels
from elm_lab.entropy import build_simplex_grid
from elm_lab.kernels import _fallback

_core = pytest.importorskip("elm_lab.kernels._core")


def _random_mixture(rng, m, k):
    weights = rng.dirichlet(np.ones(m))
    alphas = rng.uniform(0.2, 80.0, size=(m, k))
    return weights, alphas


@pytest.mark.parametrize("m,k", [(1, 2), (2, 2), (3, 3), (2, 3)])
def test_log_pdf_parity(m, k):
    rng = np.random.default_rng(17)
    weights, alphas = _random_mixture(rng, m, k)
    theta = rng.dirichlet(np.ones(k), size=200)
    log_theta = np.ascontiguousarray(np.log(theta))
    a = _core.mixture_log_pdf(log_theta, weights, alphas)
    b = _fallback.mixture_log_pdf(log_theta, weights, alphas)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("k,m_grid", [(2, 500), (3, 30)])
def test_entropy_parity(k, m_grid):
    rng = np.random.default_rng(23)
    grid = build_simplex_grid(k, m_grid)
    for m in (1, 2):
        weights, alphas = _random_mixture(rng, m, k)
        a = _core.quantized_entropy_bits(grid.log_points, weights, alphas)
        b = _fallback.quantized_entropy_bits(grid.log_points, weights, alphas)
        assert a == pytest.approx(b, abs=1e-10)


def test_log_pdf_matches_scipy():
    weights = np.array([0.3, 0.7])
    alphas = np.array([[2.0, 5.0], [4.0, 1.5]])
    theta = np.array([[0.2, 0.8], [0.55, 0.45]])
    expected = np.log(
        0.3 * stats.dirichlet.pdf(theta.T, alphas[0])
        + 0.7 * stats.dirichlet.pdf(theta.T, alphas[1])
    )
    got = kernels.mixture_log_pdf(np.log(theta), weights, alphas)
    np.testing.assert_allclose(got, expected, rtol=1e-12)


def test_single_component_path():
    # the M == 1 shortcut in the compiled kernel must equal the general path
    alphas = np.array([[3.0, 4.0]])
    theta = np.random.default_rng(5).dirichlet(np.ones(2), size=50)
    log_theta = np.ascontiguousarray(np.log(theta))
    single = _core.mixture_log_pdf(log_theta, np.ones(1), alphas)
    doubled = _core.mixture_log_pdf(
        log_theta, np.array([0.5, 0.5]), np.vstack([alphas, alphas])
    )
    np.testing.assert_allclose(single, doubled, rtol=1e-12)


def test_entropy_from_log_pdf_matches_scipy_entropy():
    rng = np.random.default_rng(11)
    log_pdf = rng.normal(size=400)
    p = np.exp(log_pdf)
    expected = stats.entropy(p / p.sum(), base=2)
    assert kernels.entropy_bits_from_log_pdf(log_pdf) == pytest.approx(expected, abs=1e-10)


def test_zero_weight_component_is_ignored():
    alphas = np.array([[3.0, 4.0], [50.0, 2.0]])
    theta = np.array([[0.4, 0.6]])
    log_theta = np.log(theta)
    with_zero = kernels.mixture_log_pdf(log_theta, np.array([1.0, 0.0]), alphas)
    alone = kernels.mixture_log_pdf(log_theta, np.ones(1), alphas[:1])
    np.testing.assert_allclose(with_zero, alone, rtol=1e-12)


def test_read_only_inputs_accepted():
    grid = build_simplex_grid(2, 100)  # log_points is non-writeable
    weights = np.ones(1)
    alphas = np.array([[2.0, 2.0]])
    weights.flags.writeable = False
    alphas.flags.writeable = False
    assert np.isfinite(_core.quantized_entropy_bits(grid.log_points, weights, alphas))


def test_backend_constant():
    assert kernels.BACKEND in ("python", "cython")
