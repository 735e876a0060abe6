"""Multivariate Gaussians and EM-fitted mixtures."""

import math

import numpy as np
import pytest

from stablebelief import gmm
from stablebelief.errors import (DegenerateComponentError, InsufficientDataError, InvalidParameterError,
                                 SingularCovarianceError)
from stablebelief.gmm import GmmModel, MvGaussian
from stablebelief.presets import GAUSS3_CLASSES


class TestMvGaussian:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            MvGaussian([0, 0], [[1, 0.5], [0.4, 1]])
        with pytest.raises(SingularCovarianceError):
            MvGaussian([0, 0], [[1, 1], [1, 1]])
        with pytest.raises(InvalidParameterError):
            MvGaussian([0, 0, 0], np.eye(2))

    def test_standard_density(self):
        assert MvGaussian([0, 0], np.eye(2)).pdf([0.0, 0.0])[0] == pytest.approx(1 / (2 * math.pi))

    def test_marginal_and_cdf(self):
        g = MvGaussian([1, 2], [[4, 1], [1, 9]])
        m = g.marginal(1)
        assert m.mean[0] == 2 and m.cov[0, 0] == 9
        assert m.cdf1d(2.0) == pytest.approx(0.5)
        with pytest.raises(InvalidParameterError):
            g.cdf1d(0.0)

    def test_json(self):
        g = MvGaussian([1, 2], [[4, 1], [1, 9]])
        h = MvGaussian.from_dict(g.to_dict())
        np.testing.assert_array_equal(h.cov, g.cov)


class TestFitGaussian:
    def test_table_class(self, rng):
        c = GAUSS3_CLASSES[2]
        g = gmm.fit_gaussian(rng.multivariate_normal(c["mean"], c["cov"], 10_000))
        np.testing.assert_allclose(g.mean, c["mean"], atol=0.05)
        np.testing.assert_allclose(g.cov, c["cov"], atol=0.15)

    def test_singular(self):
        with pytest.raises(SingularCovarianceError):
            gmm.fit_gaussian([[1.0, 2.0], [1.0, 2.0]])
        with pytest.raises(SingularCovarianceError):
            gmm.fit_gaussian(np.column_stack([np.arange(10.0), 2 * np.arange(10.0)]))

    def test_affine_equivariance(self, rng):
        X = rng.normal(size=(500, 2))
        A = np.array([[2.0, 0.5], [-1.0, 3.0]])
        b = np.array([4.0, -2.0])
        g, h = gmm.fit_gaussian(X), gmm.fit_gaussian(X @ A.T + b)
        np.testing.assert_allclose(h.mean, A @ g.mean + b, atol=1e-9)
        np.testing.assert_allclose(h.cov, A @ g.cov @ A.T, atol=1e-9)


class TestEm:
    def test_single_component(self, rng):
        X = rng.multivariate_normal([1, -1], [[2, 0.3], [0.3, 1]], 2000)
        m = gmm.fit_gmm_em(X, 1, seed=0)
        g = gmm.fit_gaussian(X)
        np.testing.assert_allclose(m.components[0].mean, g.mean, atol=1e-10)
        np.testing.assert_allclose(m.components[0].cov, g.cov * (len(X) - 1) / len(X), atol=1e-10)

    def test_separated_mixture(self, rng):
        X = np.vstack([rng.normal(0, 1, (1000, 2)), rng.normal(0, 1, (1000, 2)) + [10, 0]])
        m = gmm.fit_gmm_em(X, 2, seed=1)
        np.testing.assert_allclose(sorted(m.weights), [0.5, 0.5], atol=0.05)

    def test_loglik_monotone(self, rng):
        X = np.vstack([rng.normal(0, 1, (600, 2)), rng.standard_cauchy((400, 2))])
        m = gmm.fit_gmm_em(X, 3, seed=2)
        assert np.all(np.diff(m.llHistory) >= -1e-8 * np.abs(m.llHistory[1:]))

    def test_deterministic(self, rng):
        X = rng.normal(size=(400, 2))
        a, b = gmm.fit_gmm_em(X, 2, seed=5), gmm.fit_gmm_em(X, 2, seed=5)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_covariance_floor(self, rng):
        X = np.vstack([rng.normal(0, 1, (300, 2)), np.tile([5.0, 5.0], (100, 1))])
        m = gmm.fit_gmm_em(X, 2, seed=3)
        assert min(np.linalg.eigvalsh(c.cov).min() for c in m.components) >= 1e-6 * (1 - 1e-9)

    def test_needs_data(self):
        with pytest.raises(InsufficientDataError):
            gmm.fit_gmm_em(np.zeros((30, 2)), 2)

    def test_degenerate(self):
        with pytest.raises(DegenerateComponentError):
            gmm.fit_gmm_em(np.ones((200, 2)), 2, restarts=2)


class TestMixture:
    def test_validation(self):
        g = MvGaussian([0.0], [[1.0]])
        with pytest.raises(InvalidParameterError):
            GmmModel([0.5, 0.6], (g, g))

    def test_average_of_components(self, rng):
        a, b = MvGaussian([0, 0], np.eye(2)), MvGaussian([2, 1], [[2, 0.5], [0.5, 1]])
        m = GmmModel([0.5, 0.5], (a, b))
        x = rng.normal(size=(20, 2))
        np.testing.assert_allclose(gmm.gmm_pdf(m, x), 0.5 * (a.pdf(x) + b.pdf(x)), rtol=1e-14)
        np.testing.assert_allclose(np.exp(m.logpdf(x)), m.pdf(x), rtol=1e-12)

    def test_grid_mass(self):
        m = GmmModel([0.3, 0.7], (MvGaussian([0, 0], np.eye(2)), MvGaussian([1, -1], [[0.5, 0.1], [0.1, 0.3]])))
        h = 0.05
        g = np.arange(-8, 8, h) + h / 2
        X, Y = np.meshgrid(g, g)
        mass = m.pdf(np.column_stack([X.ravel(), Y.ravel()])).sum() * h * h
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_json_and_marginal(self):
        m = GmmModel([0.3, 0.7], (MvGaussian([0, 0], np.eye(2)), MvGaussian([1, -1], np.eye(2) * 2)))
        assert GmmModel.from_dict(m.to_dict()).weights.tolist() == [0.3, 0.7]
        mg = m.marginal(1)
        assert mg.cdf1d(-0.5) == pytest.approx(0.3 * 0.3085375387 + 0.7 * 0.6381631950, abs=1e-9)
