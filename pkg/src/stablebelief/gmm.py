"""Multivariate Gaussians and Gaussian mixtures fitted by EM."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.special import logsumexp, ndtr

from .errors import (DegenerateComponentError, InsufficientDataError,
                     InvalidParameterError, SingularCovarianceError)

EIG_FLOOR = 1e-6


def _as_2d(data) -> np.ndarray:
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidParameterError("data must be a sequence of d-vectors")
    return X


@dataclass(frozen=True)
class MvGaussian:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mean, dtype=float))
        V = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if V.shape != (mu.size, mu.size):
            raise InvalidParameterError("covariance shape does not match the mean")
        if np.max(np.abs(V - V.T)) > 1e-12 * max(1.0, np.max(np.abs(V))):
            raise InvalidParameterError("covariance must be symmetric")
        try:
            L = np.linalg.cholesky(V)
        except np.linalg.LinAlgError as exc:
            raise SingularCovarianceError("covariance is not positive definite") from exc
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "cov", V)
        object.__setattr__(self, "_chol", L)

    @property
    def dim(self) -> int:
        return self.mean.size

    def mahalanobis2(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float).reshape(-1, self.dim))
        z = np.linalg.solve(self._chol, (X - self.mean).T)
        return np.sum(z * z, axis=0)

    def logpdf(self, x) -> np.ndarray:
        logdet = 2.0 * np.sum(np.log(np.diag(self._chol)))
        return -0.5 * (self.mahalanobis2(x) + self.dim * math.log(2 * math.pi) + logdet)

    def pdf(self, x) -> np.ndarray:
        return np.exp(self.logpdf(x))

    def marginal(self, k: int) -> "MvGaussian":
        return MvGaussian(self.mean[[k]], self.cov[np.ix_([k], [k])])

    def cdf1d(self, x) -> np.ndarray:
        if self.dim != 1:
            raise InvalidParameterError("cdf1d needs a univariate law")
        return ndtr((np.asarray(x, dtype=float) - self.mean[0]) / math.sqrt(self.cov[0, 0]))

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MvGaussian":
        return cls(np.array(d["mean"]), np.array(d["cov"]))


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray
    components: tuple
    llHistory: tuple = field(default=(), compare=False)
    converged: bool = field(default=True, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or len(w) == 0:
            raise InvalidParameterError("one weight per component required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise InvalidParameterError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def logpdf(self, x) -> np.ndarray:
        L = np.stack([c.logpdf(x) for c in self.components])
        with np.errstate(divide="ignore"):
            return logsumexp(L + np.log(self.weights)[:, None], axis=0)

    def pdf(self, x) -> np.ndarray:
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def marginal(self, k: int) -> "GmmModel":
        return GmmModel(self.weights, tuple(c.marginal(k) for c in self.components))

    def cdf1d(self, x) -> np.ndarray:
        return sum(w * c.cdf1d(x) for w, c in zip(self.weights, self.components))

    def to_dict(self) -> dict:
        return {"components": [{"weight": float(w), **c.to_dict()}
                               for w, c in zip(self.weights, self.components)]}

    @classmethod
    def from_dict(cls, d: dict) -> "GmmModel":
        comps = d["components"]
        return cls(np.array([c["weight"] for c in comps]),
                   tuple(MvGaussian.from_dict(c) for c in comps))


def fit_gaussian(data) -> MvGaussian:
    """Sample mean and unbiased sample covariance."""
    X = _as_2d(data)
    n, d = X.shape
    if n <= d:
        raise SingularCovarianceError(f"{n} points cannot span {d} dimensions")
    V = np.atleast_2d(np.cov(X, rowvar=False, ddof=1))
    V = 0.5 * (V + V.T)
    ev = np.linalg.eigvalsh(V)
    if ev[0] <= 1e-12 * max(ev[-1], 1e-300):
        raise SingularCovarianceError("data lies in a proper subspace")
    return MvGaussian(X.mean(axis=0), V)


def _floor_cov(V):
    ev, U = np.linalg.eigh(0.5 * (V + V.T))
    V = (U * np.maximum(ev, EIG_FLOOR)) @ U.T
    return 0.5 * (V + V.T)


def _em_once(X, k, rng, max_iter, tol):
    n, d = X.shape
    # k-means++ seeding followed by a short Lloyd refinement
    with warnings.catch_warnings(), np.errstate(invalid="ignore", divide="ignore"):
        # empty clusters are handled by the degenerate-weight check below
        warnings.simplefilter("ignore")
        _, labels = kmeans2(X, k, minit="++", seed=rng, iter=10)
    resp = np.zeros((n, k))
    resp[np.arange(n), labels] = 1.0
    resp += 1e-3
    resp /= resp.sum(axis=1, keepdims=True)
    history = []
    converged = False
    w = means = covs = None
    for _ in range(max_iter):
        nk = resp.sum(axis=0)
        w = nk / n
        if np.any(w < 1.0 / n):
            raise DegenerateComponentError("a component weight fell below 1/N")
        means = (resp.T @ X) / nk[:, None]
        covs = []
        for j in range(k):
            D = X - means[j]
            covs.append(_floor_cov((resp[:, j, None] * D).T @ D / nk[j]))
        comps = [MvGaussian(means[j], covs[j]) for j in range(k)]
        logp = np.stack([c.logpdf(X) for c in comps], axis=1) + np.log(w)
        tot = logsumexp(logp, axis=1)
        ll = float(tot.sum())
        history.append(ll)
        resp = np.exp(logp - tot[:, None])
        if len(history) > 1 and abs(history[-1] - history[-2]) < tol * abs(history[-2]):
            converged = True
            break
    return w, comps, history, converged


def fit_gmm_em(data, n_components: int, seed: int = 0, restarts: int = 5,
               max_iter: int = 500, tol: float = 1e-6) -> GmmModel:
    """Fit a Gaussian mixture by EM, keeping the best of ``restarts`` seeded runs.

    Notes
    -----
    Covariance eigenvalues are floored at 1e-6 after every M-step. The returned
    model carries the per-iteration log-likelihood trace in ``llHistory``.
    """
    X = _as_2d(data)
    n, d = X.shape
    k = int(n_components)
    if k < 1:
        raise InvalidParameterError("n_components must be positive")
    if n < 10 * k * d:
        raise InsufficientDataError(f"need at least {10 * k * d} points for {k} components")
    best = None
    last_err = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        try:
            w, comps, hist, conv = _em_once(X, k, rng, max_iter, tol)
        except (DegenerateComponentError, SingularCovarianceError) as exc:
            last_err = exc
            continue
        if best is None or hist[-1] > best[2][-1]:
            best = (w, comps, hist, conv)
    if best is None:
        raise DegenerateComponentError(f"all EM restarts degenerated ({last_err})")
    w, comps, hist, conv = best
    w = w / w.sum()
    return GmmModel(w, tuple(comps), tuple(hist), conv)


def gmm_pdf(model: GmmModel, x) -> np.ndarray:
    return model.pdf(x)
