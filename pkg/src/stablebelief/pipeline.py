"""Supervised evidential classification and its Bayesian baseline.

Protocol: random split, per-class model fit, K-S validation gate, then for
each test sample per-class plausibilities, generalized-Bayes masses,
conjunctive combination over features, pignistic decision.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import belief, bivariate, gmm, plausibility, stable, stats
from .bivariate import SpectralStable2D, TabulatedPdf2D
from .errors import ConfigError, GateFailure, InvalidParameterError, StableBeliefError
from .gmm import GmmModel, MvGaussian
from .presets import generate, in_window
from .stable import GaussianParams, StableParams

Family = Literal["gaussian", "stable", "gmm"]
DimensionMode = Literal["PerFeature1D", "Joint2D"]
REJECT = -1
# a 1/3 split of 3000 draws per class leaves about 1000 points, sometimes fewer
SPECTRAL_MIN_LEARN = 500
Z95 = 1.959963984540054


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    featureNames: tuple = ("f1", "f2")
    classNames: tuple = ("C1", "C2", "C3")

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.labels, dtype=int)
        if X.shape[0] != y.shape[0]:
            raise InvalidParameterError("features and labels differ in length")
        if X.shape[1] > 2:
            raise InvalidParameterError("at most two features are supported")
        if not np.all(np.isfinite(X)):
            raise InvalidParameterError("features must be finite")
        if y.size and (y.min() < 0 or y.max() >= len(self.classNames)):
            raise InvalidParameterError("labels outside the frame")
        self.features, self.labels = X, y
        self.featureNames = tuple(self.featureNames)[: X.shape[1]]
        self.classNames = tuple(self.classNames)

    def __len__(self):
        return self.labels.size

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.featureNames, self.classNames)

    @property
    def frame(self) -> belief.Frame:
        return belief.Frame(self.classNames)


def split(data: Dataset, p: float, seed: int):
    """Uniform random split; ``floor(N p)`` rows go to the learning set."""
    if not 0.0 < p < 1.0:
        raise InvalidParameterError("split fraction must lie in (0, 1)")
    n = len(data)
    k = int(math.floor(n * p + 1e-9))
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(np.sort(perm[:k])), data.subset(np.sort(perm[k:]))


# ---------------------------------------------------------------------------
# models


@dataclass
class ClassModel:
    label: str
    prior: float
    perFeature1D: list = field(default_factory=list)
    joint2D: object = None
    grid: TabulatedPdf2D | None = None
    _sources: list = field(default_factory=list, repr=False)
    _joint_source: object = field(default=None, repr=False)

    def sources(self):
        if not self._sources:
            self._sources = [plausibility.PlausibilitySource(m) for m in self.perFeature1D]
        return self._sources

    def joint_source(self):
        if self._joint_source is None:
            if isinstance(self.joint2D, SpectralStable2D):
                self._joint_source = plausibility.PlausibilitySource(self.grid)
            else:
                self._joint_source = plausibility.PlausibilitySource(self.joint2D)
        return self._joint_source

    def to_dict(self) -> dict:
        d = {"class": self.label, "prior": self.prior,
             "perFeature1D": [_model_dict(m) for m in self.perFeature1D]}
        if self.joint2D is not None:
            d["joint2D"] = _model_dict(self.joint2D)
            if self.grid is not None:
                d["gridMass"] = self.grid.mass
        return d


def _model_dict(m) -> dict:
    kind = {StableParams: "stable", GaussianParams: "gaussian", MvGaussian: "mvgaussian",
            GmmModel: "gmm", SpectralStable2D: "spectral2d"}[type(m)]
    return {"kind": kind, **m.to_dict()}


def _fit_1d(x, family, k, seed):
    if family == "gaussian":
        return GaussianParams(float(np.mean(x)), float(np.std(x, ddof=1)))
    if family == "stable":
        return stable.estimate_koutrouvelis(x).params
    if family == "gmm":
        return gmm.fit_gmm_em(x[:, None], k, seed)
    raise ConfigError(f"unknown model family {family!r}")


def fit_models(learn: Dataset, family: Family, dimensionMode: DimensionMode, gmmComponents: int = 3,
               seed: int = 0, spectralK: int = 8, window=(-4.0, 4.0, -4.0, 4.0),
               resolution: int = 512, priors: Sequence[float] | None = None) -> list:
    """Fit one model per class; priors default to class proportions in ``learn``."""
    n = len(learn)
    out = []
    for c, name in enumerate(learn.classNames):
        X = learn.features[learn.labels == c]
        prior = float(X.shape[0] / n) if priors is None else float(priors[c])
        cm = ClassModel(name, prior)
        try:
            if dimensionMode == "PerFeature1D":
                cm.perFeature1D = [_fit_1d(X[:, j], family, gmmComponents, seed + 7919 * c + j)
                                   for j in range(X.shape[1])]
            elif dimensionMode == "Joint2D":
                if family == "gaussian":
                    cm.joint2D = gmm.fit_gaussian(X)
                elif family == "gmm":
                    cm.joint2D = gmm.fit_gmm_em(X, gmmComponents, seed + 7919 * c)
                elif family == "stable":
                    cm.joint2D = bivariate.estimate_spectral(X, spectralK, SPECTRAL_MIN_LEARN)
                    cm.grid = bivariate.pdf_grid(cm.joint2D, window, resolution)
                else:
                    raise ConfigError(f"unknown model family {family!r}")
            else:
                raise ConfigError(f"unknown dimension mode {dimensionMode!r}")
        except StableBeliefError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise type(exc)(f"class {name}: {exc}") from exc
        out.append(cm)
    return out


def _marginal_cdf(cm: ClassModel, j: int):
    if cm.perFeature1D:
        m = cm.perFeature1D[j]
    else:
        m = cm.joint2D
        if isinstance(m, SpectralStable2D):
            u = np.zeros(2)
            u[j] = 1.0
            m = bivariate.projection(m, u)
        else:
            m = m.marginal(j)
    if isinstance(m, StableParams):
        return lambda x: stable.cdf(m, x)
    if isinstance(m, GaussianParams):
        return lambda x: _norm_cdf(x, m)
    return m.cdf1d


def _norm_cdf(x, g: GaussianParams):
    from scipy.special import ndtr
    return ndtr((np.asarray(x) - g.mu) / g.sigma)


def ks_gate(models: Sequence[ClassModel], learn: Dataset) -> list:
    """K-S reports of each class and feature against the fitted (marginal) law."""
    reps = []
    for c, cm in enumerate(models):
        X = learn.features[learn.labels == c]
        for j in range(X.shape[1]):
            label = f"{cm.label}/{learn.featureNames[j]}"
            reps.append(stats.ks_test(X[:, j], _marginal_cdf(cm, j), label))
    return reps


# ---------------------------------------------------------------------------
# classification


def _threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def _chunked(fn, x, chunk=256):
    """Apply ``fn`` to row chunks of ``x`` in a thread pool (kernels release the GIL)."""
    parts = [x[i:i + chunk] for i in range(0, len(x), chunk)]
    if len(parts) <= 1:
        return fn(x)
    with ThreadPoolExecutor(_threads()) as ex:
        return np.concatenate(list(ex.map(fn, parts)))


def plausibility_matrix(models: Sequence[ClassModel], X, dimensionMode: DimensionMode):
    """Per-class plausibilities: ``(d, N, n)`` in 1D mode, ``(1, N, n)`` jointly."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if dimensionMode == "PerFeature1D":
        d = X.shape[1]
        out = np.empty((d, X.shape[0], len(models)))
        for j in range(d):
            for c, cm in enumerate(models):
                src = cm.sources()[j]
                out[j, :, c] = _chunked(lambda v, s=src: np.atleast_1d(s.pl(v)), X[:, j])
        return out
    out = np.empty((1, X.shape[0], len(models)))
    for c, cm in enumerate(models):
        out[0, :, c] = np.atleast_1d(cm.joint_source().pl(X))
    return out


@dataclass
class BeliefOutput:
    decisions: np.ndarray
    betP: np.ndarray
    masses: np.ndarray
    plausibilities: np.ndarray


def classify_belief(models: Sequence[ClassModel], X, dimensionMode: DimensionMode,
                    rejectFallback: bool = False) -> BeliefOutput:
    """Evidential decisions; total conflict yields ``REJECT`` (or uniform betP on request)."""
    P = plausibility_matrix(models, X, dimensionMode)
    n = len(models)
    q = np.ones(P.shape[1:2] + (1 << n,))
    for j in range(P.shape[0]):
        q *= belief.superset_sum(belief.gbt_dense(P[j]), n)
    m = np.maximum(belief.superset_mobius(q, n), 0.0)
    m /= m.sum(axis=1, keepdims=True)
    bet = belief.pignistic_dense(m, n)
    conflict = m[:, 0] >= 1.0 - belief.CONFLICT_TOL
    if rejectFallback:
        bet[conflict] = 1.0 / n
    dec = np.where(np.isnan(bet).any(axis=1), REJECT, np.argmax(np.nan_to_num(bet, nan=-1.0), axis=1))
    return BeliefOutput(dec.astype(int), bet, m, P)


def class_log_density(cm: ClassModel, X, dimensionMode: DimensionMode) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with np.errstate(divide="ignore"):
        if dimensionMode == "PerFeature1D":
            tot = np.zeros(X.shape[0])
            for j, m in enumerate(cm.perFeature1D):
                x = X[:, j]
                if isinstance(m, StableParams):
                    f = _chunked(lambda v, mm=m: np.atleast_1d(stable.pdf(mm, v)), x)
                    tot += np.log(f)
                elif isinstance(m, GaussianParams):
                    tot += -0.5 * ((x - m.mu) / m.sigma) ** 2 - math.log(m.sigma * math.sqrt(2 * math.pi))
                else:
                    tot += m.logpdf(x[:, None])
            return tot
        if isinstance(cm.joint2D, SpectralStable2D):
            return np.log(cm.grid.density(X))
        return cm.joint2D.logpdf(X)


def classify_bayes(models: Sequence[ClassModel], X, dimensionMode: DimensionMode, priors=None):
    """Maximum a posteriori decisions and posterior probabilities."""
    L = np.stack([class_log_density(cm, X, dimensionMode) for cm in models], axis=1)
    pri = np.array([cm.prior for cm in models] if priors is None else priors, dtype=float)
    with np.errstate(divide="ignore"):
        L = L + np.log(pri / pri.sum())
    mx = L.max(axis=1, keepdims=True)
    ok = np.isfinite(mx[:, 0])
    post = np.full(L.shape, np.nan)
    post[ok] = np.exp(L[ok] - mx[ok])
    post[ok] /= post[ok].sum(axis=1, keepdims=True)
    dec = np.where(ok, np.argmax(np.where(np.isfinite(L), L, -np.inf), axis=1), REJECT)
    return dec.astype(int), post


# ---------------------------------------------------------------------------
# experiments


def wilson(k: int, n: int, z: float = Z95):
    """Wilson score interval for a binomial proportion, in percent."""
    if n == 0:
        return (float("nan"), float("nan"))
    p = k / n
    den = 1.0 + z * z / n
    c = (p + z * z / (2 * n)) / den
    h = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return (100.0 * (c - h), 100.0 * (c + h))


@dataclass
class ExperimentResult:
    classifier: str
    family: str
    dimensionMode: str
    accuracy: float
    ci95: tuple
    confusion: np.ndarray
    rejected: int
    nTest: int
    ksReports: list
    gatePassed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"classifier": self.classifier, "family": self.family,
                "dimensionMode": self.dimensionMode, "accuracy": self.accuracy,
                "ci95": list(self.ci95), "confusion": np.asarray(self.confusion).tolist(),
                "rejected": self.rejected, "nTest": self.nTest, "gatePassed": self.gatePassed,
                "ksReports": [r.to_dict() for r in self.ksReports], **self.extra}


def score(decisions, truth, n_classes: int):
    conf = np.zeros((n_classes, n_classes), dtype=int)
    ok = decisions != REJECT
    np.add.at(conf, (truth[ok], decisions[ok]), 1)
    rejected = int((~ok).sum())
    correct = int(np.trace(conf))
    n = truth.size
    return 100.0 * correct / n if n else float("nan"), wilson(correct, n), conf, rejected


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def dataset_from_config(config: dict, seed: int | None = None) -> Dataset:
    gen = config.get("generator")
    if gen is None:
        raise ConfigError("config needs a 'generator' section")
    X, y, names = generate(gen, int(config.get("seed", 0) if seed is None else seed))
    return Dataset(X, y, ("f1", "f2"), tuple(names))


def run_experiment(config: dict, seed: int | None = None, data: Dataset | None = None) -> dict:
    """Run the full protocol for every requested (family, dimension mode) pair.

    Returns a JSON-ready dict with one entry per (classifier, family, mode) in
    ``results``. The test set is restricted to the generator window when one is
    given; the number of test points outside it is reported.
    ``models.gate`` selects ``"enforce"`` (raise :class:`GateFailure`),
    ``"report"`` (classify anyway, flag the run) or ``"skip"`` (skip failing runs).
    """
    try:
        models_cfg = config.get("models", {})
        sp = config.get("split", {})
        p = float(sp.get("p", 1.0 / 3.0))
        split_seed = int(sp.get("seed", 0)) if seed is None else int(seed)
        families = _as_list(models_cfg.get("family", "stable"))
        modes = _as_list(models_cfg.get("dimensionMode", "PerFeature1D"))
        k = int(models_cfg.get("gmmComponents", 3))
        spectralK = int(models_cfg.get("spectralK", 8))
        resolution = int(models_cfg.get("resolution", 512))
        gate = models_cfg.get("gate", "enforce")
        priors = models_cfg.get("priors")
        reject_fallback = bool(models_cfg.get("rejectFallback", False))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if gate not in ("enforce", "report", "skip"):
        raise ConfigError(f"models.gate must be enforce, report or skip, not {gate!r}")
    if data is None:
        data = dataset_from_config(config, split_seed)
    window = (config.get("generator") or {}).get("window")
    learn, test = split(data, p, split_seed)
    n_out = 0
    if window is not None and data.features.shape[1] == 2:
        keep = in_window(test.features, window)
        n_out = int((~keep).sum())
        test = test.subset(np.flatnonzero(keep))
    win = tuple(window) if window is not None else (-4.0, 4.0, -4.0, 4.0)
    results = []
    for fam in families:
        for mode in modes:
            cms = fit_models(learn, fam, mode, k, split_seed, spectralK, win, resolution)
            reps = ks_gate(cms, learn)
            passed = all(r.passAt5pct for r in reps)
            if not passed and gate == "enforce":
                bad = ", ".join(r.label for r in reps if not r.passAt5pct)
                raise GateFailure(f"K-S gate failed for {fam}/{mode}: {bad}", reps)
            if not passed and gate == "skip":
                results.append(ExperimentResult("none", fam, mode, float("nan"), (float("nan"),) * 2,
                                                np.zeros((0, 0)), 0, len(test), reps, False))
                continue
            bo = classify_belief(cms, test.features, mode, reject_fallback)
            runs = [("belief", bo.decisions, {})]
            bd, _ = classify_bayes(cms, test.features, mode)
            runs.append(("bayes", bd, {}))
            if priors is not None:
                bpd, _ = classify_bayes(cms, test.features, mode, priors)
                runs.append(("bayes_forced_priors", bpd, {"priors": list(map(float, priors))}))
            for name, dec, extra in runs:
                acc, ci, conf, rej = score(dec, test.labels, len(data.classNames))
                results.append(ExperimentResult(
                    name, fam, mode, acc, ci, conf, rej, len(test), reps, passed,
                    {"outsideWindow": n_out, **extra}))
    return {"configHash": config_hash(config), "seed": split_seed, "nLearn": len(learn),
            "nTest": len(test), "outsideWindow": n_out,
            "results": [r.to_dict() for r in results], "_objects": results}
