"""Evidential classification with plausibility functions built from alpha-stable laws."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .belief import Frame, MassFunction, combine_conjunctive, decide, gbt_mass, pignistic
from .bivariate import SpectralStable2D, TabulatedPdf2D, estimate_spectral, pdf_grid, sample_2d
from .errors import *  # noqa: F401,F403
from .gmm import GmmModel, MvGaussian, fit_gaussian, fit_gmm_em
from .kernels import BACKEND
from .pipeline import Dataset, classify_bayes, classify_belief, fit_models, ks_gate, run_experiment, split
from .plausibility import PlausibilitySource, build_cut_table, pl_1d
from .stable import (GaussianParams, StableParams, cdf, estimate_koutrouvelis, estimate_mcculloch,
                     fit_stable, pdf, sample)
from .stats import ks_test, running_variance

__all__ = [
    "BACKEND", "Dataset", "Frame", "GaussianParams", "GmmModel", "MassFunction", "MvGaussian",
    "PlausibilitySource", "SpectralStable2D", "StableParams", "TabulatedPdf2D", "build_cut_table",
    "cdf", "classify_bayes", "classify_belief", "combine_conjunctive", "decide", "estimate_koutrouvelis",
    "estimate_mcculloch", "estimate_spectral", "fit_gaussian", "fit_gmm_em", "fit_models", "fit_stable",
    "gbt_mass", "ks_gate", "ks_test", "pdf", "pdf_grid", "pignistic", "pl_1d", "run_experiment",
    "running_variance", "sample", "sample_2d", "split",
]
