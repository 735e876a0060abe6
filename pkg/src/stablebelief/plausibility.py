"""Least-commitment plausibility functions induced by unimodal densities.

For a unimodal density ``f`` the consonant belief function whose focal sets
are the level sets ``{f >= a}`` gives every point the plausibility

    pl(x) = integral of min(f(t), f(x)) dt,

which is what all constructions below compute, in closed form where one exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
from scipy.special import ndtr
from scipy.stats import chi2

from . import kernels, stable
from .belief import Frame, MassFunction, gbt_mass  # noqa: F401  (re-exported)
from .bivariate import TabulatedPdf2D
from .errors import FlatDensityError, InvalidParameterError
from .gmm import GmmModel, MvGaussian
from .stable import GaussianParams, StableParams

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _is_symmetric(p) -> bool:
    return isinstance(p, GaussianParams) or (isinstance(p, StableParams) and p.effective_beta == 0.0)


def _center(p) -> float:
    return p.mu if isinstance(p, GaussianParams) else p.delta


def _pdf_sf(p, x):
    if isinstance(p, GaussianParams):
        z = (x - p.mu) / p.sigma
        return np.exp(-0.5 * z * z) / (_SQRT2PI * p.sigma), ndtr(-z)
    return np.atleast_1d(stable.pdf(p, x)), np.atleast_1d(stable.sf(p, x))


def pl_symmetric_1d(p: Union[StableParams, GaussianParams], x):
    """Plausibility for a law symmetric about its centre ``mu``.

    ``pl(x) = 2 (x - mu) f(x) + 2 (1 - F(x))`` on the right flank, mirrored on
    the left.
    """
    if not _is_symmetric(p):
        raise InvalidParameterError("law is not symmetric; use pl_asymmetric_1d")
    x = np.asarray(x, dtype=float)
    mu = _center(p)
    r = mu + np.abs(np.atleast_1d(x) - mu)
    f, Q = _pdf_sf(p, r)
    out = np.clip(2.0 * (r - mu) * f + 2.0 * Q, 0.0, 1.0).reshape(x.shape)
    return out if out.ndim else float(out)


def conjugate_point(p: StableParams, y):
    """Point on the other flank of the mode with the same density as ``y``."""
    y = np.asarray(y, dtype=float)
    z = (np.atleast_1d(y) - p.delta) / p.gamma
    _, c = kernels.pl_conj_std(z, stable._snap(p.alpha), p.effective_beta, stable.standard_mode(p))
    out = (p.delta + p.gamma * c).reshape(y.shape)
    return out if out.ndim else float(out)


def pl_asymmetric_1d(p: Union[StableParams, GaussianParams], y):
    """Plausibility of a possibly skewed unimodal law via the conjugate point.

    ``pl(y) = F(lo) + 1 - F(hi) + (hi - lo) f(y)`` where ``{lo, hi}`` are ``y``
    and its conjugate. The computation runs on the standardized law, which
    leaves plausibility unchanged.
    """
    if isinstance(p, GaussianParams):
        return pl_symmetric_1d(p, y)
    y = np.asarray(y, dtype=float)
    z = (np.atleast_1d(y) - p.delta) / p.gamma
    pl, _ = kernels.pl_conj_std(z, stable._snap(p.alpha), p.effective_beta, stable.standard_mode(p))
    out = pl.reshape(y.shape)
    return out if out.ndim else float(out)


def pl_1d(p, x):
    """Dispatch to the symmetric closed form when it applies."""
    return pl_symmetric_1d(p, x) if _is_symmetric(p) else pl_asymmetric_1d(p, x)


def _single_point(x, d: int) -> bool:
    return np.ndim(x) == 0 or (np.ndim(x) == 1 and d > 1)


def pl_gaussian_mv(g: MvGaussian, x):
    """``1 - F_{d+2}(r^2)`` with ``r`` the Mahalanobis distance to the mean."""
    out = chi2.sf(g.mahalanobis2(x), g.dim + 2)
    return float(out[0]) if _single_point(x, g.dim) else out


def pl_gmm_mv(model: GmmModel, x):
    """Mixture-weighted sum of component plausibilities."""
    d = model.dim
    out = sum(w * chi2.sf(c.mahalanobis2(x), d + 2) for w, c in zip(model.weights, model.components))
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if _single_point(x, d) else out


# ---------------------------------------------------------------------------
# alpha-cut tables for gridded 2D densities


@dataclass(frozen=True)
class CutTable:
    """Tabulated plausibility as a function of density level.

    ``levels`` decrease; ``volumes[k]`` is the area of ``{f >= levels[k]}``;
    ``cumulativePl[k] = integral_0^levels[k] volume(a) da`` divided by the
    window mass ``norm``.
    """

    levels: np.ndarray
    volumes: np.ndarray
    cumulativePl: np.ndarray
    norm: float

    def pl_at_level(self, level):
        lv = np.asarray(level, dtype=float)
        out = np.interp(lv, self.levels[::-1], self.cumulativePl[::-1])
        return np.clip(out, 0.0, 1.0)


def _layer_cake(sorted_vals, prefix, cell, a):
    """Exact ``cell * sum(min(v, a))`` for ascending values and their prefix sums."""
    k = np.searchsorted(sorted_vals, a, side="left")
    below = prefix[k]
    return cell * (below + (sorted_vals.size - k) * a)


def build_cut_table(pdf: TabulatedPdf2D, nLevels: int = 256, normalize: bool = True) -> CutTable:
    """Tabulate alpha-cut volumes and cumulative plausibility over ``nLevels`` levels.

    Levels mix a uniform grid in density value with density quantiles so both
    the peak and the low-density tails are resolved.
    """
    if nLevels < 64:
        raise InvalidParameterError("nLevels must be at least 64")
    v = np.sort(pdf.values.ravel())
    pos = np.unique(v[v > 0.0])
    if pos.size < 2:
        raise FlatDensityError("density grid has fewer than two distinct positive levels")
    prefix = np.concatenate([[0.0], np.cumsum(v)])
    half = nLevels // 2
    uni = np.linspace(0.0, pos[-1], half)
    qua = np.quantile(pos, np.linspace(0.0, 1.0, nLevels - half))
    lv = np.unique(np.concatenate([uni, qua, [0.0, pos[-1]]]))
    while lv.size < nLevels:
        # shared endpoints leave the union short; split the widest gaps
        k = np.argsort(np.diff(lv))[::-1][: nLevels - lv.size]
        lv = np.unique(np.concatenate([lv, 0.5 * (lv[k] + lv[k + 1])]))
    cum = _layer_cake(v, prefix, pdf.cellArea, lv)
    vol = pdf.cellArea * (v.size - np.searchsorted(v, lv, side="left"))
    norm = float(cum[-1]) if normalize else 1.0
    return CutTable(lv[::-1].copy(), vol[::-1].astype(float), (cum / norm)[::-1].copy(), norm)


def pl_alphacut_2d(table: CutTable, pdf: TabulatedPdf2D, x):
    """Plausibility of ``x``: cumulative cut volume at the interpolated density of ``x``."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    out = table.pl_at_level(pdf.density(pts))
    return out if np.ndim(x) > 1 else float(out[0])


def min_integral_2d(pdf: TabulatedPdf2D, level: float, norm: float = 1.0) -> float:
    """Grid evaluation of ``integral min(f, level)``, the 2D reference value."""
    return float(pdf.cellArea * np.minimum(pdf.values, level).sum() / norm)


# ---------------------------------------------------------------------------


Kind = Literal["Symmetric1D", "Asymmetric1D", "GaussianMv", "GmmMv", "AlphaCut2D"]


class PlausibilitySource:
    """A density model bundled with its plausibility evaluator."""

    def __init__(self, model, pdf_grid: TabulatedPdf2D | None = None, nLevels: int = 256):
        self.model = model
        self.table = None
        self.grid = None
        if isinstance(model, (StableParams, GaussianParams)):
            self.kind: Kind = "Symmetric1D" if _is_symmetric(model) else "Asymmetric1D"
            self.mode = stable.mode(model) if isinstance(model, StableParams) else model.mu
        elif isinstance(model, MvGaussian):
            self.kind, self.mode = "GaussianMv", model.mean
        elif isinstance(model, GmmModel):
            self.kind, self.mode = "GmmMv", None
        elif isinstance(model, TabulatedPdf2D) or pdf_grid is not None:
            self.grid = model if isinstance(model, TabulatedPdf2D) else pdf_grid
            self.table = build_cut_table(self.grid, nLevels)
            self.kind, self.mode = "AlphaCut2D", np.array(self.grid.argmax())
        else:
            raise InvalidParameterError(f"unsupported model type {type(model).__name__}")

    def pl(self, x):
        if self.kind == "Symmetric1D":
            return pl_symmetric_1d(self.model, x)
        if self.kind == "Asymmetric1D":
            return pl_asymmetric_1d(self.model, x)
        if self.kind == "GaussianMv":
            return pl_gaussian_mv(self.model, x)
        if self.kind == "GmmMv":
            return pl_gmm_mv(self.model, x)
        return pl_alphacut_2d(self.table, self.grid, x)
