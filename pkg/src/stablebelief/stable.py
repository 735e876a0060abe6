"""Univariate alpha-stable laws in the continuous (S0) Zolotarev parameterization.

The characteristic function is

    phi(t) = exp(-|g t|^a [1 + i b tan(pi a / 2) sign(t) (|g t|^(1-a) - 1)] + i d t)

for ``a != 1`` and ``exp(-|g t| [1 + i b (2/pi) sign(t) log|g t|] + i d t)`` at
``a == 1``.  With this form ``X = g Z + d`` for a standard ``Z``, so every
evaluation reduces to the standardized law handled by :mod:`.kernels`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import (DegenerateDataError, InsufficientDataError,
                     InvalidParameterError, NumericalFailureError)

ALPHA_SNAP = 1e-6
Method = Literal["auto", "nolan", "fourier"]


def _snap(alpha: float) -> float:
    return 1.0 if abs(alpha - 1.0) < ALPHA_SNAP else float(alpha)


@dataclass(frozen=True)
class StableParams:
    """Parameters ``(alpha, beta, gamma, delta)`` of an S0 stable law."""

    alpha: float
    beta: float
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        if not (0.0 < a <= 2.0):
            raise InvalidParameterError(f"alpha must lie in (0, 2], got {a}")
        if not (-1.0 <= b <= 1.0):
            raise InvalidParameterError(f"beta must lie in [-1, 1], got {b}")
        if not (g > 0.0 and math.isfinite(g)):
            raise InvalidParameterError(f"gamma must be positive, got {g}")
        if not math.isfinite(d):
            raise InvalidParameterError(f"delta must be finite, got {d}")

    @property
    def effective_beta(self) -> float:
        # beta has no effect on the Gaussian member
        return 0.0 if self.alpha == 2.0 else self.beta

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> "StableParams":
        return cls(float(d["alpha"]), float(d["beta"]), float(d["gamma"]), float(d["delta"]))

    def to_s1_delta(self) -> float:
        """Location of the same law in the S1 (discontinuous) parameterization."""
        a, b, g = _snap(self.alpha), self.effective_beta, self.gamma
        if a == 1.0:
            return self.delta - 2.0 / math.pi * b * g * math.log(g)
        return self.delta - b * g * math.tan(math.pi * a / 2.0)

    @classmethod
    def from_s1(cls, alpha: float, beta: float, gamma: float, delta1: float) -> "StableParams":
        a = _snap(alpha)
        if a == 1.0:
            d0 = delta1 + 2.0 / math.pi * beta * gamma * math.log(gamma)
        elif a == 2.0:
            d0 = delta1
        else:
            d0 = delta1 + beta * gamma * math.tan(math.pi * a / 2.0)
        return cls(alpha, beta, gamma, d0)


@dataclass(frozen=True)
class GaussianParams:
    """Univariate normal law with mean ``mu`` and standard deviation ``sigma``."""

    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not (self.sigma > 0.0):
            raise InvalidParameterError(f"sigma must be positive, got {self.sigma}")

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianParams":
        return cls(float(d["mu"]), float(d["sigma"]))


@dataclass(frozen=True)
class EstimationReport:
    params: StableParams
    iterations: int
    converged: bool
    method: Literal["McCullochQuantile", "KoutrouvelisRegression"]


# ---------------------------------------------------------------------------
# distribution functions


def char_fn(p: StableParams, t):
    """Characteristic function evaluated at real ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    a, b = _snap(p.alpha), p.effective_beta
    z = np.abs(p.gamma * t)
    if a == 1.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            zlogz = np.where(z > 0, z * np.log(np.where(z > 0, z, 1.0)), 0.0)
        expo = -z - 1j * b * (2.0 / math.pi) * np.sign(t) * zlogz
    else:
        za = z ** a
        expo = -za - 1j * b * math.tan(math.pi * a / 2.0) * np.sign(t) * (z - za)
    out = np.exp(expo + 1j * p.delta * t)
    return out if out.ndim else complex(out)


def _standardize(p: StableParams, x):
    x = np.asarray(x, dtype=float)
    return (x - p.delta) / p.gamma


def _check(vals, what):
    if np.any(np.isnan(vals)):
        raise NumericalFailureError(f"{what} quadrature failed to converge")
    return vals


def pdf(p: StableParams, x, method: Method = "auto"):
    """Probability density.

    Parameters
    ----------
    p : StableParams
    x : float or array_like
    method : {"auto", "nolan", "fourier"}
        ``auto`` picks closed forms where they exist, the Nolan integral
        elsewhere and direct Fourier inversion in a thin band around alpha = 1.

    Returns
    -------
    float or ndarray
        Density values, clamped at zero.
    """
    z = _standardize(p, x)
    f = kernels.pdf_std(np.atleast_1d(z), _snap(p.alpha), p.effective_beta,
                        kernels.METHODS[method]) / p.gamma
    f = _check(f, "pdf").reshape(z.shape)
    return f if f.ndim else float(f)


def cdf_sf(p: StableParams, x, method: Method = "auto"):
    """Return ``(F(x), 1 - F(x))``, each computed without cancellation."""
    z = _standardize(p, x)
    F, Q = kernels.cdf_sf_std(np.atleast_1d(z), _snap(p.alpha), p.effective_beta,
                              kernels.METHODS[method])
    F = _check(F, "cdf").reshape(z.shape)
    Q = _check(Q, "cdf").reshape(z.shape)
    if F.ndim == 0:
        return float(F), float(Q)
    return F, Q


def cdf(p: StableParams, x, method: Method = "auto"):
    return cdf_sf(p, x, method)[0]


def sf(p: StableParams, x, method: Method = "auto"):
    return cdf_sf(p, x, method)[1]


@functools.lru_cache(maxsize=256)
def _mode_std(alpha: float, beta: float) -> float:
    grid = np.linspace(-6.0, 6.0, 241)
    f = kernels.pdf_std(grid, alpha, beta, 0)
    i = int(np.argmax(f))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda v: -float(kernels.pdf_std(np.array([v]), alpha, beta, 0)[0]),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def mode(p: StableParams) -> float:
    """Location of the density maximum (stable laws are unimodal)."""
    b = p.effective_beta
    if b == 0.0:
        return p.delta
    return p.delta + p.gamma * _mode_std(_snap(p.alpha), b)


def standard_mode(p: StableParams) -> float:
    """Mode of the standardized law ``(x - delta) / gamma``."""
    b = p.effective_beta
    return 0.0 if b == 0.0 else _mode_std(_snap(p.alpha), b)


# ---------------------------------------------------------------------------
# sampling


def sample_s1_standard(alpha: float, beta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Chambers-Mallows-Stuck draws from S1(alpha, beta, 1, 0)."""
    a = _snap(alpha)
    V = rng.uniform(-math.pi / 2.0, math.pi / 2.0, n)
    W = rng.exponential(1.0, n)
    if a == 1.0:
        h = math.pi / 2.0 + beta * V
        return 2.0 / math.pi * (h * np.tan(V) - beta * np.log((math.pi / 2.0) * W * np.cos(V) / h))
    if a == 2.0:
        # beta is irrelevant; avoid tan(pi) round-off
        beta = 0.0
    tan_pa = math.tan(math.pi * a / 2.0)
    B = math.atan(beta * tan_pa) / a
    S = (1.0 + beta * beta * tan_pa * tan_pa) ** (1.0 / (2.0 * a))
    return (S * np.sin(a * (V + B)) / np.cos(V) ** (1.0 / a)
            * (np.cos(V - a * (V + B)) / W) ** ((1.0 - a) / a))


def sample(p: StableParams, n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Draw ``n`` i.i.d. variates; deterministic for a given integer seed."""
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    a, b = _snap(p.alpha), p.effective_beta
    z = sample_s1_standard(a, b, n, rng)
    if a != 1.0:
        z = z - b * math.tan(math.pi * a / 2.0)  # S1 -> S0 standard
    return p.delta + p.gamma * z


# ---------------------------------------------------------------------------
# McCulloch (1986) quantile estimator; tables III, IV, V and VII

_NU_A = np.array([2.439, 2.5, 2.6, 2.7, 2.8, 3, 3.2, 3.5, 4, 5, 6, 8, 10, 15, 25])
_NU_B = np.array([0, 0.1, 0.2, 0.3, 0.5, 0.7, 1])
_PSI1 = np.array([
    [2.000, 2.000, 2.000, 2.000, 2.000, 2.000, 2.000],
    [1.916, 1.924, 1.924, 1.924, 1.924, 1.924, 1.924],
    [1.808, 1.813, 1.829, 1.829, 1.829, 1.829, 1.829],
    [1.729, 1.730, 1.737, 1.745, 1.745, 1.745, 1.745],
    [1.664, 1.663, 1.663, 1.668, 1.676, 1.676, 1.676],
    [1.563, 1.560, 1.553, 1.548, 1.547, 1.547, 1.547],
    [1.484, 1.480, 1.471, 1.460, 1.448, 1.438, 1.438],
    [1.391, 1.386, 1.378, 1.364, 1.337, 1.318, 1.318],
    [1.279, 1.273, 1.266, 1.250, 1.210, 1.184, 1.150],
    [1.128, 1.121, 1.114, 1.101, 1.067, 1.027, 0.973],
    [1.029, 1.021, 1.014, 1.004, 0.974, 0.935, 0.874],
    [0.896, 0.892, 0.884, 0.883, 0.855, 0.823, 0.769],
    [0.818, 0.812, 0.806, 0.801, 0.780, 0.756, 0.691],
    [0.698, 0.695, 0.692, 0.689, 0.676, 0.656, 0.597],
    [0.593, 0.590, 0.588, 0.586, 0.579, 0.563, 0.513]])
_PSI2 = np.array([
    [0, 2.160, 1.000, 1.000, 1.000, 1.000, 1.000],
    [0, 1.592, 3.390, 1.000, 1.000, 1.000, 1.000],
    [0, 0.759, 1.800, 1.000, 1.000, 1.000, 1.000],
    [0, 0.482, 1.048, 1.694, 1.000, 1.000, 1.000],
    [0, 0.360, 0.760, 1.232, 2.229, 1.000, 1.000],
    [0, 0.253, 0.518, 0.823, 1.575, 1.000, 1.000],
    [0, 0.203, 0.410, 0.632, 1.244, 1.906, 1.000],
    [0, 0.165, 0.332, 0.499, 0.943, 1.560, 1.000],
    [0, 0.136, 0.271, 0.404, 0.689, 1.230, 2.195],
    [0, 0.109, 0.216, 0.323, 0.539, 0.827, 1.917],
    [0, 0.096, 0.190, 0.284, 0.472, 0.693, 1.759],
    [0, 0.082, 0.163, 0.243, 0.412, 0.601, 1.596],
    [0, 0.074, 0.147, 0.220, 0.377, 0.546, 1.482],
    [0, 0.064, 0.128, 0.191, 0.330, 0.478, 1.362],
    [0, 0.056, 0.112, 0.167, 0.285, 0.428, 1.274]])
_ALPHA_GRID = np.array([0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0])
_BETA_GRID = np.array([0, 0.25, 0.5, 0.75, 1])
# rows listed for alpha = 2.0 down to 0.5
_PSI3 = np.array([
    [1.908, 1.908, 1.908, 1.908, 1.908],
    [1.914, 1.915, 1.916, 1.918, 1.921],
    [1.921, 1.922, 1.927, 1.936, 1.947],
    [1.927, 1.930, 1.943, 1.961, 1.987],
    [1.933, 1.940, 1.962, 1.997, 2.043],
    [1.939, 1.952, 1.988, 2.045, 2.116],
    [1.946, 1.967, 2.022, 2.106, 2.211],
    [1.955, 1.984, 2.067, 2.188, 2.333],
    [1.965, 2.007, 2.125, 2.294, 2.491],
    [1.980, 2.040, 2.205, 2.435, 2.696],
    [2.000, 2.085, 2.311, 2.624, 2.973],
    [2.040, 2.149, 2.461, 2.886, 3.356],
    [2.098, 2.244, 2.676, 3.265, 3.912],
    [2.189, 2.392, 3.004, 3.844, 4.775],
    [2.337, 2.634, 3.542, 4.808, 6.247],
    [2.588, 3.073, 4.534, 6.636, 9.144]])[::-1]
_PSI5 = np.array([
    [0, 0.000, 0.000, 0.000, 0.000],
    [0, -0.017, -0.032, -0.049, -0.064],
    [0, -0.030, -0.061, -0.092, -0.123],
    [0, -0.043, -0.088, -0.132, -0.179],
    [0, -0.056, -0.111, -0.170, -0.232],
    [0, -0.066, -0.134, -0.206, -0.283],
    [0, -0.075, -0.154, -0.241, -0.335],
    [0, -0.084, -0.173, -0.276, -0.390],
    [0, -0.090, -0.192, -0.310, -0.447],
    [0, -0.095, -0.208, -0.346, -0.508],
    [0, -0.098, -0.223, -0.380, -0.576],
    [0, -0.099, -0.237, -0.424, -0.652],
    [0, -0.096, -0.250, -0.469, -0.742],
    [0, -0.089, -0.262, -0.520, -0.853],
    [0, -0.078, -0.272, -0.581, -0.997],
    [0, -0.061, -0.279, -0.659, -1.198]])[::-1]


def _bilinear(xg, yg, table):
    interp = RegularGridInterpolator((xg, yg), table, method="linear")

    def f(x, y):
        x = min(max(x, xg[0]), xg[-1])
        y = min(max(y, yg[0]), yg[-1])
        return float(interp([[x, y]])[0])

    return f


_psi1 = _bilinear(_NU_A, _NU_B, _PSI1)
_psi2 = _bilinear(_NU_A, _NU_B, _PSI2)
_psi3 = _bilinear(_ALPHA_GRID, _BETA_GRID, _PSI3)
_psi5 = _bilinear(_ALPHA_GRID, _BETA_GRID, _PSI5)

ALPHA_MIN_EST = 0.6


def _clean(data, nmin):
    x = np.asarray(data, dtype=float).ravel()
    x = x[np.isfinite(x)]
    if x.size < nmin:
        raise InsufficientDataError(f"need at least {nmin} finite samples, got {x.size}")
    return x


def estimate_mcculloch(data) -> EstimationReport:
    """Quantile estimator of all four parameters (also the regression start point)."""
    x = _clean(data, 20)
    q05, q25, q50, q75, q95 = np.percentile(x, [5, 25, 50, 75, 95])
    iqr = q75 - q25
    if not iqr > 0.0:
        raise DegenerateDataError("zero interquartile spread")
    nu_a = (q95 - q05) / iqr
    nu_b = (q95 + q05 - 2.0 * q50) / (q95 - q05)
    if nu_a < _NU_A[0]:
        alpha, beta = 2.0, 0.0
    else:
        s = 1.0 if nu_b >= 0 else -1.0
        alpha = _psi1(nu_a, abs(nu_b))
        beta = float(np.clip(s * _psi2(nu_a, abs(nu_b)), -1.0, 1.0))
    alpha = float(np.clip(alpha, np.nextafter(ALPHA_MIN_EST, 1.0), 2.0))
    s = 1.0 if beta >= 0 else -1.0
    gamma = iqr / _psi3(alpha, abs(beta))
    # McCulloch's zeta is the location of the continuous parameterization
    delta = q50 + gamma * s * _psi5(alpha, abs(beta))
    if alpha == 2.0:
        beta = 0.0
    return EstimationReport(StableParams(alpha, beta, gamma, delta), 1, True, "McCullochQuantile")


# ---------------------------------------------------------------------------
# Koutrouvelis iterative regression on the empirical characteristic function

_K_ALPHA = np.array([0.3, 0.5, 0.75, 1.0, 1.25, 1.5, 1.9])
_K_TABLE = np.array([[86, 68, 56], [30, 24, 20], [28, 22, 18], [24, 18, 15],
                     [22, 16, 14], [11, 11, 11], [9, 9, 9]], dtype=float)
_L_ALPHA = np.array([0.3, 0.5, 0.7, 0.9, 1.1, 1.5, 1.9])
_L_TABLE = np.array([[70, 68, 66], [40, 38, 36], [24, 16, 16], [14, 14, 14],
                     [16, 18, 17], [12, 14, 15], [9, 10, 11]], dtype=float)
_N_GRID = np.array([200.0, 800.0, 1600.0])
_k_lookup = _bilinear(_K_ALPHA, _N_GRID, _K_TABLE)
_l_lookup = _bilinear(_L_ALPHA, _N_GRID, _L_TABLE)


def _ecf_moments(z, t):
    """ECF at frequencies ``t`` plus the moments needed for delta-method weights."""
    tz = np.outer(t, z)
    c, s = np.cos(tz), np.sin(tz)
    mc, ms = c.mean(axis=1), s.mean(axis=1)
    vc = (c * c).mean(axis=1) - mc * mc
    vs = (s * s).mean(axis=1) - ms * ms
    cs = (c * s).mean(axis=1) - mc * ms
    return mc, ms, vc, vs, cs


def _wls(X, y, w):
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    return coef


def _alpha_step(z, alpha, n):
    K = int(round(_k_lookup(alpha, n)))
    t = np.pi * np.arange(1, K + 1) / 25.0
    mc, ms, vc, vs, cs = _ecf_moments(z, t)
    mod2 = mc * mc + ms * ms
    ok = (mod2 > 0) & (mod2 < 1)
    if ok.sum() < 2:
        raise DegenerateDataError("empirical characteristic function is degenerate")
    t, mc, ms, vc, vs, cs, mod2 = (v[ok] for v in (t, mc, ms, vc, vs, cs, mod2))
    y = np.log(-np.log(mod2))
    # delta method: Var(|phi|^2) ~ 4 (Re^2 Vc + Im^2 Vs + 2 Re Im Cov) / n
    var_m = 4.0 * (mc * mc * vc + ms * ms * vs + 2.0 * mc * ms * cs) / n
    var_y = np.maximum(var_m, 1e-300) / (mod2 * np.log(mod2)) ** 2
    X = np.column_stack([np.ones_like(t), np.log(t)])
    m, a = _wls(X, y, 1.0 / var_y)
    a = float(np.clip(a, ALPHA_MIN_EST, 2.0))
    g = float((np.exp(m) / 2.0) ** (1.0 / a))
    return a, g


def _beta_step(z, alpha, n):
    L = int(round(_l_lookup(alpha, n)))
    u = np.pi * np.arange(1, L + 1) / 50.0
    mc, ms, vc, vs, cs = _ecf_moments(z, u)
    mod2 = mc * mc + ms * ms
    arg = np.unwrap(np.arctan2(ms, mc))
    var_arg = (mc * mc * vs + ms * ms * vc - 2.0 * mc * ms * cs) / (n * mod2 * mod2)
    a = _snap(alpha)
    if a == 1.0:
        shape = -2.0 / np.pi * u * np.log(u)
    elif a == 2.0:
        shape = np.zeros_like(u)
    else:
        shape = math.tan(math.pi * a / 2.0) * (u ** a - u)
    X = np.column_stack([u, shape])
    w = 1.0 / np.maximum(var_arg, 1e-300)
    if a == 2.0:
        d = _wls(X[:, :1], arg, w)[0]
        return 0.0, float(d)
    d, b = _wls(X, arg, w)
    return float(np.clip(b, -1.0, 1.0)), float(d)


def estimate_koutrouvelis(data, max_iter: int = 10, tol: float = 1e-4) -> EstimationReport:
    """Iterative ECF regression estimator initialized by :func:`estimate_mcculloch`.

    Each pass regresses ``log(-log|phi|^2)`` on ``log t`` for (alpha, scale),
    rescales, then regresses the ECF phase for (beta, location).  Stops when
    alpha and the scale correction both move by less than ``tol``.
    """
    x = _clean(data, 200)
    n = x.size
    init = estimate_mcculloch(x).params
    alpha, beta, gamma, delta = init.alpha, init.beta, init.gamma, init.delta
    z = (x - delta) / gamma
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        a_new, g_step = _alpha_step(z, alpha, n)
        z = z / g_step
        gamma *= g_step
        beta, d_step = _beta_step(z, a_new, n)
        z = z - d_step
        delta += gamma * d_step
        done = abs(a_new - alpha) < tol and abs(g_step - 1.0) < tol
        alpha = a_new
        if done:
            converged = True
            break
    if alpha == 2.0:
        beta = 0.0
    return EstimationReport(StableParams(alpha, beta, gamma, delta), it, converged,
                            "KoutrouvelisRegression")


def fit_stable(data) -> StableParams:
    """Convenience wrapper returning the Koutrouvelis point estimate."""
    return estimate_koutrouvelis(data).params
