"""Named synthetic scenarios and the dataset generator."""

from __future__ import annotations

import copy
import math

import numpy as np

from .bivariate import SpectralStable2D, sample_2d
from .errors import ConfigError
from .stable import StableParams

WINDOW = [-4.0, 4.0, -4.0, 4.0]

# three correlated Gaussian classes
GAUSS3_CLASSES = [
    {"name": "C1", "mean": [2.0, 3.0], "cov": [[1.0, 1.5], [1.5, 3.0]]},
    {"name": "C2", "mean": [1.0, 1.0], "cov": [[3.0, 1.5], [1.5, 1.0]]},
    {"name": "C3", "mean": [-1.0, 1.0], "cov": [[1.0, 0.0], [0.0, 3.0]]},
]

# three bivariate stable classes, spectral masses on the two axes
STABLE3_CLASSES = [
    {"name": "C1", "alpha": 1.5, "weights": [1.0, 1.0], "angles": [0.0, math.pi / 2], "delta": [0.0, 0.0]},
    {"name": "C2", "alpha": 1.5, "weights": [1.0, 1.0], "angles": [0.0, math.pi / 2], "delta": [2.0, 1.4]},
    {"name": "C3", "alpha": 1.5, "weights": [1.0, 1.0], "angles": [0.0, math.pi / 2], "delta": [1.0, 0.5]},
]

# one-dimensional speed laws (alpha = 2 stable, i.e. Gaussian with variance 2 gamma^2)
AIRCRAFT = {
    "Commercial": StableParams(2.0, 0.0, 8.0, 722.5),
    "Bomber": StableParams(2.0, 0.0, 7.0, 690.0),
    "Fighter": StableParams(2.0, 0.0, 10.0, 730.0),
}

PRESETS = {
    "gauss3": {
        "generator": {"family": "gaussian", "classParams": GAUSS3_CLASSES, "nPerClass": 3000,
                      "window": WINDOW, "windowMode": "evaluate"},
        "split": {"p": 1.0 / 3.0, "seed": 0},
        "models": {"family": ["gaussian"], "dimensionMode": ["PerFeature1D", "Joint2D"]},
    },
    "stable3": {
        "generator": {"family": "stable2d", "classParams": STABLE3_CLASSES, "nPerClass": 3000,
                      "window": WINDOW, "windowMode": "evaluate"},
        "split": {"p": 1.0 / 3.0, "seed": 0},
        "models": {"family": ["stable"], "dimensionMode": ["PerFeature1D", "Joint2D"]},
    },
}


def preset(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def class_law(family: str, cp: dict):
    """Build the generating law of one class from its config entry."""
    if family == "gaussian":
        return np.asarray(cp["mean"], float), np.asarray(cp["cov"], float)
    if family == "stable2d":
        return SpectralStable2D(cp["alpha"], tuple(cp["weights"]), tuple(cp["angles"]), tuple(cp["delta"]))
    raise ConfigError(f"unknown generator family {family!r}")


def generate(gen: dict, seed: int):
    """Draw the labelled samples described by a generator config.

    Returns ``(features, labels, classNames)``. With ``windowMode == "generate"``
    points outside the window are redrawn until each class is full; the
    default ``"evaluate"`` keeps all draws and leaves windowing to evaluation.
    """
    try:
        family = gen["family"]
        classes = gen["classParams"]
        n = int(gen["nPerClass"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed generator config: {exc}") from exc
    mode = gen.get("windowMode", "evaluate")
    window = gen.get("window")
    if mode not in ("evaluate", "generate"):
        raise ConfigError(f"windowMode must be 'evaluate' or 'generate', not {mode!r}")
    rng = np.random.default_rng(seed)
    feats, labels = [], []
    for k, cp in enumerate(classes):
        law = class_law(family, cp)

        def draw(m):
            if family == "gaussian":
                return rng.multivariate_normal(law[0], law[1], size=m)
            return sample_2d(law, m, rng)

        if mode == "generate" and window is not None:
            got = np.empty((0, 2))
            while got.shape[0] < n:
                x = draw(n)
                got = np.vstack([got, x[in_window(x, window)]])
            x = got[:n]
        else:
            x = draw(n)
        feats.append(x)
        labels.append(np.full(n, k))
    names = [cp.get("name", f"C{k + 1}") for k, cp in enumerate(classes)]
    return np.vstack(feats), np.concatenate(labels), names


def in_window(X, window) -> np.ndarray:
    x0, x1, y0, y1 = window
    X = np.asarray(X)
    return (X[:, 0] >= x0) & (X[:, 0] <= x1) & (X[:, 1] >= y0) & (X[:, 1] <= y1)
