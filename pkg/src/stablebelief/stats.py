"""Goodness-of-fit and variance-convergence diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import kolmogorov

from .errors import InsufficientDataError, NonFiniteCdfError

LEVEL = 0.05


@dataclass(frozen=True)
class KsReport:
    ksstat: float
    pValue: float
    nSamples: int
    passAt5pct: bool
    label: str = ""

    def to_dict(self) -> dict:
        return {"label": self.label, "ksstat": self.ksstat, "pValue": self.pValue,
                "nSamples": self.nSamples, "passAt5pct": self.passAt5pct}


def ks_pvalue(D: float, n: int) -> float:
    """Asymptotic Kolmogorov p-value with Stephens' small-sample correction."""
    rn = math.sqrt(n)
    return float(kolmogorov((rn + 0.12 + 0.11 / rn) * D))


def ks_test(data, modelCdf: Callable, label: str = "") -> KsReport:
    """One-sample Kolmogorov-Smirnov test of ``data`` against ``modelCdf``."""
    x = np.sort(np.asarray(data, dtype=float).ravel())
    n = x.size
    if n < 20:
        raise InsufficientDataError(f"K-S test needs at least 20 samples, got {n}")
    F = np.asarray(modelCdf(x), dtype=float).reshape(-1)
    if F.shape != x.shape or not np.all(np.isfinite(F)) or F.min() < -1e-12 or F.max() > 1 + 1e-12:
        raise NonFiniteCdfError("model cdf returned values outside [0, 1]")
    F = np.clip(F, 0.0, 1.0)
    i = np.arange(1, n + 1)
    D = float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))
    p = ks_pvalue(D, n)
    return KsReport(D, p, n, p >= LEVEL, label)


def write_ks_csv(reports: Sequence[KsReport], path, header: str | None = None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            fh.write(header.rstrip("\n") + "\n")
        w = csv.writer(fh)
        w.writerow(["label", "pValue", "ksstat", "nSamples", "passAt5pct"])
        for r in reports:
            w.writerow([r.label, f"{r.pValue:.6g}", f"{r.ksstat:.6g}", r.nSamples, int(r.passAt5pct)])


@dataclass(frozen=True)
class RunningVarianceTrace:
    ns: np.ndarray
    variances: np.ndarray


def running_variance(data, stride: int = 100) -> RunningVarianceTrace:
    """Unbiased sample variance of the first ``k`` points for ``k = stride, 2 stride, ...``."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise InsufficientDataError("need at least two samples")
    stride = max(int(stride), 2)
    # shift by the first value to limit cancellation in the running sums
    y = x - x[0]
    s1 = np.cumsum(y)
    s2 = np.cumsum(y * y)
    ns = np.arange(stride, x.size + 1, stride)
    if ns.size == 0 or ns[-1] != x.size:
        ns = np.append(ns, x.size)
    k = ns.astype(float)
    var = (s2[ns - 1] - s1[ns - 1] ** 2 / k) / (k - 1.0)
    return RunningVarianceTrace(ns, np.maximum(var, 0.0))
