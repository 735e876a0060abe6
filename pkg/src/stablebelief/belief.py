"""Belief-function algebra on a finite frame of discernment.

Subsets are bitmasks (bit ``i`` set means class ``i`` belongs to the subset) and
every set function is stored as a dense array of length ``2**n``.  Zeta and
Moebius transforms run in ``O(n 2**n)`` by sweeping one axis per class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (FrameMismatchError, InvalidCommonalityError,
                     InvalidParameterError, TotalConflictError)

MAX_CLASSES = 16
NORM_TOL = 1e-9
CONFLICT_TOL = 1e-12


@dataclass(frozen=True)
class Frame:
    classNames: tuple

    def __post_init__(self):
        names = tuple(str(c) for c in self.classNames)
        if not names:
            raise InvalidParameterError("frame must be nonempty")
        if len(set(names)) != len(names):
            raise InvalidParameterError("class labels must be unique")
        if len(names) > MAX_CLASSES:
            raise InvalidParameterError(f"at most {MAX_CLASSES} classes supported")
        object.__setattr__(self, "classNames", names)

    @property
    def n(self) -> int:
        return len(self.classNames)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def subset(self, members: Iterable) -> int:
        """Bitmask of the given class indices or labels."""
        mask = 0
        for c in members:
            i = self.classNames.index(c) if isinstance(c, str) else int(c)
            mask |= 1 << i
        return mask

    def key(self, mask: int) -> str:
        return "0b" + format(mask, f"0{self.n}b")


# ---------------------------------------------------------------------------
# transforms on dense arrays


def _sweep(v: np.ndarray, n: int, src: int, sign: float) -> np.ndarray:
    """Add ``sign * v[.. bit=src ..]`` into ``v[.. bit=1-src ..]`` for every bit.

    Works along the last axis (length ``2**n``) so leading batch axes are
    transformed independently.
    """
    out = np.array(v, dtype=float, copy=True)
    a = out.reshape(out.shape[:-1] + (2,) * n)
    lead = out.ndim - 1
    for ax in range(n):
        s_idx = [slice(None)] * (lead + n)
        d_idx = [slice(None)] * (lead + n)
        s_idx[lead + ax], d_idx[lead + ax] = src, 1 - src
        a[tuple(d_idx)] += sign * a[tuple(s_idx)]
    return out


def superset_sum(v: np.ndarray, n: int) -> np.ndarray:
    """``out[A] = sum_{B >= A} v[B]`` (commonality from masses)."""
    return _sweep(v, n, 1, 1.0)


def superset_mobius(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`superset_sum`."""
    return _sweep(v, n, 1, -1.0)


def subset_sum(v: np.ndarray, n: int) -> np.ndarray:
    """``out[A] = sum_{B <= A} v[B]``."""
    return _sweep(v, n, 0, 1.0)


def popcount(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    c = np.zeros(1 << n, dtype=int)
    for i in range(n):
        c += (idx >> i) & 1
    return c


# ---------------------------------------------------------------------------


class MassFunction:
    """Open-world basic belief assignment (mass on the empty set allowed)."""

    __slots__ = ("frame", "_m")

    def __init__(self, frame: Frame, masses):
        self.frame = frame
        size = 1 << frame.n
        if isinstance(masses, dict):
            m = np.zeros(size)
            for k, v in masses.items():
                mask = int(k, 2) if isinstance(k, str) else int(k)
                if not 0 <= mask < size:
                    raise InvalidParameterError(f"subset {k} outside the frame")
                m[mask] += float(v)
        else:
            m = np.array(masses, dtype=float, copy=True)
            if m.shape != (size,):
                raise InvalidParameterError(f"dense masses need length {size}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise InvalidParameterError("masses must be finite and nonnegative")
        if abs(m.sum() - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"masses sum to {m.sum()}, not 1")
        m.setflags(write=False)
        self._m = m

    # constructors
    @classmethod
    def vacuous(cls, frame: Frame) -> "MassFunction":
        m = np.zeros(1 << frame.n)
        m[frame.full] = 1.0
        return cls(frame, m)

    @classmethod
    def categorical(cls, frame: Frame, mask: int) -> "MassFunction":
        m = np.zeros(1 << frame.n)
        m[mask] = 1.0
        return cls(frame, m)

    # views
    @property
    def dense(self) -> np.ndarray:
        return self._m

    def focal(self) -> dict:
        """Focal elements only: ``{mask: mass}`` for strictly positive masses."""
        return {int(i): float(v) for i, v in enumerate(self._m) if v > 0.0}

    def __getitem__(self, mask: int) -> float:
        return float(self._m[mask])

    @property
    def conflict(self) -> float:
        return float(self._m[0])

    def bel_all(self) -> np.ndarray:
        out = subset_sum(self._m, self.frame.n)
        return out - self._m[0]

    def pl_all(self) -> np.ndarray:
        imp = subset_sum(self._m, self.frame.n)
        full = self.frame.full
        return self._m.sum() - imp[full ^ np.arange(full + 1)]

    def q_all(self) -> np.ndarray:
        return superset_sum(self._m, self.frame.n)

    def to_dict(self) -> dict:
        return {"frame": list(self.frame.classNames),
                "masses": {self.frame.key(k): v for k, v in self.focal().items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "MassFunction":
        return cls(Frame(tuple(d["frame"])), {k: v for k, v in d["masses"].items()})

    def allclose(self, other: "MassFunction", atol: float = 1e-9) -> bool:
        return self.frame == other.frame and np.allclose(self._m, other._m, atol=atol, rtol=0)

    def __repr__(self):
        items = ", ".join(f"{self.frame.key(k)}: {v:.6g}" for k, v in self.focal().items())
        return f"MassFunction({{{items}}})"


def bel(m: MassFunction, A: int) -> float:
    """Belief: total mass of nonempty subsets of ``A``."""
    return float(m.bel_all()[A])


def pl(m: MassFunction, A: int) -> float:
    """Plausibility: total mass of subsets meeting ``A``."""
    return float(m.pl_all()[A])


def commonality(m: MassFunction, A: int) -> float:
    return float(m.q_all()[A])


def from_commonality(q, frame: Frame) -> MassFunction:
    """Moebius inversion of a commonality function (dense array or ``{mask: q}``)."""
    size = 1 << frame.n
    if isinstance(q, dict):
        qv = np.zeros(size)
        for k, v in q.items():
            qv[int(k, 2) if isinstance(k, str) else int(k)] = v
    else:
        qv = np.asarray(q, dtype=float)
    m = superset_mobius(qv, frame.n)
    if np.any(m < -NORM_TOL):
        raise InvalidCommonalityError(f"Moebius inversion gave mass {m.min():.3g}")
    m = np.maximum(m, 0.0)
    return MassFunction(frame, m)


def _same_frame(ms: Sequence[MassFunction]) -> Frame:
    if not ms:
        raise InvalidParameterError("nothing to combine")
    f = ms[0].frame
    for m in ms[1:]:
        if m.frame != f:
            raise FrameMismatchError("mass functions are on different frames")
    return f


def combine_conjunctive(ms: Sequence[MassFunction]) -> MassFunction:
    """Unnormalized conjunctive rule via the pointwise product of commonalities."""
    ms = list(ms)
    f = _same_frame(ms)
    q = np.ones(1 << f.n)
    for m in ms:
        q *= m.q_all()
    out = superset_mobius(q, f.n)
    out = np.maximum(out, 0.0)
    return MassFunction(f, out / out.sum())


def combine_conjunctive_direct(ms: Sequence[MassFunction]) -> MassFunction:
    """Same rule by summing mass products over intersections of focal sets."""
    ms = list(ms)
    f = _same_frame(ms)
    acc = ms[0].dense.copy()
    idx = np.arange(1 << f.n)
    for m in ms[1:]:
        nxt = np.zeros_like(acc)
        for b, mb in m.focal().items():
            np.add.at(nxt, idx & b, acc * mb)
        acc = nxt
    return MassFunction(f, acc)


def pignistic(m: MassFunction) -> np.ndarray:
    """Pignistic probabilities ``betP`` normalized by ``1 - m(empty)``."""
    n = m.frame.n
    if m.conflict >= 1.0 - CONFLICT_TOL:
        raise TotalConflictError("all mass on the empty set")
    size = popcount(n)
    share = np.zeros(1 << n)
    share[1:] = m.dense[1:] / size[1:]
    idx = np.arange(1 << n)
    bet = np.array([share[(idx >> i) & 1 == 1].sum() for i in range(n)])
    return bet / (1.0 - m.conflict)


def decide(betP) -> int:
    """Index of the largest probability; ties go to the lowest index."""
    return int(np.argmax(np.asarray(betP)))


def gbt_dense(pls) -> np.ndarray:
    """Batch GBT: rows of plausibilities ``(..., n)`` to dense masses ``(..., 2**n)``."""
    p = np.clip(np.asarray(pls, dtype=float), 0.0, 1.0)
    m = np.ones(p.shape[:-1] + (1,))
    for i in range(p.shape[-1]):
        # bit i becomes the new most significant bit
        m = np.concatenate([m * (1.0 - p[..., i:i + 1]), m * p[..., i:i + 1]], axis=-1)
    return m


def pignistic_dense(m: np.ndarray, n: int) -> np.ndarray:
    """Batch pignistic transform; rows in total conflict come back as NaN."""
    m = np.asarray(m, dtype=float)
    size = popcount(n)
    share = np.zeros_like(m)
    share[..., 1:] = m[..., 1:] / size[1:]
    idx = np.arange(1 << n)
    bet = np.stack([share[..., ((idx >> i) & 1) == 1].sum(axis=-1) for i in range(n)], axis=-1)
    denom = 1.0 - m[..., :1]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = bet / denom
    return np.where(denom <= CONFLICT_TOL, np.nan, out)


def gbt_mass(pls, frame: Frame) -> MassFunction:
    """Generalized Bayes theorem: ``m(A) = prod_{i in A} pl_i prod_{i not in A} (1 - pl_i)``."""
    p = np.asarray(pls, dtype=float)
    if p.shape != (frame.n,):
        raise InvalidParameterError(f"need {frame.n} plausibilities")
    return MassFunction(frame, gbt_dense(p))
