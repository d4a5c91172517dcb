"""Block scores Q1-Q4 evaluated in O(1) from prefix sums.

Indices here are 0-based and inclusive: ``block_score(acc, i, j, spec)``
scores the points ``i, i+1, ..., j``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import WeightedSample


class ScoreKind(str, enum.Enum):
    Q1 = "q1"  # within-block variance
    Q2 = "q2"  # within-block standard deviation
    Q3 = "q3"  # std / block range
    Q4 = "q4"  # (delta + std) / block range


class ScoreFlag(enum.Enum):
    OK = "ok"
    SINGLETON = "singleton"  # zero range under Q3/Q4
    EMPTY = "empty"  # zero total weight


@dataclass(frozen=True)
class ScoringSpec:
    kind: ScoreKind = ScoreKind.Q1
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScoreKind(str(getattr(self.kind, "value", self.kind)).lower()))
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.kind is ScoreKind.Q4 and not self.delta > 0:
            raise ValueError("Q4 requires delta > 0")

    @property
    def needs_range(self) -> bool:
        return self.kind in (ScoreKind.Q3, ScoreKind.Q4)

    def __str__(self):
        if self.kind is ScoreKind.Q4:
            return f"Q4(delta={self.delta:g})"
        return self.kind.name


class PrefixAccumulator:
    """Cumulative sums of y, y*(x-c) and y*(x-c)**2 with a leading zero.

    ``c`` is the first abscissa. Sums are kept in extended precision so that
    block variances survive the subtraction of large prefix values (e.g. m/z
    around 4000 with unit-width peaks).
    """

    def __init__(self, data: WeightedSample):
        self.xs = data.xs
        self.N = data.N
        self.shift = data.xs[0]
        x = data.xs.astype(np.longdouble) - np.longdouble(self.shift)
        y = data.ys.astype(np.longdouble)
        zero = np.zeros(1, dtype=np.longdouble)
        self.cy = np.concatenate([zero, np.cumsum(y)])
        self.cyx = np.concatenate([zero, np.cumsum(y * x)])
        self.cyx2 = np.concatenate([zero, np.cumsum(y * x * x)])
        self._xl = x

    def stats(self, i, j):
        """Weight, weighted mean and weighted variance of block(s) ``i..j``.

        Works elementwise on broadcastable index arrays. Blocks with zero
        weight give ``nan`` mean and variance.
        """
        i = np.asarray(i)
        j = np.asarray(j)
        w = self.cy[j + 1] - self.cy[i]
        s1 = self.cyx[j + 1] - self.cyx[i]
        s2 = self.cyx2[j + 1] - self.cyx2[i]
        # re-centre on the block's first point before squaring
        d = self._xl[i]
        a = s1 - d * w
        b = s2 - 2 * d * s1 + d * d * w
        with np.errstate(invalid="ignore", divide="ignore"):
            m = a / w
            var = np.maximum(b / w - m * m, 0)
        var = np.where(i == j, 0, var)
        mean = (m + d).astype(float) + self.shift
        return w.astype(float), mean, var.astype(float)


def build_prefix_accumulator(data: WeightedSample) -> PrefixAccumulator:
    return PrefixAccumulator(data)


def _scores(acc: PrefixAccumulator, i, j, spec: ScoringSpec):
    w, _, var = acc.stats(i, j)
    empty = ~(w > 0)
    sd = np.sqrt(np.where(empty, 0.0, var))
    kind = spec.kind
    if kind is ScoreKind.Q1:
        q = np.where(empty, 0.0, var)
    elif kind is ScoreKind.Q2:
        q = sd
    else:
        span = acc.xs[j] - acc.xs[i]
        num = sd if kind is ScoreKind.Q3 else spec.delta + sd
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(span > 0, num / np.where(span > 0, span, 1.0), np.inf)
    return np.where(empty, np.inf, q), empty


def block_score(acc: PrefixAccumulator, i: int, j: int, spec: ScoringSpec, with_flag: bool = False):
    """Score of the block ``i..j``; ``inf`` for infeasible blocks.

    Singletons score 0 under Q1/Q2 and ``inf`` under Q3/Q4. Zero-weight
    blocks score ``inf`` under every kind; pass ``with_flag=True`` to tell
    the two cases apart.
    """
    if not 0 <= i <= j < acc.N:
        raise IndexError(f"block {i}..{j} outside 0..{acc.N - 1}")
    q, empty = _scores(acc, i, j, spec)
    q = float(q)
    if not with_flag:
        return q
    if bool(empty):
        flag = ScoreFlag.EMPTY
    elif np.isinf(q):
        flag = ScoreFlag.SINGLETON
    else:
        flag = ScoreFlag.OK
    return q, flag


def score_matrix(acc: PrefixAccumulator, spec: ScoringSpec) -> np.ndarray:
    """All block scores as an (N, N) array, ``inf`` below the diagonal.

    Entry ``[i, j]`` equals ``block_score(acc, i, j, spec)`` bit for bit.
    """
    N = acc.N
    out = np.full((N, N), np.inf)
    for i in range(N):
        j = np.arange(i, N)
        out[i, i:] = _scores(acc, i, j, spec)[0]
    return out
