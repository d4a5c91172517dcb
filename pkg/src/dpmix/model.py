"""Mixture parameters, weighted samples, partitions and likelihoods.

Unbinned observations are carried as a :class:`WeightedSample` with unit
counts, so the same EM updates and scoring code serve both raw samples and
binned spectra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from .errors import InvalidPartitionError

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MixtureParams:
    """Weights, means and standard deviations of a K-component mixture."""

    weights: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        w, m, s = (_frozen(np.atleast_1d(v)) for v in (self.weights, self.means, self.stds))
        if not (w.ndim == m.ndim == s.ndim == 1) or not (len(w) == len(m) == len(s)) or len(w) < 1:
            raise ValueError("weights, means and stds must be 1-d vectors of equal length >= 1")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise ValueError("mixture parameters must be finite")
        if np.any(w <= 0):
            raise ValueError("every weight must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        if np.any(s <= 0):
            raise ValueError("every standard deviation must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "stds", s)

    @property
    def K(self) -> int:
        return len(self.weights)

    @classmethod
    def normalized(cls, weights, means, stds) -> "MixtureParams":
        """Build params after rescaling ``weights`` to sum to one."""
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), means, stds)

    def permuted(self, order) -> "MixtureParams":
        order = np.asarray(order)
        return MixtureParams(self.weights[order], self.means[order], self.stds[order])

    def sorted_by_mean(self) -> "MixtureParams":
        return self.permuted(np.argsort(self.means, kind="stable"))


@dataclass(frozen=True)
class WeightedSample:
    """Strictly ascending abscissas ``xs`` with nonnegative counts ``ys``.

    ``bin_width`` is set only for binned data (equally spaced bin centres).
    Use :meth:`from_observations` to build one from raw, possibly tied values.
    """

    xs: np.ndarray
    ys: np.ndarray
    bin_width: float | None = None

    def __post_init__(self):
        xs = _frozen(np.atleast_1d(self.xs))
        ys = _frozen(np.atleast_1d(self.ys))
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) == 0:
            raise ValueError("xs and ys must be nonempty 1-d vectors of equal length")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("xs and ys must be finite")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(ys < 0):
            raise ValueError("ys must be nonnegative")
        if not ys.sum() > 0:
            raise ValueError("total weight must be positive")
        if self.bin_width is not None:
            bw = float(self.bin_width)
            if not bw > 0:
                raise ValueError("bin_width must be positive")
            if len(xs) > 1 and np.max(np.abs(np.diff(xs) - bw)) > 1e-9 * bw:
                raise ValueError("consecutive xs must differ by bin_width")
            object.__setattr__(self, "bin_width", bw)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_observations(cls, values, counts=None) -> "WeightedSample":
        """Sort raw observations and collapse exact ties into counts."""
        values = np.asarray(values, dtype=float).ravel()
        if counts is None:
            counts = np.ones_like(values)
        counts = np.asarray(counts, dtype=float).ravel()
        if counts.shape != values.shape:
            raise ValueError("counts must match values")
        xs, inverse = np.unique(values, return_inverse=True)
        ys = np.bincount(inverse.ravel(), weights=counts, minlength=len(xs))
        return cls(xs, ys)

    @property
    def N(self) -> int:
        return len(self.xs)

    @property
    def total_weight(self) -> float:
        return float(self.ys.sum())

    def expanded(self) -> np.ndarray:
        """Replicate each abscissa by its (integer) count."""
        reps = np.rint(self.ys).astype(int)
        if not np.allclose(reps, self.ys):
            raise ValueError("expansion requires integer counts")
        return np.repeat(self.xs, reps)

    def restrict(self, lo: float, hi: float) -> "WeightedSample":
        keep = (self.xs >= lo) & (self.xs <= hi)
        return WeightedSample(self.xs[keep], self.ys[keep], self.bin_width)


@dataclass(frozen=True)
class BlockPartition:
    """K contiguous blocks given by boundaries ``0 = b_0 < ... < b_K = N``.

    Block ``k`` (0-based) is the half-open index range ``[b_k, b_{k+1})``.
    """

    boundaries: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries)
        if b.ndim != 1 or len(b) < 2:
            raise InvalidPartitionError("a partition needs at least two boundaries")
        if not np.all(np.equal(np.mod(b, 1), 0)):
            raise InvalidPartitionError("boundaries must be integers")
        b = b.astype(np.int64)
        if b[0] != 0 or np.any(np.diff(b) <= 0):
            raise InvalidPartitionError("boundaries must start at 0 and be strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def from_sizes(cls, sizes) -> "BlockPartition":
        return cls(np.concatenate([[0], np.cumsum(sizes)]))

    @property
    def K(self) -> int:
        return len(self.boundaries) - 1

    @property
    def N(self) -> int:
        return int(self.boundaries[-1])

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def blocks(self):
        """Yield ``(start, stop)`` half-open index pairs."""
        b = self.boundaries
        for k in range(self.K):
            yield int(b[k]), int(b[k + 1])

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.K), self.sizes)

    def __eq__(self, other):
        return isinstance(other, BlockPartition) and np.array_equal(self.boundaries, other.boundaries)

    def __hash__(self):
        return hash(tuple(self.boundaries.tolist()))


@dataclass
class ClampEvent:
    iteration: int
    component: int
    kind: str  # "sigma", "alpha", "empty" or "rescue"


@dataclass
class FitResult:
    params: MixtureParams
    loglik_trace: np.ndarray
    iterations: int
    clamp_events: list = field(default_factory=list)
    converged: bool = False

    @property
    def loglik(self) -> float:
        return float(self.loglik_trace[-1])


def component_log_densities(xs, params: MixtureParams) -> np.ndarray:
    """Matrix of ``log(alpha_k) + log f(x_n; mu_k, sigma_k)`` with shape (N, K)."""
    xs = np.asarray(xs, dtype=float).reshape(-1, 1)
    with np.errstate(over="ignore"):
        z = (xs - params.means) / params.stds
        return np.log(params.weights) - 0.5 * z * z - np.log(params.stds) - LOG_SQRT_2PI


def mixture_pdf(x, params: MixtureParams):
    """Mixture density at ``x`` (scalar or array).

    Each component is evaluated in log space and exponentiated separately.
    """
    scalar = np.ndim(x) == 0
    dens = np.exp(component_log_densities(np.atleast_1d(x), params)).sum(axis=1)
    return float(dens[0]) if scalar else dens


def log_likelihood(data: WeightedSample, params: MixtureParams) -> float:
    """Count-weighted log-likelihood ``sum_n y_n log f_mix(x_n)``.

    Returns ``-inf`` when the value is not finite; callers treat that as
    divergence.
    """
    row = logsumexp(component_log_densities(data.xs, params), axis=1)
    pos = data.ys > 0
    val = float(np.dot(data.ys[pos], row[pos]))
    return val if np.isfinite(val) else -np.inf


def _bin_masses(xs, delta, params):
    lo = (xs.reshape(-1, 1) - delta / 2 - params.means) / params.stds
    hi = lo + delta / params.stds
    # use the upper tail on the right of each mean to avoid cancellation
    right = lo > 0
    mass = np.where(right, norm.sf(lo) - norm.sf(hi), norm.cdf(hi) - norm.cdf(lo))
    return mass @ params.weights


def exact_binned_log_likelihood(data: WeightedSample, params: MixtureParams) -> float:
    """Multinomial log-likelihood ``sum_n y_n log p_n`` with exact bin areas."""
    if data.bin_width is None:
        raise ValueError("exact binned likelihood needs a bin_width")
    p = _bin_masses(data.xs, data.bin_width, params)
    pos = data.ys > 0
    if np.any(p[pos] <= 0):
        return -np.inf
    return float(np.dot(data.ys[pos], np.log(p[pos])))


def blocks_to_params(data: WeightedSample, partition: BlockPartition, sigma_min: float = 1e-2) -> MixtureParams:
    """Initial mixture parameters from the count-weighted moments of each block.

    Weights are block weight fractions; standard deviations are floored at
    ``sigma_min`` so singleton blocks still give a usable starting point.
    """
    if partition.N != data.N:
        raise InvalidPartitionError(f"partition covers {partition.N} points, data has {data.N}")
    K = partition.K
    block_w = np.empty(K)
    means = np.empty(K)
    stds = np.empty(K)
    for k, (a, b) in enumerate(partition.blocks()):
        x, y = data.xs[a:b], data.ys[a:b]
        wk = y.sum()
        if not wk > 0:
            raise InvalidPartitionError(f"block {k} ({a}..{b - 1}) has zero total weight")
        w = y / wk
        mu = np.dot(w, x)
        block_w[k] = wk
        means[k] = mu
        dev = x - mu
        scale = np.max(np.abs(dev))
        # scaled so that very wide blocks do not overflow when squared
        stds[k] = scale * np.sqrt(np.dot(w, (dev / scale) ** 2)) if scale > 0 else 0.0
    stds = np.maximum(stds, sigma_min)
    return MixtureParams(block_w / block_w.sum(), means, stds)
