"""Synthetic mixtures with a fixed overlap between neighbouring components.

Random streams: every dataset gets its own child generator seeded by
``SeedSequence(master_seed, spawn_key=key)``, where ``key`` is a tuple of
small integers identifying the dataset (for the benchmark:
``(group, ov_index, replicate)``). Streams are therefore independent of
execution order and of which other datasets are generated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MixtureParams, WeightedSample

OV_SERIES = (0.05, 0.1, 0.15, 0.2, 0.25)

# group -> (weights mode, sigma range)
GROUPS = {
    1: ("equal", (0.5, 1.0)),
    2: ("equal", (0.05, 1.0)),
    3: ("linear", (0.5, 1.0)),
    4: ("linear", (0.05, 1.0)),
}


@dataclass(frozen=True)
class GroupSpec:
    weights_mode: str = "equal"
    sigma_range: tuple = (0.5, 1.0)
    K: int = 10
    ov: float = 0.1
    N: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.weights_mode not in ("equal", "linear"):
            raise ValueError("weights_mode must be 'equal' or 'linear'")
        lo, hi = self.sigma_range
        if not 0 < lo < hi:
            raise ValueError("sigma_range must satisfy 0 < low < high")
        if not 0 < self.ov < 1:
            raise ValueError("ov must lie in (0, 1)")
        if self.K < 1 or self.N < 1:
            raise ValueError("K and N must be positive")

    @classmethod
    def group(cls, number: int, ov: float, K: int = 10, N: int = 1000, seed: int = 0) -> "GroupSpec":
        mode, rng = GROUPS[number]
        return cls(mode, rng, K, ov, N, seed)

    def weights(self) -> np.ndarray:
        if self.weights_mode == "equal":
            return np.full(self.K, 1.0 / self.K)
        k = np.arange(1, self.K + 1, dtype=float)
        return k / k.sum()


def child_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key)))


def overlap(mu_i, sigma_i, mu_j, sigma_j):
    """exp(-|mu_i - mu_j| / (2 sqrt(sigma_i^2 + sigma_j^2)))"""
    return np.exp(-np.abs(mu_i - mu_j) / (2.0 * np.hypot(sigma_i, sigma_j)))


def spacing_from_overlap(sigma_i, sigma_j, ov):
    """Distance between means that gives overlap ``ov``; inverse of :func:`overlap`."""
    ov = np.asarray(ov, dtype=float)
    if np.any(ov <= 0) or np.any(ov >= 1):
        raise ValueError("ov must lie strictly between 0 and 1")
    return -2.0 * np.hypot(sigma_i, sigma_j) * np.log(ov)


def draw_mixture(spec: GroupSpec, rng: np.random.Generator) -> MixtureParams:
    lo, hi = spec.sigma_range
    sigma = rng.uniform(lo, hi, size=spec.K)
    gaps = spacing_from_overlap(sigma[:-1], sigma[1:], spec.ov)
    means = np.concatenate([[0.0], np.cumsum(gaps)])
    return MixtureParams(spec.weights(), means, sigma)


def sample_mixture(params: MixtureParams, N: int, rng: np.random.Generator) -> WeightedSample:
    """Draw N observations; ties (if any) are merged into counts."""
    if N < 1:
        raise ValueError("N must be positive")
    labels = rng.choice(params.K, size=N, p=params.weights)
    x = rng.normal(params.means[labels], params.stds[labels])
    return WeightedSample.from_observations(x)


def sample_labels(params: MixtureParams, N: int, rng: np.random.Generator):
    """Like :func:`sample_mixture` but returns the raw draws and their labels."""
    labels = rng.choice(params.K, size=N, p=params.weights)
    return rng.normal(params.means[labels], params.stds[labels]), labels
