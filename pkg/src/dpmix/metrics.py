"""Evaluation criteria: location error D, likelihood attainment and BIC."""
from __future__ import annotations

import math

import numpy as np

from .model import MixtureParams

ATTAIN_FRACTION = 0.05
LOG_D_FLOOR = 1e-300


def d_criterion(true_params: MixtureParams, est_params: MixtureParams, N: int) -> float:
    """Mean scaled distance from each true mean to the nearest estimated mean.

    Each term is ``|mu_true - mu_est| / sigma_true * sqrt(N * alpha_true)``.
    An estimated mean may be matched to several true components.
    """
    diff = np.abs(true_params.means[:, None] - est_params.means[None, :]).min(axis=1)
    return float(np.mean(diff / true_params.stds * np.sqrt(N * true_params.weights)))


def avg_log_d(ds) -> float:
    ds = np.asarray(ds, dtype=float)
    if ds.size == 0:
        raise ValueError("need at least one D value")
    return float(np.mean(np.log(np.maximum(ds, LOG_D_FLOOR))))


def attainment(logliks) -> np.ndarray:
    """Which methods reach the best log-likelihood on one dataset.

    Method m attains when ``L_max - L_m < 0.05 * (L_max - L_min)``. With
    zero range every method attains.
    """
    ll = np.asarray(logliks, dtype=float)
    if ll.size < 2:
        raise ValueError("attainment compares at least two methods")
    top = ll.max()
    span = top - ll.min()
    if span == 0:
        return np.ones(ll.shape, dtype=bool)
    return (top - ll) < ATTAIN_FRACTION * span


def avg_p(attainments) -> np.ndarray:
    """Per-method attainment frequency over datasets (rows)."""
    a = np.atleast_2d(np.asarray(attainments, dtype=float))
    return a.mean(axis=0)


def n_free_params(K: int) -> int:
    return 3 * K - 1


def bic(loglik: float, K: int, total_weight: float) -> float:
    """-2 L + (3K - 1) ln(total weight)."""
    if K < 1 or not total_weight > 1:
        raise ValueError("need K >= 1 and total_weight > 1")
    return float(-2.0 * loglik + n_free_params(K) * math.log(total_weight))
