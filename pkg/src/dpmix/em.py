"""EM iterations for count-weighted univariate Gaussian mixtures.

Standard deviations and weights are floored at ``sigma_min`` and
``alpha_min`` after every M-step; the likelihood is unbounded for
heteroscedastic mixtures and the floors keep the iterations away from
collapsing components.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DivergenceError
from .model import ClampEvent, FitResult, MixtureParams, WeightedSample, component_log_densities, log_likelihood

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmConfig:
    sigma_min: float = 1e-2
    alpha_min: float = 1e-4
    max_iters: int = 5000
    rel_tol: float = 1e-8

    def __post_init__(self):
        if not self.sigma_min > 0:
            raise ValueError("sigma_min must be positive")
        if not 0 < self.alpha_min < 1:
            raise ValueError("alpha_min must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    def check_k(self, K: int):
        if not self.alpha_min < 1.0 / K:
            raise ValueError(f"alpha_min={self.alpha_min} must be below 1/K={1.0 / K}")


SIMULATION_PROFILE = EmConfig(sigma_min=1e-2, alpha_min=1e-4)
SPECTRA_PROFILE = EmConfig(sigma_min=1.0, alpha_min=1e-5)
PROFILES = {"simulation": SIMULATION_PROFILE, "spectra": SPECTRA_PROFILE}


def e_step(data: WeightedSample, params: MixtureParams, events: list | None = None) -> np.ndarray:
    """Posterior component probabilities, shape (N, K).

    Rows whose normaliser is not finite are assigned wholly to the component
    nearest in standardised distance; each such row appends a ``rescue``
    event to ``events`` when a list is given.
    """
    lc = component_log_densities(data.xs, params)
    norm_ = logsumexp(lc, axis=1, keepdims=True)
    bad = ~np.isfinite(norm_[:, 0])
    with np.errstate(invalid="ignore"):
        resp = np.exp(lc - norm_)
    if np.any(bad):
        z = np.abs(data.xs[bad, None] - params.means) / params.stds
        resp[bad] = 0.0
        resp[bad, np.argmin(z, axis=1)] = 1.0
        if events is not None:
            events.extend(ClampEvent(-1, int(n), "rescue") for n in np.flatnonzero(bad))
    return resp


def m_step(
    data: WeightedSample,
    resp: np.ndarray,
    config: EmConfig,
    prev: MixtureParams | None = None,
    events: list | None = None,
    iteration: int = 0,
) -> MixtureParams:
    """Weighted parameter updates followed by the sigma/alpha floors.

    Weights are renormalised after flooring. A component with no
    responsibility mass keeps its previous mean (when ``prev`` is given) and
    restarts at ``alpha_min`` and ``sigma_min``.
    """
    y = data.ys
    yr = y[:, None] * resp
    mass = yr.sum(axis=0)
    W = y.sum()
    K = resp.shape[1]
    alpha = mass / W
    empty = ~(mass > 0)
    safe = np.where(empty, 1.0, mass)
    mu = (yr * data.xs[:, None]).sum(axis=0) / safe
    with np.errstate(over="ignore"):
        var = (yr * (data.xs[:, None] - mu) ** 2).sum(axis=0) / safe
    sigma = np.sqrt(var)
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
        raise DivergenceError(f"M-step produced non-finite parameters at iteration {iteration}", prev, iteration)
    if np.any(empty):
        mu = np.where(empty, prev.means if prev is not None else mu, mu)
        sigma = np.where(empty, config.sigma_min, sigma)
        alpha = np.where(empty, config.alpha_min, alpha)
    low_s = ~empty & (sigma < config.sigma_min)
    low_a = ~empty & (alpha < config.alpha_min)
    sigma = np.maximum(sigma, config.sigma_min)
    alpha = np.maximum(alpha, config.alpha_min)
    if events is not None:
        for k in range(K):
            if empty[k]:
                events.append(ClampEvent(iteration, k, "empty"))
            if low_s[k]:
                events.append(ClampEvent(iteration, k, "sigma"))
            if low_a[k]:
                events.append(ClampEvent(iteration, k, "alpha"))
    return MixtureParams(alpha / alpha.sum(), mu, sigma)


def run_em(
    data: WeightedSample,
    init: MixtureParams,
    config: EmConfig = SIMULATION_PROFILE,
    callback=None,
) -> FitResult:
    """Iterate E and M steps until the relative log-likelihood change is at
    most ``config.rel_tol`` or ``config.max_iters`` is reached.

    ``loglik_trace[0]`` is the likelihood of ``init``; entry ``t`` follows
    iteration ``t``. ``callback(t, resp, params)`` is called after each
    M-step if given.
    """
    config.check_k(init.K)
    params = init
    ll = log_likelihood(data, params)
    if not np.isfinite(ll):
        raise DivergenceError("initial parameters give a non-finite log-likelihood", init, 0)
    trace = [ll]
    events: list[ClampEvent] = []
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        step_events: list[ClampEvent] = []
        resp = e_step(data, params, step_events)
        for ev in step_events:
            ev.iteration = it
        new = m_step(data, resp, config, prev=params, events=step_events, iteration=it)
        if callback is not None:
            callback(it, resp, new)
        new_ll = log_likelihood(data, new)
        if not np.isfinite(new_ll):
            raise DivergenceError(f"log-likelihood became non-finite at iteration {it}", params, it)
        events.extend(step_events)
        params = new
        trace.append(new_ll)
        if abs(new_ll - ll) <= config.rel_tol * abs(ll):
            converged = True
            break
        ll = new_ll
    log.debug("EM stopped after %d iterations (converged=%s)", it, converged)
    return FitResult(params, np.array(trace), it, events, converged)
