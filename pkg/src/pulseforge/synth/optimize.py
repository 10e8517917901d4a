"""Derivative-free local search shared by the synthesizers."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    """Nelder-Mead settings.

    ``xtol`` applies to coordinates scaled by the seed, so it is a relative
    simplex diameter.  Restarts perturb the seed by ``restart_spread``
    (relative) using ``seed`` for the RNG.
    """

    max_evals: int = 2000
    xtol: float = 1e-8
    ftol: float = 1e-15
    initial_step: float = 0.02
    restarts: int = 3
    restart_spread: float = 0.05
    good_enough: float = 1e-12
    seed: int = 0
    steps: int = 2**14


@dataclass(frozen=True)
class SearchResult:
    x: np.ndarray
    fun: float
    evaluations: int
    restarts: int


def nelder_mead(fun: Callable[[np.ndarray], float], x0, scale, config: OptimizerConfig) -> SearchResult:
    """Minimize ``fun`` near ``x0`` working in coordinates ``x / scale``."""
    x0 = np.asarray(x0, dtype=float)
    scale = np.asarray(scale, dtype=float)
    rng = np.random.default_rng(config.seed)
    f = lambda y: float(fun(y * scale))  # noqa: E731

    best_y, best_f = x0 / scale, f(x0 / scale)
    evals, restarts = 1, 0
    start = best_y.copy()
    for attempt in range(config.restarts + 1):
        n = start.size
        simplex = np.vstack([start, start + config.initial_step * np.eye(n) * np.where(start == 0, 1.0, np.abs(start))])
        res = minimize(
            f,
            start,
            method="Nelder-Mead",
            options=dict(maxfev=config.max_evals, xatol=config.xtol, fatol=config.ftol, initial_simplex=simplex),
        )
        evals += int(res.nfev)
        if res.fun < best_f:
            best_y, best_f = np.asarray(res.x), float(res.fun)
        log.debug("nelder-mead attempt %d: f=%.3e after %d evals", attempt, res.fun, res.nfev)
        if best_f <= config.good_enough or attempt == config.restarts:
            break
        restarts += 1
        start = best_y * (1 + config.restart_spread * rng.standard_normal(n))
    return SearchResult(best_y * scale, best_f, evals, restarts)
