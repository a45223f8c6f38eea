"""Armijo backtracking with safeguarded quadratic interpolation, and the
nonmonotone (windowed-max) acceptance reference."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LineSearchParams:
    gamma: float = 1e-4
    delta: float = 0.5
    sigma_min: float = 0.1
    sigma_max: float = 0.9
    max_backtracks: int = 100

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.sigma_min <= self.sigma_max < 1.0:
            raise ValueError("need 0 < sigma_min <= sigma_max < 1")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be positive")


@dataclass(frozen=True)
class LineSearchOutcome:
    mu: float
    f_new: float
    backtracks: int
    f_evals: int


class LineSearchError(RuntimeError):
    """Backtracking exhausted without meeting the acceptance condition."""


def gll_reference(history, window: int) -> float:
    """Max objective value over the last ``window`` entries of ``history``."""
    if len(history) == 0:
        raise ValueError("objective history is empty")
    if window < 1:
        raise ValueError("window must be positive")
    return max(list(history)[-window:])


def armijo_search(
    obj,
    x,
    d,
    f_ref: float,
    slope: float,
    params: LineSearchParams,
    mu_init: float = 1.0,
    f_curr: float | None = None,
) -> LineSearchOutcome:
    """First step of the backtracking sequence satisfying
    f(x + mu*d) <= f_ref + gamma*mu*slope.

    ``slope`` is the directional derivative at x (must be negative).
    ``f_ref`` is f(x) for the monotone search or the windowed max for the
    nonmonotone one; ``f_curr`` is f(x) itself and feeds the curvature
    estimate (defaults to ``f_ref``). Each backtrack sets the trial to the
    minimizer of the one-dimensional quadratic through (0, f_curr), slope,
    and the failed trial, clamped to [sigma_min*mu, sigma_max*mu]; if that
    quadratic step is unusable the trial shrinks by delta instead.
    """
    if not slope < 0.0:
        raise ValueError("directional derivative must be negative")
    if not mu_init > 0.0:
        raise ValueError("mu_init must be positive")
    f0 = f_ref if f_curr is None else float(f_curr)
    mu = float(mu_init)
    f_trial = obj.value(x + mu * d)
    evals = 1
    backtracks = 0
    # NaN-safe: a non-finite trial value never satisfies the condition.
    while not f_trial <= f_ref + params.gamma * mu * slope:
        if backtracks >= params.max_backtracks:
            raise LineSearchError(
                f"no acceptable step after {backtracks} backtracks (mu={mu:.3e})"
            )
        denom = 2.0 * (f_trial - f0 - mu * slope)
        mu_q = -slope * mu * mu / denom if math.isfinite(denom) and denom > 0.0 else math.nan
        if math.isfinite(mu_q) and mu_q > 0.0:
            mu = min(max(mu_q, params.sigma_min * mu), params.sigma_max * mu)
        else:
            mu = params.delta * mu
        f_trial = obj.value(x + mu * d)
        evals += 1
        backtracks += 1
    return LineSearchOutcome(mu=mu, f_new=float(f_trial), backtracks=backtracks, f_evals=evals)
