"""Driver loop shared by the momentum method and the spectral
projected-gradient baseline: stopping rules, counters, iteration traces."""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import Objective, as_vector
from .direction import compute_direction, spectral_eta
from .linesearch import LineSearchError, LineSearchParams, armijo_search, gll_reference

PGMM = "pgmm"
SPG = "spg"

CONVERGED = "converged"
MAX_ITERS = "maxiters"
SMALL_STEP = "smallstep"
LINE_SEARCH_FAIL = "linesearchfail"

_FEAS_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """All algorithmic parameters with their default experimental values."""

    mode: str = PGMM
    gamma: float = 1e-4
    delta: float = 0.5
    sigma_min: float = 0.1
    sigma_max: float = 0.9
    eta_min: float = 1e-10
    eta_max: float = 1e10
    c1_bar: float = 1e-6
    c2_bar: float = 1e-6
    nu1: float = 1e-12
    nu2: float = 1e12
    tol_residual: float = 1e-5
    tol_step_sq: float = 1e-15
    max_iters: int = 100_000
    gll_window: int = 10
    max_backtracks: int = 100
    check_eta: Optional[float] = None  # None: use the iteration's own eta

    def __post_init__(self):
        if self.mode not in (PGMM, SPG):
            raise ValueError(f"mode must be {PGMM!r} or {SPG!r}")
        if not 0.0 < self.eta_min <= self.eta_max:
            raise ValueError("need 0 < eta_min <= eta_max")
        if not (self.c1_bar > 0.0 and self.c2_bar > 0.0):
            raise ValueError("c1_bar and c2_bar must be positive")
        if not 0.0 < self.nu1 <= self.nu2:
            raise ValueError("need 0 < nu1 <= nu2")
        if not self.eta_max < 2.0 / self.nu1:
            raise ValueError("eta_max must be smaller than 2/nu1")
        if not self.tol_residual > 0.0:
            raise ValueError("tol_residual must be positive")
        if not self.tol_step_sq > 0.0:
            raise ValueError("tol_step_sq must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.gll_window < 1:
            raise ValueError("gll_window must be positive")
        if self.check_eta is not None and not self.check_eta > 0.0:
            raise ValueError("check_eta must be positive when given")
        # Range checks for the line-search constants live in LineSearchParams.
        self.line_search_params()

    def line_search_params(self) -> LineSearchParams:
        return LineSearchParams(
            gamma=self.gamma,
            delta=self.delta,
            sigma_min=self.sigma_min,
            sigma_max=self.sigma_max,
            max_backtracks=self.max_backtracks,
        )


@dataclass(frozen=True)
class IterationRow:
    """Per-iteration trace entry.

    ``fallback`` marks a plain projected-gradient step where a momentum step
    was expected (first iteration, vanished displacement, or the degenerate
    repaired subproblem). ``phi1_sq``/``phi_etak_sq`` are the squared
    stationarity measures at step parameter 1 and at this iteration's eta.
    """

    k: int
    f: float
    f_next: float
    residual_inf: float
    phi1_sq: float
    phi_etak_sq: float
    eta: float
    mu: float
    alpha: float
    beta: float
    grad_dot_d: float
    d_norm_sq: float
    backtracks: int
    fallback: bool
    repaired: bool


TRACE_FIELDS = [
    "k", "f", "f_next", "residual_inf", "phi1_sq", "phi_etak_sq", "eta", "mu",
    "alpha", "beta", "grad_dot_d", "d_norm_sq", "backtracks", "fallback", "repaired",
]


@dataclass
class _Counters:
    f_evals: int = 0
    g_evals: int = 0
    projections: int = 0


class _CountingSet:
    """Projection-counting view of a constraint set."""

    def __init__(self, inner, counters: _Counters):
        self._inner = inner
        self._counters = counters
        self.dim = inner.dim

    def project(self, x):
        self._counters.projections += 1
        return self._inner.project(x)

    def contains(self, x, tol=0.0):
        return self._inner.contains(x, tol)


def _counting_objective(obj: Objective, counters: _Counters) -> Objective:
    def fun(x):
        counters.f_evals += 1
        return obj.value(x)

    def grad(x):
        counters.g_evals += 1
        return obj.gradient(x)

    return Objective(fun=fun, grad=grad, dim=obj.dim)


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one solver run: final point, termination reason, counters,
    and (optionally) the per-iteration trace."""

    termination: str
    x_final: np.ndarray
    f_final: float
    residual_final: float
    iterations: int
    f_evals: int
    g_evals: int
    projections: int
    wall_time: float
    config: SolverConfig
    trace: Optional[list] = None


def solve(obj: Objective, cset, x0, config: SolverConfig | None = None, *,
          keep_trace: bool = True, project_x0: bool = False) -> RunRecord:
    """Run the configured method from a feasible starting point.

    Stops on the first of: sup-norm residual at or below ``tol_residual``
    (converged); ``max_iters`` completed iterations; squared step length
    below ``tol_step_sq``; line-search failure. A small-step exit whose final
    residual nevertheless meets the tolerance is reported as converged.

    The first iteration uses the reciprocal of the initial residual as step
    parameter and takes the plain projected-gradient direction; later
    iterations use the spectral parameter. The momentum mode runs a monotone
    Armijo search, the baseline a nonmonotone one over the last
    ``gll_window`` objective values.

    An infeasible ``x0`` raises unless ``project_x0`` is set, in which case
    it is projected once (with a warning). One run is single-threaded;
    concurrent runs over distinct records are safe.
    """
    if config is None:
        config = SolverConfig()
    x0 = as_vector(x0, obj.dim)
    if cset.dim != obj.dim:
        raise ValueError("constraint set and objective dimensions differ")
    if not cset.contains(x0, tol=_FEAS_TOL):
        if project_x0:
            warnings.warn("starting point is infeasible; projecting it onto the set")
            x0 = cset.project(x0)
        else:
            raise ValueError("x0 is infeasible (pass project_x0=True to project it)")

    counters = _Counters()
    cobj = _counting_objective(obj, counters)
    cs = _CountingSet(cset, counters)
    ls_params = config.line_search_params()
    monotone = config.mode == PGMM

    t_start = time.perf_counter()
    x = x0
    f = cobj.value(x)
    if not math.isfinite(f):
        raise ValueError("objective is not finite at x0")
    g = cobj.gradient(x)
    x_prev = x  # momentum memory; the first displacement is zero
    g_prev = g
    f_hist = [f]
    trace = [] if keep_trace else None
    iterations = 0
    termination = MAX_ITERS
    res_inf = math.inf

    for k in range(config.max_iters + 1):
        step_vec = cs.project(x - g) - x
        res_inf = float(np.max(np.abs(step_vec))) if step_vec.size else 0.0
        phi1_sq = float(step_vec @ step_vec)
        if res_inf <= config.tol_residual:
            termination = CONVERGED
            break
        if k == config.max_iters:
            termination = MAX_ITERS
            break

        if k == 0:
            eta = min(config.eta_max, max(config.eta_min, 1.0 / res_inf))
        else:
            eta = spectral_eta(x - x_prev, g - g_prev, config.eta_min, config.eta_max)

        if config.mode == SPG or k == 0:
            d = cs.project(x - eta * g) - x
            phi_etak_sq = float(d @ d)
            alpha, beta = 1.0, 0.0
            fallback = config.mode == PGMM  # momentum bypassed on iteration 0
            repaired = False
        else:
            res = compute_direction(cobj, cs, x, x_prev, g, eta, config,
                                    f_x=f, phi1_sq=phi1_sq)
            d = res.d
            alpha, beta = res.alpha, res.beta
            fallback = res.used_fallback
            repaired = res.matrix_repaired
            phi_etak_sq = res.phi_etak_sq

        slope = float(g @ d)
        if not slope < 0.0:
            # Numerically degenerate direction; the search is not well-posed.
            termination = LINE_SEARCH_FAIL
            break
        f_ref = f if monotone else gll_reference(f_hist, config.gll_window)
        try:
            ls = armijo_search(cobj, x, d, f_ref, slope, ls_params, mu_init=1.0, f_curr=f)
        except LineSearchError:
            termination = LINE_SEARCH_FAIL
            break

        d_norm_sq = float(d @ d)
        x_new = x + ls.mu * d
        if keep_trace:
            trace.append(IterationRow(
                k=k, f=f, f_next=ls.f_new, residual_inf=res_inf, phi1_sq=phi1_sq,
                phi_etak_sq=phi_etak_sq, eta=eta, mu=ls.mu, alpha=alpha, beta=beta,
                grad_dot_d=slope, d_norm_sq=d_norm_sq, backtracks=ls.backtracks,
                fallback=fallback, repaired=repaired,
            ))
        x_prev, g_prev = x, g
        x, f = x_new, ls.f_new
        g = cobj.gradient(x)
        f_hist.append(f)
        iterations += 1

        if ls.mu * ls.mu * d_norm_sq < config.tol_step_sq:
            step_vec = cs.project(x - g) - x
            res_inf = float(np.max(np.abs(step_vec))) if step_vec.size else 0.0
            termination = CONVERGED if res_inf <= config.tol_residual else SMALL_STEP
            break

    wall = time.perf_counter() - t_start
    return RunRecord(
        termination=termination, x_final=x, f_final=f, residual_final=res_inf,
        iterations=iterations, f_evals=counters.f_evals, g_evals=counters.g_evals,
        projections=counters.projections, wall_time=wall, config=config, trace=trace,
    )


def check_assumption2_trace(record: RunRecord, constants: tuple[float, float],
                            eta: float | None = 1.0) -> bool:
    """Re-assert the gradient-relatedness and per-iteration decrease
    inequalities over a stored trace.

    For every traced iteration whose residual exceeded the stopping tolerance
    this checks, with constants (c1, c2)::

        grad.d <= -c1 ||d||^2
        grad.d <= -c2 phi^2
        f_k - f_{k+1} >= gamma * mu * |grad.d|

    ``eta=1.0`` (default) evaluates phi from the unit-parameter values stored
    at every iteration; ``eta=None`` uses each iteration's own step
    parameter. Other eta values are not retained in traces.
    """
    if record.trace is None:
        raise ValueError("run record has no stored trace")
    if eta is not None and eta != 1.0:
        raise ValueError("traces record stationarity at eta=1 and the per-iteration eta only")
    c1, c2 = constants
    gamma = record.config.gamma
    tol = record.config.tol_residual
    for row in record.trace:
        if row.residual_inf <= tol:
            continue
        phi_sq = row.phi1_sq if eta == 1.0 else row.phi_etak_sq
        if not row.grad_dot_d <= -c1 * row.d_norm_sq + 1e-10 * max(1.0, row.d_norm_sq):
            return False
        if not row.grad_dot_d <= -c2 * phi_sq + 1e-10 * max(1.0, phi_sq):
            return False
        decrease = row.f - row.f_next
        if not decrease >= gamma * row.mu * abs(row.grad_dot_d) - 1e-12 * max(1.0, abs(row.f)):
            return False
    return True


def spg_config(**overrides) -> SolverConfig:
    """Convenience: the default configuration with the baseline mode."""
    return replace(SolverConfig(mode=SPG), **overrides)
