"""Objective wrappers, stationarity measures, and finite-difference checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Vector = np.ndarray

#: Feasibility slack used when validating points handed to diagnostics.
FEAS_TOL = 1e-8


def as_vector(x, dim: int | None = None) -> Vector:
    """Coerce ``x`` to a finite float64 1-D array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


@dataclass(frozen=True)
class Objective:
    """Smooth objective with an explicit gradient callable.

    ``fun`` maps an n-vector to a float, ``grad`` to an n-vector. Both must
    accept exactly ``dim``-length inputs. Instances are immutable and safe to
    share across threads.
    """

    fun: Callable[[Vector], float]
    grad: Callable[[Vector], Vector]
    dim: int

    def value(self, x: Vector) -> float:
        return float(self.fun(x))

    def gradient(self, x: Vector) -> Vector:
        g = np.asarray(self.grad(x), dtype=float)
        if g.shape != (self.dim,):
            raise ValueError(f"gradient has shape {g.shape}, expected ({self.dim},)")
        return g


@dataclass(frozen=True)
class StationarityReport:
    """Stationarity measure at a given step parameter plus the unit-step
    sup-norm residual used by the stopping rule."""

    phi_eta: float
    inf_norm_residual: float
    eta_used: float


def _check_feasible(cset, x: Vector) -> None:
    if not cset.contains(x, tol=FEAS_TOL):
        raise ValueError("point is not feasible for the given set")


def stationarity_measure(obj: Objective, cset, x, eta: float) -> float:
    """Euclidean norm of the projected-gradient step with parameter ``eta``.

    Zero exactly at stationary points; positive elsewhere. Raises on an
    infeasible point or a nonpositive ``eta``.
    """
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    x = as_vector(x, obj.dim)
    _check_feasible(cset, x)
    step = cset.project(x - eta * obj.gradient(x)) - x
    return float(np.linalg.norm(step))


def inf_norm_residual(obj: Objective, cset, x) -> float:
    """Sup-norm of the unit-parameter projected-gradient step (stopping residual)."""
    x = as_vector(x, obj.dim)
    _check_feasible(cset, x)
    step = cset.project(x - obj.gradient(x)) - x
    return float(np.max(np.abs(step))) if step.size else 0.0


def stationarity_report(obj: Objective, cset, x, eta: float) -> StationarityReport:
    """Both stationarity diagnostics with a single gradient evaluation."""
    if not eta > 0.0:
        raise ValueError("eta must be positive")
    x = as_vector(x, obj.dim)
    _check_feasible(cset, x)
    g = obj.gradient(x)
    phi = float(np.linalg.norm(cset.project(x - eta * g) - x))
    unit = cset.project(x - g) - x
    res = float(np.max(np.abs(unit))) if unit.size else 0.0
    return StationarityReport(phi_eta=phi, inf_norm_residual=res, eta_used=float(eta))


def finite_difference_gradient(obj: Objective, x, h: float | None = None) -> Vector:
    """Central-difference gradient, componentwise.

    The default step is 1e-6 * max(1, ||x||_inf).
    """
    x = as_vector(x, obj.dim)
    if h is None:
        h = 1e-6 * max(1.0, float(np.max(np.abs(x))) if x.size else 0.0)
    elif not h > 0.0:
        raise ValueError("h must be positive")
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
    return g
