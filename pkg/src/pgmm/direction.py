"""Construction of the momentum search direction d = alpha*d_hat + beta*s_hat.

d_hat is the projected-gradient direction, s_hat the projection-corrected
previous displacement. The combination weights come from a closed-form 2-D
quadratic program built on an interpolated curvature model; a clamping repair
restores a gradient-related direction when the raw model fails the safeguard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .qp2d import QuadCoeffs, minimize_on_simplex

if TYPE_CHECKING:  # pragma: no cover
    from .solver import SolverConfig

#: Relative threshold below which the momentum displacement counts as zero.
S_HAT_RTOL = 1e-14


@dataclass(frozen=True)
class BaseDirections:
    d_hat: np.ndarray  # P[x - eta*grad] - x
    s_hat: np.ndarray  # P[x + (x - x_prev)] - x
    eta: float


@dataclass(frozen=True)
class QuadModel2D:
    """Symmetric 2x2 curvature model plus the linear slopes along each base
    direction."""

    h11: float
    h12: float
    h22: float
    lin_d: float  # grad . d_hat
    lin_s: float  # grad . s_hat


@dataclass(frozen=True)
class DirectionResult:
    d: np.ndarray
    alpha: float
    beta: float
    used_fallback: bool  # plain projected-gradient step taken instead
    matrix_repaired: bool
    c1_effective: float
    c2_effective: float
    phi_etak_sq: float  # squared norm of d_hat, i.e. the stationarity
    # measure at this iteration's step parameter


def spectral_eta(s, y, eta_min: float, eta_max: float) -> float:
    """Inverse Rayleigh quotient s.s / s.y clamped to [eta_min, eta_max].

    A nonpositive curvature pairing (including s = 0) yields eta_max.
    """
    if not 0.0 < eta_min <= eta_max:
        raise ValueError("need 0 < eta_min <= eta_max")
    sty = float(np.dot(s, y))
    if sty <= 0.0:
        return eta_max
    return min(eta_max, max(eta_min, float(np.dot(s, s)) / sty))


def base_directions(obj, cset, x, x_prev, grad, eta: float) -> BaseDirections:
    """Projected-gradient and momentum base directions at x (two projections)."""
    d_hat = cset.project(x - eta * grad) - x
    s_hat = cset.project(x + (x - x_prev)) - x
    return BaseDirections(d_hat=d_hat, s_hat=s_hat, eta=float(eta))


def interpolate_model(
    f0: float, lin_d: float, lin_s: float, f_half_s: float, f_half_d: float, f_half_ds: float
) -> QuadModel2D:
    """Fit the 2x2 curvature matrix from objective values at the points
    (alpha, beta) = (0, 1/2), (1/2, 0) and (1/2, 1/2).

    The 3x3 interpolation system has the closed-form solution below; it is
    exact whenever the objective is quadratic along span(d_hat, s_hat).
    """
    for v in (f0, lin_d, lin_s, f_half_s, f_half_d, f_half_ds):
        if not math.isfinite(v):
            raise ValueError("interpolation requires finite function values")
    h22 = 8.0 * (f_half_s - f0 - 0.5 * lin_s)
    h11 = 8.0 * (f_half_d - f0 - 0.5 * lin_d)
    h12 = 4.0 * (f_half_ds - f0 - 0.5 * (lin_d + lin_s)) - 0.5 * (h11 + h22)
    return QuadModel2D(h11=h11, h12=h12, h22=h22, lin_d=lin_d, lin_s=lin_s)


def gradient_related_check(
    grad_dot_d: float,
    d_norm_sq: float,
    phi_eta_sq: float,
    c1_bar: float,
    c2_bar: float,
) -> bool:
    """True iff the direction passes both sufficient-descent tests."""
    return grad_dot_d <= -c1_bar * d_norm_sq and grad_dot_d <= -c2_bar * phi_eta_sq


def repair_matrix(
    model: QuadModel2D, d_hat_norm: float, s_hat_norm: float, nu1: float, nu2: float
) -> QuadModel2D:
    """Clamp the curvature model so that its norm-scaled version has all
    eigenvalues >= nu1 and a (1,1) entry <= nu2.

    Both base-direction norms must be positive; the caller takes the
    no-momentum fallback before reaching this point otherwise.
    """
    if not (d_hat_norm > 0.0 and s_hat_norm > 0.0):
        raise ValueError("repair needs nonzero base directions")
    if not 0.0 < nu1 <= nu2:
        raise ValueError("need 0 < nu1 <= nu2")
    dsq = d_hat_norm * d_hat_norm
    ssq = s_hat_norm * s_hat_norm
    h11 = max(min(model.h11, nu2 * dsq), nu1 * dsq)
    h22 = max(model.h22, nu1 * ssq)
    r = math.sqrt(max(h11 - nu1 * dsq, 0.0) * max(h22 - nu1 * ssq, 0.0))
    h12 = max(min(model.h12, r), -r)
    return QuadModel2D(h11=h11, h12=h12, h22=h22, lin_d=model.lin_d, lin_s=model.lin_s)


def effective_constants(
    c1_bar: float, c2_bar: float, nu1: float, nu2: float, eta_min: float, eta_max: float
) -> tuple[float, float]:
    """Sequence-level gradient-relatedness constants covering all three
    direction branches (checked, repaired, no-momentum)."""
    c1 = min(c1_bar, 0.25 * nu1, 1.0 / eta_max)
    c2 = min(
        c2_bar,
        (nu1 / nu2) * (eta_min / eta_max) ** 2 * (1.0 / eta_max - 0.5 * nu1),
        1.0 / eta_max,
    )
    return c1, c2


def compute_direction(
    obj,
    cset,
    x,
    x_prev,
    grad,
    eta: float,
    config: "SolverConfig",
    *,
    f_x: float | None = None,
    phi1_sq: float | None = None,
) -> DirectionResult:
    """Assemble the search direction for one iteration (expects k >= 1).

    When the momentum displacement is (numerically) zero the plain
    projected-gradient direction is returned. Otherwise the curvature model
    is interpolated at the cost of exactly three extra function evaluations,
    the 2-D subproblem is solved, and the result is kept if it passes the
    gradient-related check; on failure the model is repaired and the
    subproblem re-solved, accepting that direction unconditionally.

    ``f_x`` is the already-known objective value at x; ``phi1_sq`` the squared
    unit-parameter stationarity measure, reused when the check is configured
    to run at eta = 1.
    """
    bd = base_directions(obj, cset, x, x_prev, grad, eta)
    c1_eff, c2_eff = effective_constants(
        config.c1_bar, config.c2_bar, config.nu1, config.nu2, config.eta_min, config.eta_max
    )
    d_hat_sq = float(bd.d_hat @ bd.d_hat)
    s_norm = float(np.linalg.norm(bd.s_hat))
    if s_norm <= S_HAT_RTOL * max(1.0, float(np.linalg.norm(x))):
        return DirectionResult(
            d=bd.d_hat, alpha=1.0, beta=0.0, used_fallback=True, matrix_repaired=False,
            c1_effective=c1_eff, c2_effective=c2_eff, phi_etak_sq=d_hat_sq,
        )

    f0 = obj.value(x) if f_x is None else float(f_x)
    lin_d = float(grad @ bd.d_hat)
    lin_s = float(grad @ bd.s_hat)
    f1 = obj.value(x + 0.5 * bd.s_hat)
    f2 = obj.value(x + 0.5 * bd.d_hat)
    f3 = obj.value(x + 0.5 * (bd.d_hat + bd.s_hat))
    model = interpolate_model(f0, lin_d, lin_s, f1, f2, f3)

    alpha, beta, _ = minimize_on_simplex(
        QuadCoeffs(model.h11, model.h12, model.h22, lin_d, lin_s)
    )
    d = alpha * bd.d_hat + beta * bd.s_hat
    grad_dot_d = float(grad @ d)

    if config.check_eta is None:
        phi_sq = d_hat_sq
    elif config.check_eta == 1.0 and phi1_sq is not None:
        phi_sq = phi1_sq
    else:
        step = cset.project(x - config.check_eta * grad) - x
        phi_sq = float(step @ step)

    if gradient_related_check(grad_dot_d, float(d @ d), phi_sq, config.c1_bar, config.c2_bar):
        return DirectionResult(
            d=d, alpha=alpha, beta=beta, used_fallback=False, matrix_repaired=False,
            c1_effective=c1_eff, c2_effective=c2_eff, phi_etak_sq=d_hat_sq,
        )

    fixed = repair_matrix(model, math.sqrt(d_hat_sq), s_norm, config.nu1, config.nu2)
    alpha, beta, _ = minimize_on_simplex(
        QuadCoeffs(fixed.h11, fixed.h12, fixed.h22, lin_d, lin_s)
    )
    if alpha == 0.0 and beta == 0.0:
        # The repaired subproblem keeps the origin only when the projected
        # gradient has vanished; fall back so the line search stays well-posed.
        return DirectionResult(
            d=bd.d_hat, alpha=1.0, beta=0.0, used_fallback=True, matrix_repaired=True,
            c1_effective=c1_eff, c2_effective=c2_eff, phi_etak_sq=d_hat_sq,
        )
    d = alpha * bd.d_hat + beta * bd.s_hat
    return DirectionResult(
        d=d, alpha=alpha, beta=beta, used_fallback=False, matrix_repaired=True,
        c1_effective=c1_eff, c2_effective=c2_eff, phi_etak_sq=d_hat_sq,
    )
