"""Closed-form global minimization of a bivariate quadratic over the simplex
{(a, b) : a >= 0, b >= 0, a + b <= 1}."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class QuadCoeffs:
    """Coefficients of q(a, b) = (t a^2 + 2 u a b + w b^2) / 2 + y a + h b."""

    t: float
    u: float
    w: float
    y: float
    h: float

    def __post_init__(self):
        for name in ("t", "u", "w", "y", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} is not finite")


def evaluate_quad2d(c: QuadCoeffs, alpha: float, beta: float) -> float:
    """Value of the quadratic at (alpha, beta)."""
    return (
        0.5 * (c.t * alpha * alpha + 2.0 * c.u * alpha * beta + c.w * beta * beta)
        + c.y * alpha
        + c.h * beta
    )


def minimize_on_simplex(c: QuadCoeffs) -> tuple[float, float, float]:
    """Global minimizer of the quadratic over the simplex, with its value.

    If the curvature matrix is positive definite and the unconstrained
    stationary point is feasible, that point is returned directly. Otherwise
    the boundary is scanned: the three vertices, then the interior of each
    edge (each a one-dimensional quadratic). Candidates are compared with
    strict improvement, so the earliest one in scan order wins ties.

    Returns (alpha, beta, value).
    """
    det = c.t * c.w - c.u * c.u
    if c.t > 0.0 and det > 0.0:
        a = (-c.w * c.y + c.u * c.h) / det
        b = (c.u * c.y - c.t * c.h) / det
        if a >= 0.0 and b >= 0.0 and a + b <= 1.0:
            return a, b, evaluate_quad2d(c, a, b)

    # Vertices; the origin is the incumbent with value 0.
    best_a, best_b, best = 0.0, 0.0, 0.0
    v = 0.5 * c.t + c.y
    if v < best:
        best_a, best_b, best = 1.0, 0.0, v
    v = 0.5 * c.w + c.h
    if v < best:
        best_a, best_b, best = 0.0, 1.0, v

    # Edge b = 0: minimize t a^2 / 2 + y a over 0 < a < 1.
    if c.t > 0.0:
        a = -c.y / c.t
        if 0.0 < a < 1.0:
            v = -c.y * c.y / (2.0 * c.t)
            if v < best:
                best_a, best_b, best = a, 0.0, v

    # Edge a = 0: minimize w b^2 / 2 + h b over 0 < b < 1.
    if c.w > 0.0:
        b = -c.h / c.w
        if 0.0 < b < 1.0:
            v = -c.h * c.h / (2.0 * c.w)
            if v < best:
                best_a, best_b, best = 0.0, b, v

    # Edge a + b = 1: a one-dimensional quadratic in a with curvature
    # t - 2u + w; a nonpositive curvature leaves only the endpoints, which
    # the vertex scan already covered.
    den = c.t - 2.0 * c.u + c.w
    if den > 0.0:
        a = -(c.u - c.w + c.y - c.h) / den
        if 0.0 < a < 1.0:
            v = evaluate_quad2d(c, a, 1.0 - a)
            if v < best:
                best_a, best_b, best = a, 1.0 - a, v

    return best_a, best_b, best
