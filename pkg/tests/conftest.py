"""Shared test oracles and randomized-instance helpers."""

from __future__ import annotations

import numpy as np

from pgmm import Box, L1Ball, L2Ball, Objective

SET_KINDS = ("box", "box_inf", "l1ball", "l2ball")


def l1_projection_oracle(x, radius):
    """Projection onto the l1 ball by support enumeration.

    Every candidate support induces a shrinkage threshold from the optimality
    system; the true projection appears among the resulting feasible
    candidates, so the distance-minimizing one is exact. Exponential in the
    dimension; use only for small vectors.
    """
    x = np.asarray(x, dtype=float)
    if np.abs(x).sum() <= radius:
        return x.copy()
    n = x.size
    best = None
    best_dist = np.inf
    for mask in range(1, 2 ** n):
        support = [i for i in range(n) if (mask >> i) & 1]
        theta = (sum(abs(x[i]) for i in support) - radius) / len(support)
        if theta < 0.0:
            continue
        y = np.zeros(n)
        valid = True
        for i in support:
            mag = abs(x[i]) - theta
            if mag <= 0.0:
                valid = False
                break
            y[i] = np.sign(x[i]) * mag
        if not valid:
            continue
        dist = float(np.linalg.norm(y - x))
        if dist < best_dist:
            best, best_dist = y, dist
    assert best is not None
    return best


def random_set(kind, dim, rng):
    if kind == "box":
        center = rng.uniform(-1.0, 1.0, dim)
        half = rng.uniform(0.2, 1.5, dim)
        return Box(center - half, center + half)
    if kind == "box_inf":
        lower = np.where(rng.random(dim) < 0.3, -np.inf, rng.uniform(-2.0, -0.1, dim))
        upper = np.where(rng.random(dim) < 0.3, np.inf, rng.uniform(0.1, 2.0, dim))
        return Box(lower, upper)
    if kind == "l1ball":
        return L1Ball(rng.uniform(0.5, 3.0), dim)
    if kind == "l2ball":
        return L2Ball(rng.uniform(-0.5, 0.5, dim), rng.uniform(0.5, 3.0))
    raise ValueError(kind)


def random_feasible_point(cset, rng, scale=2.0):
    return cset.project(rng.uniform(-scale, scale, cset.dim))


def random_quadratic(dim, rng, scale=2.0, definite=False):
    """Random symmetric quadratic objective f(x) = x.A.x/2 - b.x."""
    if definite:
        Q = np.linalg.qr(rng.standard_normal((dim, dim)))[0]
        eigs = rng.uniform(0.5, 4.0, dim)
        A = (Q * eigs) @ Q.T
        A = 0.5 * (A + A.T)
    else:
        M = rng.uniform(-scale, scale, (dim, dim))
        A = 0.5 * (M + M.T)
    b = rng.uniform(-scale, scale, dim)
    return Objective(
        fun=lambda x: float(0.5 * x @ (A @ x) - b @ x),
        grad=lambda x: A @ x - b,
        dim=dim,
    ), A, b
