"""Exact Euclidean projection operators for boxes and norm balls.

All sets are immutable after construction; ``project``/``contains`` are pure
functions and thread-safe.
"""

from __future__ import annotations

import numpy as np

from .core import as_vector


class Box:
    """Axis-aligned box {x : l <= x <= u}; bound entries may be infinite."""

    def __init__(self, lower, upper):
        l = np.array(lower, dtype=float)
        u = np.array(upper, dtype=float)
        if l.ndim != 1 or u.ndim != 1 or l.size != u.size:
            raise ValueError("bounds must be 1-D vectors of equal length")
        if np.any(np.isnan(l)) or np.any(np.isnan(u)):
            raise ValueError("bounds must not contain NaN")
        if np.any(l > u):
            raise ValueError("lower bound exceeds upper bound somewhere")
        self.lower = l
        self.upper = u
        self.dim = int(l.size)

    def project(self, x):
        x = as_vector(x, self.dim)
        return np.minimum(self.upper, np.maximum(self.lower, x))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def __repr__(self):
        return f"Box(dim={self.dim})"


class L1Ball:
    """The set {x : ||x||_1 <= radius}."""

    def __init__(self, radius: float, dim: int):
        if not radius > 0.0 or not np.isfinite(radius):
            raise ValueError("radius must be positive and finite")
        if dim < 1:
            raise ValueError("dim must be positive")
        self.radius = float(radius)
        self.dim = int(dim)

    def project(self, x):
        x = as_vector(x, self.dim)
        a = np.abs(x)
        if a.sum() <= self.radius:
            return x.copy()
        # Exact sort-based threshold, O(n log n): find the largest k with
        # u_k > (sum of the k largest magnitudes - radius) / k, then shrink.
        u = np.sort(a)[::-1]
        css = np.cumsum(u) - self.radius
        k = np.arange(1, u.size + 1)
        rho = np.nonzero(u * k > css)[0][-1]
        theta = css[rho] / (rho + 1.0)
        return np.sign(x) * np.maximum(a - theta, 0.0)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.abs(x).sum() <= self.radius + tol)

    def __repr__(self):
        return f"L1Ball(radius={self.radius}, dim={self.dim})"


class L2Ball:
    """The set {x : ||x - center||_2 <= radius}."""

    def __init__(self, center, radius: float):
        c = as_vector(center)
        if not radius > 0.0 or not np.isfinite(radius):
            raise ValueError("radius must be positive and finite")
        self.center = c
        self.radius = float(radius)
        self.dim = int(c.size)

    def project(self, x):
        x = as_vector(x, self.dim)
        r = x - self.center
        dist = float(np.linalg.norm(r))
        if dist <= self.radius:
            return x.copy()
        return self.center + (self.radius / dist) * r

    def contains(self, x, tol: float = 0.0) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def __repr__(self):
        return f"L2Ball(radius={self.radius}, dim={self.dim})"


ConstraintSet = Box | L1Ball | L2Ball


def from_config(spec: dict, dim: int | None = None) -> ConstraintSet:
    """Build a constraint set from its JSON-style description.

    Recognized forms::

        {"type": "box", "l": [...], "u": [...]}
        {"type": "l1ball", "radius": R}          # needs dim from context
        {"type": "l2ball", "center": [...], "radius": R}
    """
    try:
        kind = spec["type"]
    except (TypeError, KeyError):
        raise ValueError("set config must be a mapping with a 'type' key") from None
    if kind == "box":
        return Box(spec["l"], spec["u"])
    if kind == "l1ball":
        d = spec.get("dim", dim)
        if d is None:
            raise ValueError("l1ball config needs an explicit 'dim' or a context dimension")
        return L1Ball(spec["radius"], dim=int(d))
    if kind == "l2ball":
        return L2Ball(spec["center"], spec["radius"])
    raise ValueError(f"unknown set type {kind!r}")
