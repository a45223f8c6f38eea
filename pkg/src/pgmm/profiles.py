"""Performance profiles: cumulative distributions of per-problem metric
ratios to the best solver."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

PROFILE_HEADER = ["solver", "tau", "rho"]


@dataclass(frozen=True)
class ProfileTable:
    """Ratio matrix and profile curves for a solver comparison.

    ``ratios[s, p]`` is solver s's metric on problem p divided by the best
    metric on p; infinity marks a failed run. ``rho[s, i]`` is the fraction
    of problems solver s handled within ratio ``taus[i]``.
    """

    solvers: tuple
    problems: tuple
    ratios: np.ndarray
    taus: np.ndarray
    rho: np.ndarray

    def curve(self, solver) -> list[tuple[float, float]]:
        s = self.solvers.index(solver)
        return list(zip(self.taus.tolist(), self.rho[s].tolist()))

    @property
    def curves(self) -> dict:
        return {name: self.curve(name) for name in self.solvers}


def performance_profile(metrics, solvers, problems) -> ProfileTable:
    """Build profile curves from a (n_solvers, n_problems) metric matrix.

    Metric entries must be positive for successful runs; NaN or infinity
    marks a failure. Problems on which every solver failed are dropped with
    a warning. Curves are sampled at every distinct finite ratio, so they are
    exact step functions.
    """
    m = np.array(metrics, dtype=float)
    solvers = list(solvers)
    problems = list(problems)
    if m.ndim != 2 or m.shape != (len(solvers), len(problems)):
        raise ValueError("metric matrix shape does not match solver/problem lists")
    if len(solvers) < 1 or len(problems) < 1:
        raise ValueError("need at least one solver and one problem")
    finite = np.isfinite(m)
    if np.any(m[finite] <= 0.0):
        raise ValueError("metrics of successful runs must be positive")
    m = np.where(finite, m, np.inf)

    solved_somewhere = np.isfinite(m).any(axis=0)
    if not solved_somewhere.all():
        dropped = [problems[j] for j in np.nonzero(~solved_somewhere)[0]]
        warnings.warn(f"dropping problems with no successful run: {dropped}")
        m = m[:, solved_somewhere]
        problems = [p for p, keep in zip(problems, solved_somewhere) if keep]
    if m.shape[1] == 0:
        raise ValueError("no problem has a successful run")

    best = m.min(axis=0)
    ratios = m / best
    taus = np.unique(ratios[np.isfinite(ratios)])
    rho = np.empty((len(solvers), taus.size))
    for s in range(len(solvers)):
        rho[s] = [float(np.mean(ratios[s] <= t)) for t in taus]
    return ProfileTable(
        solvers=tuple(solvers), problems=tuple(problems),
        ratios=ratios, taus=taus, rho=rho,
    )


def write_profile_csv(table: ProfileTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_HEADER)
        for s, name in enumerate(table.solvers):
            for tau, rho in zip(table.taus, table.rho[s]):
                writer.writerow([name, repr(float(tau)), repr(float(rho))])
