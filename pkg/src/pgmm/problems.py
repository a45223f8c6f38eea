"""Benchmark problem instances: l1-ball-constrained logistic regression on
sparse datasets, plus seeded synthetic box-constrained test functions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .core import Objective, as_vector
from .sets import Box, ConstraintSet, L1Ball
from .solver import CONVERGED, PGMM, SolverConfig, solve


class DatasetFormatError(ValueError):
    """Raised on malformed sparse-dataset input."""


@dataclass
class SparseDataset:
    """Binary classification data in sparse row form.

    ``rows[i]`` is a list of (column, value) pairs with 0-based, strictly
    increasing columns; the last column (index ``n_features - 1``) is the
    constant intercept appended after the raw features. Labels are exactly
    +-1.
    """

    rows: list
    labels: np.ndarray
    n_features: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=float)
        if self.labels.ndim != 1 or len(self.rows) != self.labels.size:
            raise DatasetFormatError("rows and labels disagree in length")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise DatasetFormatError("labels must be exactly +-1")

    @property
    def n_samples(self) -> int:
        return len(self.rows)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """CSR view of the data (including the intercept column)."""
        data, indices, indptr = [], [], [0]
        for row in self.rows:
            for col, val in row:
                indices.append(col)
                data.append(val)
            indptr.append(len(indices))
        return sp.csr_matrix(
            (np.asarray(data, dtype=float), indices, indptr),
            shape=(self.n_samples, self.n_features),
        )


def parse_sparse_dataset(lines, n_raw_features: int | None = None) -> SparseDataset:
    """Parse ``label index:value ...`` lines into a dataset.

    Indices in the source are 1-based and must be strictly increasing within
    a line. Labels may be +-1 or 0/1 (0 maps to -1). A constant intercept
    column is appended after the raw features, whose count defaults to the
    largest index seen but can be declared via ``n_raw_features``.

    Raises DatasetFormatError with the offending line number on bad input.
    """
    rows, labels = [], []
    max_col = -1
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            raw_label = float(parts[0])
        except ValueError:
            raise DatasetFormatError(f"line {lineno}: bad label {parts[0]!r}") from None
        if raw_label == 1.0:
            label = 1.0
        elif raw_label in (-1.0, 0.0):
            label = -1.0
        else:
            raise DatasetFormatError(
                f"line {lineno}: label must be +-1 or 0/1, got {parts[0]!r}"
            )
        row = []
        prev = -1
        for tok in parts[1:]:
            idx_str, _, val_str = tok.partition(":")
            try:
                idx = int(idx_str)
                val = float(val_str)
            except ValueError:
                raise DatasetFormatError(
                    f"line {lineno}: malformed feature entry {tok!r}"
                ) from None
            if idx < 1:
                raise DatasetFormatError(f"line {lineno}: indices are 1-based, got {idx}")
            col = idx - 1
            if col <= prev:
                raise DatasetFormatError(
                    f"line {lineno}: feature indices must be strictly increasing"
                )
            prev = col
            row.append((col, val))
        max_col = max(max_col, prev)
        rows.append(row)
        labels.append(label)
    if not rows:
        raise DatasetFormatError("dataset is empty")
    n_raw = max_col + 1 if n_raw_features is None else int(n_raw_features)
    if n_raw < max_col + 1:
        raise DatasetFormatError(
            f"declared {n_raw} raw features but saw index {max_col + 1}"
        )
    rows = [row + [(n_raw, 1.0)] for row in rows]
    return SparseDataset(rows=rows, labels=np.array(labels), n_features=n_raw + 1)


def load_sparse_dataset(path, n_raw_features: int | None = None) -> SparseDataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sparse_dataset(fh, n_raw_features=n_raw_features)


def logistic_loss_grad(data: SparseDataset, w) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood of the +-1 labels and its gradient.

    Uses the numerically stable log(1 + exp(-m)) formulation throughout, so
    large margins neither overflow nor lose the gradient.
    """
    w = as_vector(w, data.n_features)
    X = data.matrix
    margins = data.labels * (X @ w)
    f = float(np.mean(np.logaddexp(0.0, -margins)))
    coeff = data.labels * expit(-margins)
    g = -np.asarray(X.T @ coeff).ravel() / data.n_samples
    return f, g


def logistic_objective(data: SparseDataset) -> Objective:
    return Objective(
        fun=lambda w: logistic_loss_grad(data, w)[0],
        grad=lambda w: logistic_loss_grad(data, w)[1],
        dim=data.n_features,
    )


@dataclass(frozen=True)
class ProblemInstance:
    """A ready-to-solve problem: objective, feasible set, starting point."""

    name: str
    objective: Objective
    cset: ConstraintSet
    x0: np.ndarray
    seed: int
    known_f_star: Optional[float] = None
    known_lipschitz: Optional[float] = None


def quadratic_objective(A: np.ndarray, b: np.ndarray) -> Objective:
    """f(x) = x.A.x/2 - b.x with gradient A.x - b."""
    A = np.asarray(A, dtype=float)
    b = as_vector(b)
    return Objective(
        fun=lambda x: float(0.5 * x @ (A @ x) - b @ x),
        grad=lambda x: A @ x - b,
        dim=b.size,
    )


def unconstrained_minimizer(obj: Objective, tol: float = 1e-5,
                            x0=None) -> np.ndarray:
    """Reference minimizer over an unbounded box, found with the momentum
    solver itself; any point with residual below ``tol`` qualifies."""
    free = Box(np.full(obj.dim, -np.inf), np.full(obj.dim, np.inf))
    start = np.zeros(obj.dim) if x0 is None else as_vector(x0, obj.dim)
    record = solve(obj, free, start, SolverConfig(mode=PGMM, tol_residual=tol),
                   keep_trace=False)
    if record.termination != CONVERGED:
        raise RuntimeError(
            f"unconstrained reference solve did not converge ({record.termination})"
        )
    return record.x_final


def build_lr_instance(data: SparseDataset, radius_fraction: float = 0.5,
                      seed: int = 0, name: str | None = None) -> ProblemInstance:
    """Logistic-regression training problem on an l1 ball.

    The radius is ``radius_fraction`` times the l1 norm of an approximate
    unconstrained minimizer, so the default fraction of one half cuts that
    minimizer out of the feasible set. The starting point is drawn uniformly
    from the cube [-1, 1]^n and projected into the ball, seeded.
    """
    if not 0.0 < radius_fraction <= 1.0:
        raise ValueError("radius_fraction must lie in (0, 1]")
    obj = logistic_objective(data)
    w_bar = unconstrained_minimizer(obj)
    radius = radius_fraction * float(np.abs(w_bar).sum())
    if not radius > 0.0:
        raise RuntimeError("unconstrained minimizer has zero l1 norm")
    ball = L1Ball(radius, dim=data.n_features)
    rng = np.random.default_rng(seed)
    x0 = ball.project(rng.uniform(-1.0, 1.0, size=data.n_features))
    return ProblemInstance(
        name=name or f"lr-n{data.n_features}-m{data.n_samples}-s{seed}",
        objective=obj, cset=ball, x0=x0, seed=seed,
    )


def gen_quadratic_box(n: int, cond: float, active_fraction: float, seed: int,
                      name: str | None = None) -> ProblemInstance:
    """Box-constrained strictly convex quadratic with a certified optimum.

    The Hessian has eigenvalues geometrically spaced from 1 to ``cond`` in a
    random rotation. A target solution and multiplier signs are drawn first;
    roughly ``active_fraction`` of the coordinates sit exactly on a bound at
    the optimum, with the gradient there satisfying the sign conditions of a
    constrained minimum. The optimal value and the gradient Lipschitz
    constant (= ``cond``) are recorded.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if cond < 1.0:
        raise ValueError("cond must be at least 1")
    if not 0.0 <= active_fraction <= 1.0:
        raise ValueError("active_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    eigs = np.geomspace(1.0, cond, n)
    if cond == 1.0:
        A = np.eye(n)
    else:
        Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
        A = (Q * eigs) @ Q.T
        A = 0.5 * (A + A.T)
    x_star = rng.uniform(-1.0, 1.0, n)
    lower = x_star - rng.uniform(0.5, 1.5, n)
    upper = x_star + rng.uniform(0.5, 1.5, n)
    grad_star = np.zeros(n)
    n_active = int(round(active_fraction * n))
    for i in rng.permutation(n)[:n_active]:
        multiplier = rng.uniform(0.5, 2.0)
        if rng.random() < 0.5:
            lower[i] = x_star[i]
            grad_star[i] = multiplier  # pushes into the lower bound
        else:
            upper[i] = x_star[i]
            grad_star[i] = -multiplier
    b = A @ x_star - grad_star
    f_star = float(0.5 * x_star @ (A @ x_star) - b @ x_star)
    x0 = rng.uniform(lower, upper)
    return ProblemInstance(
        name=name or f"quad-n{n}-c{cond:g}-a{active_fraction:g}-s{seed}",
        objective=quadratic_objective(A, b), cset=Box(lower, upper), x0=x0,
        seed=seed, known_f_star=f_star, known_lipschitz=float(eigs.max()),
    )


def _rosenbrock(x):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def _rosenbrock_grad(x):
    g = np.zeros_like(x)
    g[:-1] = -400.0 * x[:-1] * (x[1:] - x[:-1] ** 2) - 2.0 * (1.0 - x[:-1])
    g[1:] += 200.0 * (x[1:] - x[:-1] ** 2)
    return g


def gen_rosenbrock_box(n: int, seed: int, name: str | None = None) -> ProblemInstance:
    """The chained Rosenbrock valley on the classic box [-2.048, 2.048]^n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    lower = np.full(n, -2.048)
    upper = np.full(n, 2.048)
    x0 = rng.uniform(lower, upper)
    obj = Objective(fun=_rosenbrock, grad=_rosenbrock_grad, dim=n)
    return ProblemInstance(
        name=name or f"rosen-n{n}-s{seed}", objective=obj,
        cset=Box(lower, upper), x0=x0, seed=seed,
    )


def gen_quartic_box(n: int, seed: int, name: str | None = None) -> ProblemInstance:
    """Separable tilted double-well quartic on [-2, 2]^n (nonconvex)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    tilt = rng.uniform(-0.3, 0.3, n)

    def fun(x):
        return float(np.sum(0.25 * (x ** 2 - 1.0) ** 2 + tilt * x))

    def grad(x):
        return x * (x ** 2 - 1.0) + tilt

    lower = np.full(n, -2.0)
    upper = np.full(n, 2.0)
    x0 = rng.uniform(lower, upper)
    return ProblemInstance(
        name=name or f"quartic-n{n}-s{seed}",
        objective=Objective(fun=fun, grad=grad, dim=n),
        cset=Box(lower, upper), x0=x0, seed=seed,
    )


def synthetic_suite() -> list[ProblemInstance]:
    """Thirty seeded box-constrained instances: convex quadratics at varied
    conditioning and bound activity, two-variable Rosenbrock valleys, and
    nonconvex double-well quartics.

    The valley instances stay two-dimensional: with the default squared-step
    control, higher-dimensional Rosenbrock valleys stall the baseline solver
    just above the residual tolerance.
    """
    instances = []
    sid = 0
    for n in (5, 10, 20):
        for cond in (1.0, 10.0, 100.0):
            for frac in (0.0, 0.5):
                instances.append(gen_quadratic_box(n, cond, frac, seed=100 + sid))
                sid += 1
    for s in range(4):
        instances.append(gen_rosenbrock_box(2, seed=220 + s))
    for n in (5, 10, 20, 40):
        for s in (0, 1):
            instances.append(gen_quartic_box(n, seed=300 + 10 * n + s))
    return instances


def gen_synthetic_lr_dataset(m: int, n_raw: int, seed: int,
                             density: float = 0.5) -> SparseDataset:
    """Random sparse binary-classification data with uneven feature scales.

    Labels follow a logistic model on a sparse ground-truth weight vector,
    so the data is noisy but not separable.
    """
    rng = np.random.default_rng(seed)
    scales = 10.0 ** rng.uniform(-0.7, 0.7, n_raw)
    w_true = np.where(rng.random(n_raw) < 0.3, rng.normal(0.0, 2.0, n_raw), 0.0)
    rows, labels = [], []
    for _ in range(m):
        nnz = max(1, int(rng.binomial(n_raw, density)))
        cols = np.sort(rng.choice(n_raw, size=nnz, replace=False))
        vals = rng.standard_normal(nnz) * scales[cols]
        margin = float(vals @ w_true[cols]) + 0.5
        label = 1.0 if rng.random() < expit(2.0 * margin) else -1.0
        rows.append(list(zip(cols.tolist(), vals.tolist())) + [(n_raw, 1.0)])
        labels.append(label)
    return SparseDataset(rows=rows, labels=np.array(labels), n_features=n_raw + 1)


def lr_suite(n_datasets: int = 5, runs_per_dataset: int = 4, m: int = 200,
             n_raw: int = 49, radius_fraction: float = 0.5,
             base_seed: int = 7) -> list[ProblemInstance]:
    """Seeded l1-ball logistic-regression instances over synthetic datasets;
    one reference minimizer per dataset, several starting points each."""
    instances = []
    for d in range(n_datasets):
        data = gen_synthetic_lr_dataset(m, n_raw, seed=base_seed + d)
        obj = logistic_objective(data)
        w_bar = unconstrained_minimizer(obj)
        radius = radius_fraction * float(np.abs(w_bar).sum())
        ball = L1Ball(radius, dim=data.n_features)
        for r in range(runs_per_dataset):
            seed = 1000 * (d + 1) + r
            rng = np.random.default_rng(seed)
            x0 = ball.project(rng.uniform(-1.0, 1.0, data.n_features))
            instances.append(ProblemInstance(
                name=f"lrsynth-m{m}-n{n_raw + 1}-d{d}-r{r}",
                objective=obj, cset=ball, x0=x0, seed=seed,
            ))
    return instances
