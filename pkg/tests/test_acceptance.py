"""End-to-end acceptance checks.

Each criterion prints one PASS/FAIL line; run with ``pytest -s`` to see them.
Heavy solver runs are shared through module-scoped fixtures.
"""

import math
import time

import numpy as np
import pytest
from conftest import (SET_KINDS, l1_projection_oracle, random_feasible_point,
                      random_quadratic, random_set)

import pgmm
from pgmm import (CONVERGED, PGMM, SPG, L1Ball, QuadCoeffs, QuadModel2D,
                  SolverConfig, check_assumption2_trace, effective_constants,
                  minimize_on_simplex, repair_matrix, solve)
from pgmm.cli import main


def report(num, name, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    print(f"[acceptance] {num:02d} {name}: {'PASS' if ok else 'FAIL'}{tail}")
    assert ok, f"criterion {num} ({name}) failed {tail}"


@pytest.fixture(scope="module")
def synthetic_runs():
    instances = pgmm.synthetic_suite()
    out = {}
    for mode in (PGMM, SPG):
        cfg = SolverConfig(mode=mode)
        out[mode] = [(inst, solve(inst.objective, inst.cset, inst.x0, cfg))
                     for inst in instances]
    return out


@pytest.fixture(scope="module")
def lr_runs():
    start = time.perf_counter()
    instances = pgmm.lr_suite()
    out = {}
    for mode in (PGMM, SPG):
        cfg = SolverConfig(mode=mode)
        out[mode] = [(inst, solve(inst.objective, inst.cset, inst.x0, cfg))
                     for inst in instances]
    return out, time.perf_counter() - start


@pytest.fixture(scope="module")
def complexity_runs():
    instances = []
    sid = 0
    for n in (4, 8, 16, 24):
        for cond in (1.0, 10.0, 100.0, 500.0, 1000.0):
            instances.append(pgmm.gen_quadratic_box(n, cond, 0.3, seed=400 + sid))
            sid += 1
    assert len(instances) == 20
    cfg = SolverConfig(mode=PGMM)
    return [(inst, solve(inst.objective, inst.cset, inst.x0, cfg))
            for inst in instances]


def test_criterion_01_qp2d_oracle_equivalence():
    start = time.perf_counter()
    n = 1000
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (i + j) <= n
    a = i[keep] / n
    b = j[keep] / n
    a2, ab, b2 = 0.5 * a * a, a * b, 0.5 * b * b
    rng = np.random.default_rng(20240001)
    worst_gap = 0.0
    worst_excess = 0.0
    for _ in range(1000):
        t, u, w, y, h = rng.uniform(-5.0, 5.0, 5)
        _, _, value = minimize_on_simplex(QuadCoeffs(t, u, w, y, h))
        grid_min = float(np.min(t * a2 + u * ab + w * b2 + y * a + h * b))
        worst_excess = max(worst_excess, value - grid_min)
        worst_gap = max(worst_gap, abs(value - grid_min))
    elapsed = time.perf_counter() - start
    ok = worst_excess <= 1e-12 and worst_gap <= 1e-3 and elapsed < 30.0
    report(1, "qp2d-grid-oracle", ok,
           f"gap={worst_gap:.2e} excess={worst_excess:.2e} t={elapsed:.1f}s")


def test_criterion_02_l1_projection_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(20240002)
    worst = 0.0
    for _ in range(500):
        dim = int(rng.integers(1, 7))
        radius = rng.uniform(0.2, 2.5)
        x = rng.uniform(-3.0, 3.0, dim) * 10.0 ** rng.uniform(-1, 1)
        got = L1Ball(radius, dim).project(x)
        want = l1_projection_oracle(x, radius)
        worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5.0
    report(2, "l1-projection-kkt-oracle", ok, f"err={worst:.2e} t={elapsed:.2f}s")


def test_criterion_03_projection_monotonicity():
    rng = np.random.default_rng(20240003)
    ts = np.geomspace(1e-2, 1e2, 50)
    worst_p = 0.0
    worst_h = 0.0
    for trial in range(200):
        kind = SET_KINDS[trial % len(SET_KINDS)]
        dim = int(rng.integers(2, 8))
        cset = random_set(kind, dim, rng)
        x = random_feasible_point(cset, rng)
        z = rng.standard_normal(dim)
        p = np.array([np.linalg.norm(cset.project(x + t * z) - x) for t in ts])
        worst_p = max(worst_p, float(np.max(-np.diff(p), initial=0.0)))
        worst_h = max(worst_h, float(np.max(np.diff(p / ts), initial=0.0)))
    ok = worst_p <= 1e-12 and worst_h <= 1e-12
    report(3, "projection-monotonicity", ok,
           f"p-drop={worst_p:.2e} h-rise={worst_h:.2e}")


def test_criterion_04_descent_inequality():
    rng = np.random.default_rng(20240004)
    worst = -np.inf
    for trial in range(500):
        kind = SET_KINDS[trial % len(SET_KINDS)]
        dim = int(rng.integers(2, 9))
        cset = random_set(kind, dim, rng)
        obj, _, _ = random_quadratic(dim, rng)
        x = random_feasible_point(cset, rng)
        eta = 10.0 ** rng.uniform(-2, 2)
        g = obj.gradient(x)
        d = cset.project(x - eta * g) - x
        worst = max(worst, float(g @ d + (d @ d) / eta))
    ok = worst <= 1e-10
    report(4, "projected-step-descent-inequality", ok, f"slack={worst:.2e}")


def test_criterion_05_repair_guarantee():
    rng = np.random.default_rng(20240005)
    worst_eig = np.inf
    worst_h11 = -np.inf
    for _ in range(500):
        d_norm, s_norm = 10.0 ** rng.uniform(-2, 1, 2)
        nu1 = 10.0 ** rng.uniform(-6, -1)
        nu2 = nu1 * 10.0 ** rng.uniform(0.0, 6.0)
        raw = QuadModel2D(rng.uniform(-10, 10), rng.uniform(-1000, 1000),
                          rng.uniform(-10, 10), 0.0, 0.0)
        fixed = repair_matrix(raw, d_norm, s_norm, nu1, nu2)
        h11 = fixed.h11 / d_norm ** 2
        h22 = fixed.h22 / s_norm ** 2
        h12 = fixed.h12 / (d_norm * s_norm)
        lam_min = 0.5 * (h11 + h22 - math.sqrt((h11 - h22) ** 2 + 4.0 * h12 ** 2))
        worst_eig = min(worst_eig, lam_min - nu1)
        worst_h11 = max(worst_h11, (h11 - nu2) / nu2)
    ok = worst_eig >= -1e-10 and worst_h11 <= 1e-12
    report(5, "repair-spectrum-guarantee", ok,
           f"eig-slack={worst_eig:.2e} h11-rel-excess={worst_h11:.2e}")


def test_criterion_06_interpolation_exactness():
    rng = np.random.default_rng(20240006)
    worst = 0.0
    collected = 0
    while collected < 100:
        dim = int(rng.integers(2, 8))
        cset = random_set("box", dim, rng)
        obj, A, _ = random_quadratic(dim, rng)
        x = random_feasible_point(cset, rng)
        x_prev = random_feasible_point(cset, rng)
        eta = 10.0 ** rng.uniform(-1, 1)
        bd = pgmm.base_directions(obj, cset, x, x_prev, obj.gradient(x), eta)
        if np.linalg.norm(bd.d_hat) < 1e-3 or np.linalg.norm(bd.s_hat) < 1e-3:
            continue
        collected += 1
        g = obj.gradient(x)
        model = pgmm.interpolate_model(
            obj.value(x), float(g @ bd.d_hat), float(g @ bd.s_hat),
            obj.value(x + 0.5 * bd.s_hat), obj.value(x + 0.5 * bd.d_hat),
            obj.value(x + 0.5 * (bd.d_hat + bd.s_hat)))
        P = np.column_stack([bd.d_hat, bd.s_hat])
        exact = P.T @ A @ P
        got = np.array([[model.h11, model.h12], [model.h12, model.h22]])
        rel = np.linalg.norm(got - exact) / max(np.linalg.norm(exact), 1e-12)
        worst = max(worst, float(rel))
    ok = worst <= 1e-8
    report(6, "interpolation-exact-on-quadratics", ok, f"rel-err={worst:.2e}")


def test_criterion_07_assumption2_traces(synthetic_runs, lr_runs, complexity_runs):
    records = [rec for _, rec in synthetic_runs[PGMM]]
    records += [rec for _, rec in lr_runs[0][PGMM]]
    records += [rec for _, rec in complexity_runs]
    checked = 0
    ok = True
    for rec in records:
        constants = effective_constants(
            rec.config.c1_bar, rec.config.c2_bar, rec.config.nu1,
            rec.config.nu2, rec.config.eta_min, rec.config.eta_max)
        if not check_assumption2_trace(rec, constants, eta=1.0):
            ok = False
            break
        if not check_assumption2_trace(rec, constants, eta=None):
            ok = False
            break
        fs = [row.f for row in rec.trace] + [rec.f_final]
        if not all(b <= a for a, b in zip(fs, fs[1:])):
            ok = False
            break
        checked += 1
    report(7, "assumption2-trace-and-monotone-f", ok, f"runs={checked}")


def test_criterion_08_complexity_bound(complexity_runs):
    ok = True
    detail = ""
    for inst, rec in complexity_runs:
        cfg = rec.config
        c1, c2 = effective_constants(cfg.c1_bar, cfg.c2_bar, cfg.nu1, cfg.nu2,
                                     cfg.eta_min, cfg.eta_max)
        alpha_l = min(1.0, 2.0 * c1 * (1.0 - cfg.gamma) / inst.known_lipschitz)
        f0 = rec.trace[0].f if rec.trace else rec.f_final
        for eps in (1e-1, 1e-2):
            count = sum(1 for row in rec.trace if math.sqrt(row.phi1_sq) > eps)
            bound = ((f0 - inst.known_f_star)
                     / (cfg.delta * alpha_l * cfg.gamma * c2) / eps ** 2)
            if count > bound:
                ok = False
                detail = f"{inst.name}: eps={eps}, {count} > {bound:.3g}"
                break
        if not ok:
            break
    report(8, "iteration-count-bound", ok, detail or f"runs={len(complexity_runs)}")


def test_criterion_09_convergence_suite(synthetic_runs):
    ok = True
    details = []
    for mode in (PGMM, SPG):
        runs = synthetic_runs[mode]
        converged = sum(1 for _, rec in runs if rec.termination == CONVERGED)
        details.append(f"{mode}:{converged}/{len(runs)}")
        if converged < 0.9 * len(runs):
            ok = False
        for inst, rec in runs:
            if inst.known_f_star is None:
                continue
            if abs(rec.f_final - inst.known_f_star) > 1e-6:
                ok = False
                details.append(f"{mode}/{inst.name}: gap="
                               f"{abs(rec.f_final - inst.known_f_star):.2e}")
    report(9, "synthetic-suite-convergence", ok, " ".join(details))


def test_criterion_10_lr_momentum_outperforms_baseline(lr_runs):
    runs, elapsed = lr_runs
    total = len(runs[PGMM])
    both_converged = 0
    strict_wins = 0
    for (inst, rec_m), (_, rec_b) in zip(runs[PGMM], runs[SPG]):
        if rec_m.termination == CONVERGED and rec_b.termination == CONVERGED:
            both_converged += 1
        if rec_m.iterations < rec_b.iterations:
            strict_wins += 1
    ok = (strict_wins >= 0.6 * total and both_converged >= 0.95 * total
          and elapsed < 120.0)
    report(10, "lr-iteration-advantage", ok,
           f"wins={strict_wins}/{total} converged={both_converged}/{total} "
           f"t={elapsed:.1f}s")


def test_criterion_11_bench_determinism(tmp_path):
    import csv

    args = ["bench", "--problem", "quad:n=6,cond=50", "--problem", "quartic:n=5",
            "--seeds", "1,2", "--out"]
    out1, out2 = tmp_path / "run1.csv", tmp_path / "run2.csv"
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0

    def strip_timing(path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        for row in rows:
            row.pop("wall_time_s")
        return rows

    ok = strip_timing(out1) == strip_timing(out2)
    report(11, "bench-determinism", ok, f"rows={len(strip_timing(out1))}")
