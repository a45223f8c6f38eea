"""Benchmark execution over problems x solvers, and the delimited result
formats shared with the command line."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from .solver import TRACE_FIELDS, RunRecord, SolverConfig, solve

RESULTS_HEADER = [
    "problem", "seed", "solver", "status", "iters", "f_evals", "g_evals",
    "projections", "f_final", "residual_inf", "wall_time_s",
]


class ResultsSchemaError(ValueError):
    """Raised when a results CSV does not carry the documented columns."""


def _worker_count() -> int:
    env = os.environ.get("PGMM_THREADS", "")
    if env.strip():
        count = int(env)
        if count < 1:
            raise ValueError("PGMM_THREADS must be a positive integer")
        return count
    return os.cpu_count() or 1


def run_benchmark(instances, solvers, config: SolverConfig | None = None,
                  max_workers: int | None = None) -> list[dict]:
    """Run every instance under every solver mode and collect result rows.

    Individual run failures (exceptions) are recorded with status ``error``
    rather than aborting the suite. Rows come back sorted by
    (problem, seed, solver) regardless of execution order, so output is
    deterministic up to the timing column.
    """
    base = config if config is not None else SolverConfig()
    if max_workers is None:
        max_workers = _worker_count()
    jobs = [(inst, mode) for inst in instances for mode in solvers]

    def run(job):
        inst, mode = job
        try:
            rec = solve(inst.objective, inst.cset, inst.x0,
                        replace(base, mode=mode), keep_trace=False)
        except Exception as exc:  # recorded, not fatal
            return {
                "problem": inst.name, "seed": inst.seed, "solver": mode,
                "status": f"error:{type(exc).__name__}", "iters": 0, "f_evals": 0,
                "g_evals": 0, "projections": 0, "f_final": float("nan"),
                "residual_inf": float("nan"), "wall_time_s": 0.0,
            }
        return {
            "problem": inst.name, "seed": inst.seed, "solver": mode,
            "status": rec.termination, "iters": rec.iterations,
            "f_evals": rec.f_evals, "g_evals": rec.g_evals,
            "projections": rec.projections, "f_final": rec.f_final,
            "residual_inf": rec.residual_final, "wall_time_s": rec.wall_time,
        }

    if max_workers == 1 or len(jobs) == 1:
        rows = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(run, jobs))
    rows.sort(key=lambda r: (r["problem"], r["seed"], r["solver"]))
    return rows


def write_results_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULTS_HEADER)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            out["f_final"] = repr(float(row["f_final"]))
            out["residual_inf"] = repr(float(row["residual_inf"]))
            out["wall_time_s"] = f"{float(row['wall_time_s']):.6f}"
            writer.writerow(out)


def read_results_csv(path) -> list[dict]:
    """Read a results CSV, checking it carries the documented schema."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in RESULTS_HEADER if col not in header]
        if missing:
            raise ResultsSchemaError(f"results CSV is missing columns: {missing}")
        return list(reader)


def write_trace_csv(record: RunRecord, path) -> None:
    """Dump a run's per-iteration trace."""
    if record.trace is None:
        raise ValueError("run record has no stored trace")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_FIELDS)
        for row in record.trace:
            writer.writerow([getattr(row, field) for field in TRACE_FIELDS])
