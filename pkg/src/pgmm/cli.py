"""Command line: solve one configured problem, run a benchmark suite, or turn
a results table into performance-profile data with a rendered figure."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import problems
from .bench import (ResultsSchemaError, read_results_csv, run_benchmark,
                    write_results_csv, write_trace_csv)
from .plotting import render_profile_figure
from .problems import DatasetFormatError, ProblemInstance
from .profiles import performance_profile, write_profile_csv
from .sets import from_config as set_from_config
from .solver import CONVERGED, PGMM, SPG, SolverConfig, solve

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2
EXIT_IO = 3

METRICS = ("iters", "f_evals", "wall_time_s")


class UsageError(ValueError):
    pass


def _parse_params(text: str) -> tuple[str | None, dict]:
    """Split 'tok,key=val,...' into an optional bare token and a key/value map."""
    bare = None
    params = {}
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" in tok:
            key, _, val = tok.partition("=")
            params[key.strip()] = val.strip()
        elif bare is None:
            bare = tok
        else:
            raise UsageError(f"unexpected token {tok!r} in problem spec")
    return bare, params


def _toy_dataset_path() -> Path:
    return Path(resources.files("pgmm").joinpath("data/toy_binary.txt"))


def parse_problem_spec(text: str, seed: int | None = None) -> ProblemInstance:
    """Build one instance from a ``kind:params`` spec string.

    Kinds: ``quad:n=..,cond=..,active=..,seed=..``, ``rosen:n=..,seed=..``,
    ``quartic:n=..,seed=..``, ``lr:PATH,frac=..,seed=..`` (PATH may be ``toy``
    for the bundled dataset), and ``lrsynth:m=..,n=..,frac=..,data_seed=..,
    seed=..``. A missing seed falls back to the ``seed`` argument, then 0.
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    bare, params = _parse_params(rest)

    def geti(key, default):
        return int(params.get(key, default))

    def getf(key, default):
        return float(params.get(key, default))

    s = int(params["seed"]) if "seed" in params else (0 if seed is None else int(seed))
    if kind == "quad":
        return problems.gen_quadratic_box(
            geti("n", 20), getf("cond", 10.0), getf("active", 0.5), seed=s)
    if kind == "rosen":
        return problems.gen_rosenbrock_box(geti("n", 5), seed=s)
    if kind == "quartic":
        return problems.gen_quartic_box(geti("n", 10), seed=s)
    if kind == "lr":
        if bare is None:
            raise UsageError("lr spec needs a dataset path, e.g. lr:data.txt,frac=0.5")
        path = _toy_dataset_path() if bare == "toy" else Path(bare)
        if not path.exists():
            raise FileNotFoundError(f"dataset file not found: {path}")
        data = problems.load_sparse_dataset(path)
        return problems.build_lr_instance(
            data, radius_fraction=getf("frac", 0.5), seed=s,
            name=f"lr-{path.stem}-s{s}")
    if kind == "lrsynth":
        data = problems.gen_synthetic_lr_dataset(
            geti("m", 200), geti("n", 49), seed=geti("data_seed", 7))
        return problems.build_lr_instance(
            data, radius_fraction=getf("frac", 0.5), seed=s,
            name=f"lrsynth-d{geti('data_seed', 7)}-s{s}")
    raise UsageError(f"unknown problem kind {kind!r}")


def _spec_has_seed(text: str) -> bool:
    _, _, rest = text.partition(":")
    _, params = _parse_params(rest)
    return "seed" in params


def expand_bench_specs(specs, seeds) -> list[ProblemInstance]:
    """Expand problem specs into instances.

    ``suite:synthetic`` and ``suite:lr`` carry their own embedded seeds and
    expand as-is; so does any spec with an explicit ``seed=``. Template specs
    without a seed are instantiated once per entry of ``seeds``.
    """
    instances = []
    for spec in specs:
        if spec == "suite:synthetic":
            instances.extend(problems.synthetic_suite())
        elif spec == "suite:lr":
            instances.extend(problems.lr_suite())
        elif spec.startswith("suite:"):
            raise UsageError(f"unknown suite {spec!r}")
        elif _spec_has_seed(spec):
            instances.append(parse_problem_spec(spec))
        else:
            if not seeds:
                raise UsageError("bench needs a nonempty --seeds list")
            instances.extend(parse_problem_spec(spec, seed=s) for s in seeds)
    if not instances:
        raise UsageError("no problem instances to run")
    return instances


def parse_seed_list(text: str) -> list[int]:
    """Parse '1,2,5-8' into [1, 2, 5, 6, 7, 8]."""
    seeds = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "-" in tok[1:]:  # allow a leading minus sign
            lo_s, _, hi_s = tok.partition("-") if not tok.startswith("-") else tok[1:].partition("-")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise UsageError(f"bad seed range {tok!r}") from None
            if hi < lo:
                raise UsageError(f"empty seed range {tok!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            try:
                seeds.append(int(tok))
            except ValueError:
                raise UsageError(f"bad seed {tok!r}") from None
    if not seeds:
        raise UsageError("seed list is empty")
    return seeds


def _add_config_flags(parser):
    parser.add_argument("--max-iters", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None,
                        help="stopping residual (sup norm)")
    parser.add_argument("--eta-min", type=float, default=None)
    parser.add_argument("--eta-max", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--delta", type=float, default=None)


def _config_from_args(args, mode: str) -> SolverConfig:
    overrides = {"mode": mode}
    for attr, field in (("max_iters", "max_iters"), ("tol", "tol_residual"),
                        ("eta_min", "eta_min"), ("eta_max", "eta_max"),
                        ("gamma", "gamma"), ("delta", "delta")):
        value = getattr(args, attr)
        if value is not None:
            overrides[field] = value
    try:
        return replace(SolverConfig(), **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgmm",
        description="Projected gradient solvers (momentum and spectral baseline) "
                    "over boxes and norm balls.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a single configured problem")
    p_solve.add_argument("--problem", required=True,
                         help="problem spec, e.g. quad:n=10,cond=10,seed=1")
    p_solve.add_argument("--solver", choices=(PGMM, SPG), default=PGMM)
    p_solve.add_argument("--set", default=None, metavar="JSON",
                         help="path to a JSON constraint-set description "
                              "overriding the problem's set")
    p_solve.add_argument("--trace", default=None, metavar="CSV",
                         help="write the per-iteration trace here")
    _add_config_flags(p_solve)

    p_bench = sub.add_parser("bench", help="run a suite and write a results CSV")
    p_bench.add_argument("--problem", action="append", required=True,
                         help="problem spec or suite (repeatable); specs without "
                              "seed= expand over --seeds")
    p_bench.add_argument("--solver", default=f"{PGMM},{SPG}",
                         help="comma-separated solver modes")
    p_bench.add_argument("--seeds", default="1", help="e.g. 1,2,5-8")
    p_bench.add_argument("--out", required=True, help="results CSV path")
    _add_config_flags(p_bench)

    p_prof = sub.add_parser("profile", help="performance profile from a results CSV")
    p_prof.add_argument("results", help="results CSV produced by bench")
    p_prof.add_argument("--metric", choices=METRICS, default="iters")
    p_prof.add_argument("--out", required=True,
                        help="profile CSV path; a .png figure lands next to it")
    return parser


def cmd_solve(args) -> int:
    instance = parse_problem_spec(args.problem)
    if args.set is not None:
        set_path = Path(args.set)
        if not set_path.exists():
            raise FileNotFoundError(f"set config file not found: {set_path}")
        with open(set_path, "r", encoding="utf-8") as fh:
            cset = set_from_config(json.load(fh), dim=instance.objective.dim)
        instance = replace(instance, cset=cset, x0=cset.project(instance.x0),
                           known_f_star=None)
    config = _config_from_args(args, mode=args.solver)
    record = solve(instance.objective, instance.cset, instance.x0, config,
                   keep_trace=args.trace is not None)
    print(f"{instance.name} [{args.solver}] status={record.termination} "
          f"iters={record.iterations} f_final={record.f_final:.12g} "
          f"residual_inf={record.residual_final:.3e} f_evals={record.f_evals} "
          f"g_evals={record.g_evals} projections={record.projections} "
          f"time={record.wall_time:.3f}s")
    if args.trace is not None:
        write_trace_csv(record, args.trace)
    return EXIT_OK if record.termination == CONVERGED else EXIT_NOT_CONVERGED


def cmd_bench(args) -> int:
    solvers = [s.strip() for s in args.solver.split(",") if s.strip()]
    for s in solvers:
        if s not in (PGMM, SPG):
            raise UsageError(f"unknown solver {s!r}")
    if not solvers:
        raise UsageError("no solver modes given")
    seeds = parse_seed_list(args.seeds)
    instances = expand_bench_specs(args.problem, seeds)
    config = _config_from_args(args, mode=solvers[0])
    rows = run_benchmark(instances, solvers, config)
    write_results_csv(rows, args.out)
    for s in solvers:
        mine = [r for r in rows if r["solver"] == s]
        good = sum(1 for r in mine if r["status"] == CONVERGED)
        print(f"{s}: {good}/{len(mine)} converged")
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_profile(args) -> int:
    rows = read_results_csv(args.results)
    if not rows:
        raise UsageError("results CSV has no data rows")
    solvers = sorted({r["solver"] for r in rows})
    keys = sorted({(r["problem"], r["seed"]) for r in rows})
    index = {k: j for j, k in enumerate(keys)}
    metrics = [[float("inf")] * len(keys) for _ in solvers]
    for r in rows:
        j = index[(r["problem"], r["seed"])]
        s = solvers.index(r["solver"])
        if r["status"] == CONVERGED:
            value = float(r[args.metric])
            # Count metrics can legitimately be zero (stationary start);
            # clamp so the best-ratio denominator stays positive.
            floor = 1.0 if args.metric in ("iters", "f_evals") else 1e-9
            metrics[s][j] = max(value, floor)
    table = performance_profile(metrics, solvers,
                                [f"{p}#{seed}" for p, seed in keys])
    out = Path(args.out)
    write_profile_csv(table, out)
    figure_path = out.with_suffix(".png")
    render_profile_figure(table, args.metric, figure_path)
    print(f"wrote profile for {len(table.problems)} problems x "
          f"{len(table.solvers)} solvers to {out} (figure: {figure_path})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": cmd_solve, "bench": cmd_bench, "profile": cmd_profile}
    try:
        return handlers[args.command](args)
    except (UsageError, ResultsSchemaError, DatasetFormatError) as exc:
        print(f"pgmm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"pgmm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"pgmm: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"pgmm: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
