import csv
import json

import numpy as np
import pytest

from pgmm.bench import RESULTS_HEADER, read_results_csv, run_benchmark, write_results_csv
from pgmm.cli import (EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE,
                      expand_bench_specs, main, parse_problem_spec,
                      parse_seed_list)
from pgmm.problems import gen_quadratic_box
from pgmm.solver import PGMM, SPG


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSpecParsing:
    def test_quad_spec(self):
        inst = parse_problem_spec("quad:n=6,cond=10,seed=3")
        ref = gen_quadratic_box(6, 10.0, 0.5, seed=3)
        np.testing.assert_array_equal(inst.x0, ref.x0)

    def test_seed_injection_for_templates(self):
        inst = parse_problem_spec("quad:n=4,cond=5", seed=9)
        assert inst.seed == 9

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            parse_problem_spec("simplexqp:n=3")

    def test_seed_list(self):
        assert parse_seed_list("1,2,5-8") == [1, 2, 5, 6, 7, 8]
        with pytest.raises(ValueError):
            parse_seed_list(" , ")

    def test_expand_templates_over_seeds(self):
        instances = expand_bench_specs(["quad:n=4,cond=5", "rosen:n=2"], [1, 2])
        assert len(instances) == 4

    def test_explicit_seed_not_expanded(self):
        instances = expand_bench_specs(["quad:n=4,cond=5,seed=7"], [1, 2, 3])
        assert len(instances) == 1 and instances[0].seed == 7


class TestSolveCommand:
    def test_quadratic_converges(self, capsys):
        code = main(["solve", "--problem", "quad:n=10,cond=10,seed=1",
                     "--solver", "pgmm"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "status=converged" in out

    def test_bundled_toy_dataset(self, capsys):
        code = main(["solve", "--problem", "lr:toy,frac=0.5,seed=3",
                     "--solver", "spg"])
        assert code == EXIT_OK
        assert "status=converged" in capsys.readouterr().out

    def test_missing_dataset_names_path(self, capsys):
        code = main(["solve", "--problem", "lr:/no/such/file.txt"])
        assert code == EXIT_IO
        assert "/no/such/file.txt" in capsys.readouterr().err

    def test_non_convergence_exit_code(self):
        code = main(["solve", "--problem", "rosen:n=10,seed=1",
                     "--max-iters", "3"])
        assert code == EXIT_NOT_CONVERGED

    def test_trace_written(self, tmp_path):
        trace = tmp_path / "trace.csv"
        code = main(["solve", "--problem", "quad:n=5,cond=10,seed=2",
                     "--trace", str(trace)])
        assert code == EXIT_OK
        rows = read_rows(trace)
        assert rows and {"k", "f", "residual_inf", "mu", "alpha", "beta",
                         "fallback", "repaired"} <= set(rows[0])

    def test_set_override_from_json(self, tmp_path, capsys):
        cfg = tmp_path / "set.json"
        cfg.write_text(json.dumps({"type": "l1ball", "radius": 0.5}))
        code = main(["solve", "--problem", "quad:n=5,cond=10,seed=2",
                     "--set", str(cfg)])
        assert code == EXIT_OK
        assert "status=converged" in capsys.readouterr().out

    def test_bad_flag_value_is_usage_error(self, capsys):
        code = main(["solve", "--problem", "quad:n=5,seed=1", "--gamma", "2.0"])
        assert code == EXIT_USAGE


class TestBenchCommand:
    def test_cross_product_row_count(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        code = main(["bench", "--problem", "quad:n=4,cond=5",
                     "--problem", "quartic:n=3",
                     "--seeds", "1,2", "--out", str(out)])
        assert code == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 8  # 2 problems x 2 seeds x 2 solvers
        assert set(rows[0]) == set(RESULTS_HEADER)

    def test_repeat_invocations_identical_modulo_timing(self, tmp_path):
        args = ["bench", "--problem", "quad:n=4,cond=5", "--seeds", "1,2"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == EXIT_OK
        assert main(args + ["--out", str(out2)]) == EXIT_OK
        rows1, rows2 = read_rows(out1), read_rows(out2)
        for r1, r2 in zip(rows1, rows2):
            r1.pop("wall_time_s"), r2.pop("wall_time_s")
            assert r1 == r2

    def test_divergent_problem_recorded_not_fatal(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        code = main(["bench", "--problem", "rosen:n=10", "--seeds", "1",
                     "--max-iters", "3", "--out", str(out)])
        assert code == EXIT_OK
        statuses = {row["status"] for row in read_rows(out)}
        assert statuses and "converged" not in statuses

    def test_unknown_solver_rejected(self, tmp_path, capsys):
        code = main(["bench", "--problem", "quad:n=4", "--seeds", "1",
                     "--solver", "newton", "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_USAGE


class TestProfileCommand:
    def make_results(self, path):
        rows = []
        for (problem, seed, solver, iters) in (
            ("p1", 1, "pgmm", 10), ("p1", 1, "spg", 20),
            ("p2", 1, "pgmm", 20), ("p2", 1, "spg", 10),
        ):
            rows.append({
                "problem": problem, "seed": seed, "solver": solver,
                "status": "converged", "iters": iters, "f_evals": iters,
                "g_evals": iters, "projections": iters, "f_final": 0.0,
                "residual_inf": 1e-6, "wall_time_s": 0.001,
            })
        write_results_csv(rows, path)

    def test_hand_written_two_by_two(self, tmp_path, capsys):
        results = tmp_path / "results.csv"
        self.make_results(results)
        out = tmp_path / "profile.csv"
        code = main(["profile", str(results), "--metric", "iters",
                     "--out", str(out)])
        assert code == EXIT_OK
        curves = {}
        for row in read_rows(out):
            curves.setdefault(row["solver"], {})[float(row["tau"])] = float(row["rho"])
        for solver in ("pgmm", "spg"):
            assert curves[solver][1.0] == pytest.approx(0.5)
            assert curves[solver][2.0] == pytest.approx(1.0)
        assert (tmp_path / "profile.png").exists()

    def test_missing_status_column_is_schema_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("problem,seed,solver,iters\np,1,pgmm,3\n")
        code = main(["profile", str(bad), "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_USAGE
        assert "status" in capsys.readouterr().err

    def test_missing_results_file(self, tmp_path, capsys):
        code = main(["profile", str(tmp_path / "absent.csv"),
                     "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_IO

    def test_end_to_end_from_bench(self, tmp_path):
        results = tmp_path / "results.csv"
        assert main(["bench", "--problem", "quad:n=4,cond=5", "--seeds", "1,2",
                     "--out", str(results)]) == EXIT_OK
        out = tmp_path / "profile.csv"
        assert main(["profile", str(results), "--metric", "f_evals",
                     "--out", str(out)]) == EXIT_OK
        assert out.exists() and (tmp_path / "profile.png").exists()


class TestBenchApi:
    def test_error_rows_recorded(self):
        import pgmm

        bad = gen_quadratic_box(3, 5.0, 0.0, seed=1)
        broken = pgmm.ProblemInstance(
            name="broken", objective=pgmm.Objective(
                fun=lambda x: float("nan"), grad=lambda x: x, dim=3),
            cset=bad.cset, x0=bad.x0, seed=1)
        rows = run_benchmark([broken], [PGMM, SPG], max_workers=1)
        assert all(row["status"].startswith("error:") for row in rows)

    def test_schema_reader_rejects_missing_columns(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("problem,seed\np,1\n")
        with pytest.raises(ValueError):
            read_results_csv(path)
