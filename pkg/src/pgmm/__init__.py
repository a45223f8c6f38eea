"""Projected gradient solvers with momentum over boxes and norm balls."""

from .core import (Objective, StationarityReport, finite_difference_gradient,
                   inf_norm_residual, stationarity_measure, stationarity_report)
from .direction import (BaseDirections, DirectionResult, QuadModel2D,
                        base_directions, compute_direction, effective_constants,
                        gradient_related_check, interpolate_model, repair_matrix,
                        spectral_eta)
from .linesearch import (LineSearchError, LineSearchOutcome, LineSearchParams,
                         armijo_search, gll_reference)
from .problems import (ProblemInstance, SparseDataset, build_lr_instance,
                       gen_quadratic_box, gen_rosenbrock_box, gen_quartic_box,
                       gen_synthetic_lr_dataset, load_sparse_dataset,
                       logistic_loss_grad, logistic_objective, lr_suite,
                       parse_sparse_dataset, quadratic_objective,
                       synthetic_suite, unconstrained_minimizer)
from .profiles import ProfileTable, performance_profile, write_profile_csv
from .qp2d import QuadCoeffs, evaluate_quad2d, minimize_on_simplex
from .sets import Box, ConstraintSet, L1Ball, L2Ball
from .solver import (CONVERGED, LINE_SEARCH_FAIL, MAX_ITERS, PGMM, SMALL_STEP,
                     SPG, RunRecord, SolverConfig, check_assumption2_trace, solve)

__version__ = "0.1.0"

__all__ = [
    "Objective", "StationarityReport", "finite_difference_gradient",
    "inf_norm_residual", "stationarity_measure", "stationarity_report",
    "BaseDirections", "DirectionResult", "QuadModel2D", "base_directions",
    "compute_direction", "effective_constants", "gradient_related_check",
    "interpolate_model", "repair_matrix", "spectral_eta",
    "LineSearchError", "LineSearchOutcome", "LineSearchParams",
    "armijo_search", "gll_reference",
    "ProblemInstance", "SparseDataset", "build_lr_instance",
    "gen_quadratic_box", "gen_rosenbrock_box", "gen_quartic_box",
    "gen_synthetic_lr_dataset", "load_sparse_dataset", "logistic_loss_grad",
    "logistic_objective", "lr_suite", "parse_sparse_dataset",
    "quadratic_objective", "synthetic_suite", "unconstrained_minimizer",
    "ProfileTable", "performance_profile", "write_profile_csv",
    "QuadCoeffs", "evaluate_quad2d", "minimize_on_simplex",
    "Box", "ConstraintSet", "L1Ball", "L2Ball",
    "CONVERGED", "LINE_SEARCH_FAIL", "MAX_ITERS", "PGMM", "SMALL_STEP", "SPG",
    "RunRecord", "SolverConfig", "check_assumption2_trace", "solve",
]
