"""Exact multiple-break detection for time-series regression.

Minimizes the least-squares objective with a per-break penalty over all
segmentations of the sample, using two mutually certifying exact
solvers, with penalty tuning, post-detection inference and a simulation
laboratory.
"""

from .bnb import choose_big_m, export_lp, solve_miqp
from .costs import SegmentCostEngine, SegmentFit
from .dp import brute_force, solve_fixed_m, solve_l0
from .estimator import L0BreakRegression
from .inference import InferenceReport, infer
from .model import (
    BigMTooSmall,
    BreakDiagnostics,
    Certificate,
    Dataset,
    InfeasibleProblem,
    PenaltyConfig,
    Segmentation,
    SolverResult,
    diagnostics,
    recompute_objective,
)
from .simlab import CellResult, DgpSpec, generate, hausdorff, run_cell, run_table
from .tuning import (
    LambdaPath,
    build_grid,
    fit_path,
    select_by_classical_ic,
    select_by_ic,
)

__version__ = "0.1.0"

__all__ = [
    "BigMTooSmall",
    "BreakDiagnostics",
    "CellResult",
    "Certificate",
    "Dataset",
    "DgpSpec",
    "InfeasibleProblem",
    "InferenceReport",
    "L0BreakRegression",
    "LambdaPath",
    "PenaltyConfig",
    "SegmentCostEngine",
    "SegmentFit",
    "Segmentation",
    "SolverResult",
    "brute_force",
    "build_grid",
    "choose_big_m",
    "diagnostics",
    "export_lp",
    "fit_path",
    "generate",
    "hausdorff",
    "infer",
    "recompute_objective",
    "run_cell",
    "run_table",
    "select_by_classical_ic",
    "select_by_ic",
    "solve_fixed_m",
    "solve_l0",
    "solve_miqp",
]
