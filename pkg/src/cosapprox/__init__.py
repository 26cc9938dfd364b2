"""Fast scattered data approximation by cosine polynomials (Neumann boundary).

Least-squares fits in the basis ``cos(pi k x)`` lead to scaled
Toeplitz+Hankel normal equations, solved here by conjugate gradients with
DCT-I based O(M log M) matrix-vector products.
"""

from .approx import (CosinePoly, LevelTrace, SampleSet, fit_1d, fit_2d, make_samples,
                     midpoint_weights, multilevel_fit, residual)
from .dct import dct1, dct1_transpose, dct2d, dct2d_transpose
from .experiment import (ExperimentSpec, GridField, GridSpec, periodic_baseline_fit,
                         periodic_fit, relative_error, synth_experiment)
from .nudct import cosine_sums, cosine_sums_2d, eval_poly, eval_poly_2d
from .solver import (SolveReport, SolverConfig, cg_error_predictor, cg_solve,
                     condition_bound, lsqr_solve, max_gap)
from .th_operator import BlockTHOperator, THOperator, assemble_1d, assemble_2d

__all__ = [
    "BlockTHOperator", "CosinePoly", "ExperimentSpec", "GridField", "GridSpec",
    "LevelTrace", "SampleSet", "SolveReport", "SolverConfig", "THOperator",
    "assemble_1d", "assemble_2d", "cg_error_predictor", "cg_solve",
    "condition_bound", "cosine_sums", "cosine_sums_2d", "dct1", "dct1_transpose",
    "dct2d", "dct2d_transpose", "eval_poly", "eval_poly_2d", "fit_1d", "fit_2d",
    "lsqr_solve", "make_samples", "max_gap", "midpoint_weights", "multilevel_fit",
    "periodic_baseline_fit", "periodic_fit", "relative_error", "residual",
    "synth_experiment",
]
