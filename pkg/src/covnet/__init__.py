"""Covariate-varying Gaussian graphical network estimation.

A collection of m sparse precision matrices, one per combination of
discrete covariate levels, is estimated jointly: an L1 penalty controls
sparsity and a weighted meta-graph over the m graphs controls how strongly
related graphs are smoothed toward each other.  The optimizer is an ADMM
whose consensus step reduces to one small fused-signal problem per node
pair.  Companion tools simulate ground truth, select penalties by AIC/BIC,
interpolate unobserved graphs, and score structure recovery.
"""

from ._kernels import backend as kernel_backend
from .errors import (ConvergenceFailure, CovnetError, DegenerateState,
                     DegenerateVariable, DimensionError, EmptyData, EmptyGrid,
                     InvalidDimension, NoConvergedCell, NotPositiveDefinite,
                     NumericError, ParseError)
from .interpolate import InterpolationSpec, interpolate_edge, interpolate_graph
from .matrixcore import (EigenPair, cholesky, empirical_covariance, invert_pd,
                         sym_eigen)
from .metrics import (Confusion, confusion, f1_score, hamming, hamming_matrix,
                      oracle_f1, precision_recall_f1)
from .model import (CvnProblem, Gammas, GraphData, Penalties, WeightMatrix,
                    build_problem, gamma_to_lambda, lambda_to_gamma,
                    weights_fgl, weights_grid, weights_tvgl, weights_zero)
from .simulate import (SimConfig, SimTruth, adjacency_to_precision,
                       gen_starting_graph, sample_dataset, simulate,
                       split_and_perturb)
from .solver import (AdmmState, CvnFit, FitOptions, extract_adjacency, fit,
                     initialize, relative_change, theta_update, y_update,
                     z_update)
from .tuning import (aic, bic, default_gamma_grid, grid_search,
                     neg_log_likelihood)
from .wflsa import WflsaWorkspace, wflsa_prepare, wflsa_solve

__version__ = "0.1.0"

__all__ = [
    "AdmmState", "Confusion", "ConvergenceFailure", "CovnetError", "CvnFit",
    "CvnProblem", "DegenerateState", "DegenerateVariable", "DimensionError",
    "EigenPair", "EmptyData", "EmptyGrid", "FitOptions", "Gammas", "GraphData",
    "InterpolationSpec", "InvalidDimension", "NoConvergedCell",
    "NotPositiveDefinite", "NumericError", "ParseError", "Penalties",
    "SimConfig", "SimTruth", "WeightMatrix", "WflsaWorkspace",
    "adjacency_to_precision", "aic", "bic", "build_problem", "cholesky",
    "confusion", "default_gamma_grid", "empirical_covariance",
    "extract_adjacency", "f1_score", "fit", "gamma_to_lambda",
    "gen_starting_graph", "grid_search", "hamming", "hamming_matrix",
    "initialize", "interpolate_edge", "interpolate_graph", "invert_pd",
    "kernel_backend", "lambda_to_gamma", "neg_log_likelihood", "oracle_f1",
    "precision_recall_f1", "relative_change", "sample_dataset", "simulate",
    "split_and_perturb", "sym_eigen", "theta_update", "weights_fgl",
    "weights_grid", "weights_tvgl", "weights_zero", "wflsa_prepare",
    "wflsa_solve", "y_update", "z_update",
]
