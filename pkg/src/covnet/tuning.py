"""Information criteria and penalty-grid search.

Both criteria combine the per-graph negative log-likelihood at the dense
estimate with a count of non-zero entries of the sparsified consensus
matrix (diagonal plus both symmetric copies of every detected edge):

    AIC = sum_i  nll_i + 2          * nnz_i
    BIC = sum_i  nll_i + 2 log(n_i) * nnz_i

The grid is expressed in the per-edge parameterization (gamma1, gamma2),
converted per problem size; the canonical grid is the six-point ladder
{1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3} crossed with itself.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGrid, NoConvergedCell
from .matrixcore import cholesky
from .model import Gammas, gamma_to_lambda
from .solver import FitOptions, fit

GAMMA_LADDER = (1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3)


def default_gamma_grid():
    """The canonical (gamma1, gamma2) product grid."""
    return [(g1, g2) for g1 in GAMMA_LADDER for g2 in GAMMA_LADDER]


def neg_log_likelihood(cov, n, theta):
    """(n/2) * [trace(cov @ theta) - log det theta].

    ``theta`` must be positive definite; the log-determinant goes through
    a Cholesky factorization, so non-PD input raises NotPositiveDefinite.
    """
    cov = np.asarray(cov, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lower = cholesky(theta)
    logdet = 2.0 * np.sum(np.log(np.diagonal(lower)))
    return float(0.5 * n * (np.sum(cov * theta) - logdet))


def nonzero_count(z, tau):
    """Non-zero entries of the tau-sparsified matrix: p + 2 * edges."""
    z = np.asarray(z, dtype=float)
    p = z.shape[0]
    iu, ju = np.triu_indices(p, 1)
    return int(p + 2 * np.count_nonzero(np.abs(z[iu, ju]) > tau))


def aic(cvnfit, problem):
    """Akaike criterion of a fit, evaluated against its problem."""
    total = 0.0
    for i, g in enumerate(problem.graphs):
        total += neg_log_likelihood(g.cov, g.n, cvnfit.theta[i])
        total += 2.0 * nonzero_count(cvnfit.z[i], cvnfit.tau)
    return float(total)


def bic(cvnfit, problem):
    """Bayesian criterion; the count term is weighted 2 log(n_i)."""
    total = 0.0
    for i, g in enumerate(problem.graphs):
        total += neg_log_likelihood(g.cov, g.n, cvnfit.theta[i])
        total += 2.0 * np.log(g.n) * nonzero_count(cvnfit.z[i], cvnfit.tau)
    return float(total)


@dataclass
class GridRow:
    """One grid cell: penalties, criteria, and the fit that produced them."""

    gamma1: float
    gamma2: float
    lambda1: float
    lambda2: float
    aic: float
    bic: float
    edge_counts: list
    converged: bool
    fit: object


@dataclass
class GridResult:
    """All grid rows plus the selected cell."""

    rows: list
    best: GridRow
    criterion: str


def grid_search(problem, grid, criterion="aic", opts=None):
    """Fit every (gamma1, gamma2) cell and pick the criterion minimizer.

    Cells are fitted independently (no chaining), so the result does not
    depend on grid order.  Non-converged cells are kept in the rows but
    excluded from selection; ties break toward larger gamma1, then larger
    gamma2 (sparser, smoother).

    Raises
    ------
    EmptyGrid
        If ``grid`` is empty.
    NoConvergedCell
        If no cell converged.
    """
    if criterion not in ("aic", "bic"):
        raise ValueError(f"criterion must be 'aic' or 'bic', got {criterion!r}")
    grid = list(grid)
    if not grid:
        raise EmptyGrid("tuning grid has no cells")
    if opts is None:
        opts = FitOptions()
    rows = []
    for g1, g2 in grid:
        pen = gamma_to_lambda(Gammas(g1, g2), problem.m, problem.p)
        cell_fit = fit(problem, pen, opts)
        cell_fit.gammas = Gammas(g1, g2)
        rows.append(GridRow(
            gamma1=float(g1), gamma2=float(g2),
            lambda1=pen.lambda1, lambda2=pen.lambda2,
            aic=aic(cell_fit, problem), bic=bic(cell_fit, problem),
            edge_counts=cell_fit.edge_counts(),
            converged=cell_fit.converged, fit=cell_fit))
    usable = [r for r in rows if r.converged]
    if not usable:
        raise NoConvergedCell(f"none of the {len(rows)} grid cells converged")
    best = min(usable, key=lambda r: (getattr(r, criterion), -r.gamma1, -r.gamma2))
    return GridResult(rows=rows, best=best, criterion=criterion)
