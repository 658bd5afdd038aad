"""Weighted fused-LASSO signal approximation.

Solves, for a vector y over the m graphs,

    min_b  0.5 * ||y - b||^2  +  eta1 * ||b||_1
                              +  eta2 * sum_{i<j} w_ij |b_i - b_j|

by rewriting the penalties as ||D b||_1 with one row ``eta1 * e_i`` per
coordinate (when eta1 > 0) and one row ``eta2 * w_ij * (e_i - e_j)`` per
meta-graph edge with positive weight, then running the splitting iteration
in :mod:`covnet._kernels`.

The kernels split on the unit-structure rows (e_i and e_i - e_j) and
carry the penalty magnitudes as per-row soft thresholds instead of row
scales.  Splitting on the scaled rows themselves is equivalent to per-row
step lengths rho * eta^2, which stalls far beyond any iteration cap when
eta is far from 1 (the dual variable creeps toward the threshold in
steps of size eta * |b|); the threshold form keeps the iteration matrix
I + rho_in * E^T E independent of the penalties, so one Cholesky factor
per meta-graph pattern serves every solve and every penalty size.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceFailure, InvalidDimension
from .matrixcore import mirror_upper

DEFAULT_RHO_IN = 1.0
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 10000


@dataclass(frozen=True)
class WflsaWorkspace:
    """Precomputed penalty matrix and cached factorization.

    Read-only during solving; one workspace serves arbitrarily many
    solves with different targets.  ``penalty_matrix`` describes the
    objective (rows scaled by their penalties, zero rows removed);
    the solver iterates on ``structure`` with ``thresholds`` and the
    Cholesky ``factorization`` of I + rho_in * structure^T structure.
    """

    m: int
    eta1: float
    eta2: float
    weights: np.ndarray          # (m, m) meta-graph weights the rows came from
    penalty_matrix: np.ndarray   # (K, m) scaled rows, zero rows removed
    structure: np.ndarray        # (K, m) the same rows at unit scale
    row_i: np.ndarray            # (K,) first coordinate of each row
    row_j: np.ndarray            # (K,) second coordinate, -1 on coordinate rows
    thresholds: np.ndarray       # (K,) per-row penalty magnitudes
    factorization: np.ndarray    # lower Cholesky of I + rho_in * structure^T structure
    rho_in: float
    tol: float
    max_iter: int


@dataclass
class WflsaState:
    """Per-batch iterate storage (b, split variable, scaled dual)."""

    B: np.ndarray
    Z: np.ndarray
    U: np.ndarray


def wflsa_prepare(w, eta1, eta2, rho_in=DEFAULT_RHO_IN, tol=DEFAULT_TOL,
                  max_iter=DEFAULT_MAX_ITER):
    """Build a reusable workspace for a weight matrix and penalty pair."""
    if eta1 < 0 or eta2 < 0:
        raise InvalidDimension("penalties eta1, eta2 must be >= 0")
    if rho_in <= 0:
        raise InvalidDimension("rho_in must be > 0")
    wm = np.asarray(w.w, dtype=float)
    m = w.m
    rows = []
    scales = []
    first = []
    second = []
    if eta1 > 0:
        rows.extend(np.eye(m))
        scales.extend([eta1] * m)
        first.extend(range(m))
        second.extend([-1] * m)
    if eta2 > 0:
        for i in range(m):
            for j in range(i + 1, m):
                if wm[i, j] > 0:
                    row = np.zeros(m)
                    row[i] = 1.0
                    row[j] = -1.0
                    rows.append(row)
                    scales.append(eta2 * wm[i, j])
                    first.append(i)
                    second.append(j)
    structure = np.array(rows) if rows else np.zeros((0, m))
    thresholds = np.array(scales, dtype=float)
    M = np.eye(m) + rho_in * structure.T @ structure
    factor = np.linalg.cholesky(mirror_upper(M))
    return WflsaWorkspace(m=m, eta1=float(eta1), eta2=float(eta2),
                          weights=wm,
                          penalty_matrix=thresholds[:, None] * structure,
                          structure=structure,
                          row_i=np.array(first, dtype=np.int64),
                          row_j=np.array(second, dtype=np.int64),
                          thresholds=thresholds,
                          factorization=factor, rho_in=float(rho_in),
                          tol=float(tol), max_iter=int(max_iter))


def new_state(ws, Y):
    """Cold-start iterates for a batch of targets ``Y`` (E, m): the split
    variable and the scaled dual start at zero."""
    Y = np.ascontiguousarray(Y, dtype=float)
    B = Y.copy()
    Z = np.zeros((Y.shape[0], ws.structure.shape[0]))
    U = np.zeros_like(Z)
    return WflsaState(B=B, Z=Z, U=U)


def solve_batch(ws, Y, state=None):
    """Solve a batch of subproblems sharing one workspace.

    Parameters
    ----------
    ws : WflsaWorkspace
    Y : ndarray, shape (E, m)
        One target vector per row.
    state : WflsaState, optional
        Warm-start iterates from a previous call; cold-started when
        omitted.  Updated in place.

    Returns
    -------
    B : ndarray, shape (E, m)
        Solutions (the state's ``B`` array).
    iters : ndarray of int, shape (E,)
    converged : ndarray of bool, shape (E,)
    residuals : tuple of ndarray
        Final (primal, dual) infinity-norm residuals per row.
    """
    Y = np.ascontiguousarray(Y, dtype=float)
    E = Y.shape[0]
    iters = np.zeros(E, dtype=np.int64)
    converged = np.ones(E, dtype=np.bool_)
    res_p = np.zeros(E)
    res_d = np.zeros(E)
    if ws.structure.shape[0] == 0:
        # no active penalty rows: the objective is 0.5||y - b||^2
        if state is None:
            state = new_state(ws, Y)
        state.B[:] = Y
        return state.B, iters, converged, (res_p, res_d)
    if state is None:
        state = new_state(ws, Y)
    converged[:] = False
    _kernels.prox_batch(Y, ws.structure, ws.row_i, ws.row_j, ws.factorization,
                        ws.thresholds, ws.rho_in, ws.tol, ws.max_iter,
                        state.B, state.Z, state.U, iters, converged,
                        res_p, res_d)
    return state.B, iters, converged, (res_p, res_d)


def wflsa_solve(ws, y):
    """Solve a single subproblem; deterministic for fixed inputs.

    Raises
    ------
    ConvergenceFailure
        If the iteration cap is hit before both residuals drop below
        ``ws.tol``; carries the last iterate and residuals.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (ws.m,):
        raise InvalidDimension(f"target has shape {y.shape}, workspace has m={ws.m}")
    B, iters, converged, (res_p, res_d) = solve_batch(ws, y[None, :])
    if not converged[0]:
        raise ConvergenceFailure(
            f"inner solver hit max_iter={ws.max_iter} "
            f"(primal {res_p[0]:.3e}, dual {res_d[0]:.3e}, tol {ws.tol:.0e})",
            iterate=B[0].copy(), primal_residual=float(res_p[0]),
            dual_residual=float(res_d[0]))
    return B[0].copy()


def objective(ws, y, b):
    """Objective value at ``b``; used by tests and benchmarks."""
    y = np.asarray(y, dtype=float)
    b = np.asarray(b, dtype=float)
    iu, ju = np.triu_indices(ws.m, 1)
    pair = np.sum(ws.weights[iu, ju] * np.abs(b[iu] - b[ju]))
    return 0.5 * np.sum((y - b) ** 2) + ws.eta1 * np.sum(np.abs(b)) + ws.eta2 * pair
