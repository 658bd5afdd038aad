"""Outer ADMM for the joint network estimator.

The objective over m precision matrices Theta_i is

    sum_i (n_i / 2) * [trace(S_i Theta_i) - log det Theta_i]
      + lambda1 * sum_i   ||Theta_i||_od1
      + lambda2 * sum_i<j w_ij ||Theta_i - Theta_j||_od1

with ||.||_od1 the off-diagonal entrywise L1 norm.  The penalties act on a
consensus copy Z_i = Theta_i, coordinated through scaled duals Y_i.  One
iteration runs three updates:

* Theta: per graph, an exact minimizer via a rescaled eigendecomposition of
  S_i - (2 rho / n_i)(Z_i - Y_i); the rescaled eigenvalues are strictly
  positive, so every iterate is positive definite.
* Z: the diagonal is theta_ss + y_ss; each off-diagonal node pair {s, t}
  yields an m-vector subproblem solved by :mod:`covnet.wflsa` with
  eta1 = lambda1 / rho and eta2 = lambda2 / rho.  All pairs share one
  workspace, and the inner iterates are kept warm across outer iterations.
* Y: Y_i += Theta_i - Z_i.

Iteration stops when sum_i ||Theta_i(k+1) - Theta_i(k)||_1 divided by
sum_i ||Theta_i(k)||_1 drops below ``eps`` (entrywise L1 norms).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConvergenceFailure, DegenerateState, DegenerateVariable,
                     DimensionError, InvalidDimension)
from .matrixcore import mirror_upper
from .model import CvnProblem, Penalties, weights_zero
from .wflsa import (DEFAULT_MAX_ITER, DEFAULT_RHO_IN, DEFAULT_TOL, new_state,
                    solve_batch, wflsa_prepare)

DIAG_TOL = 1e-12


@dataclass
class FitOptions:
    """Knobs for the outer loop (and, prefixed ``inner_``, the edge solver)."""

    rho: float = 1.0
    eps: float = 1e-5
    max_iter: int = 1000
    warmstart: bool = False
    adjacency_tol: float = 1e-6
    inner_rho: float = DEFAULT_RHO_IN
    inner_tol: float = DEFAULT_TOL
    inner_max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.rho <= 0:
            raise InvalidDimension(f"rho must be > 0, got {self.rho}")
        if self.eps <= 0:
            raise InvalidDimension(f"eps must be > 0, got {self.eps}")
        if self.max_iter < 1:
            raise InvalidDimension(f"max_iter must be >= 1, got {self.max_iter}")
        if self.adjacency_tol < 0:
            raise InvalidDimension(f"adjacency_tol must be >= 0, got {self.adjacency_tol}")


@dataclass
class AdmmState:
    """Iterates: primal theta, consensus z, scaled dual y, all (m, p, p)."""

    theta: np.ndarray
    z: np.ndarray
    y: np.ndarray
    iteration: int = 0


@dataclass
class FitDiagnostics:
    """Measured effort, kept for complexity checks and reporting."""

    theta_seconds: float = 0.0
    z_seconds: float = 0.0
    y_seconds: float = 0.0
    inner_iterations: int = 0
    inner_iterations_max: int = 0


@dataclass
class CvnFit:
    """Estimation output: per-graph estimates plus convergence record."""

    p: int
    m: int
    keys: list
    ns: np.ndarray
    penalties: Penalties
    theta: np.ndarray       # (m, p, p) spectral iterates, dense PD
    z: np.ndarray           # (m, p, p) consensus copies carrying the sparsity
    adjacency: np.ndarray   # (m, p, p) uint8, |z| > tau off the diagonal
    tau: float
    rho: float
    eps: float
    iterations: int
    converged: bool
    final_relative_change: float
    gammas: object = None
    diagnostics: FitDiagnostics = field(default_factory=FitDiagnostics)

    def edge_counts(self):
        """Number of edges per graph."""
        return [int(np.triu(a, 1).sum()) for a in self.adjacency]


def initialize(problem, opts, pen=None):
    """Starting iterates: reciprocal-diagonal theta, zero z and y.

    With ``opts.warmstart`` the theta start is instead the lambda2 = 0
    single-graph fit of each graph, which needs the penalties.
    """
    covs = problem.covs
    diags = np.diagonal(covs, axis1=1, axis2=2)
    if np.any(diags <= DIAG_TOL):
        i, j = np.argwhere(diags <= DIAG_TOL)[0]
        name = problem.variables[j] if problem.variables else f"variable {j}"
        raise DegenerateVariable(
            f"{name} has zero empirical variance in graph {problem.graphs[i].key}"
        )
    m, p = problem.m, problem.p
    theta = np.zeros((m, p, p))
    idx = np.arange(p)
    theta[:, idx, idx] = 1.0 / diags
    if opts.warmstart:
        if pen is None:
            raise InvalidDimension("warmstart initialization needs the penalties")
        for i, g in enumerate(problem.graphs):
            sub = CvnProblem(p=p, m=1, graphs=[g], weights=weights_zero(1),
                             variables=problem.variables)
            single = fit(sub, Penalties(pen.lambda1, 0.0),
                         _copy_opts(opts, warmstart=False))
            theta[i] = single.theta[0]
    return AdmmState(theta=theta, z=np.zeros((m, p, p)), y=np.zeros((m, p, p)))


def _copy_opts(opts, **overrides):
    fields = {k: getattr(opts, k) for k in FitOptions.__dataclass_fields__}
    fields.update(overrides)
    return FitOptions(**fields)


def theta_update(state, problem, rho):
    """Exact minimizer of the likelihood-plus-proximity subproblem per graph.

    Decomposes S_i - (2 rho / n_i)(Z_i - Y_i) = Q diag(g) Q^T and rescales
    each eigenvalue g to (n_i / 4 rho) * (sqrt(g^2 + 8 rho / n_i) - g),
    computed in a cancellation-free form.  The result is symmetric positive
    definite and satisfies the stationarity condition

        (n_i / 2)(S_i - Theta_i^{-1}) + rho (Theta_i - Z_i + Y_i) = 0.
    """
    ns = problem.ns.astype(float)
    covs = problem.covs
    shift = (2.0 * rho / ns)[:, None, None]
    M = covs - shift * (state.z - state.y)
    vals, vecs = np.linalg.eigh(M)
    c = (8.0 * rho / ns)[:, None]
    root = np.sqrt(vals * vals + c)
    tvals = np.where(vals >= 0, 2.0 / (root + vals),
                     (ns[:, None] / (4.0 * rho)) * (root - vals))
    assert np.all(tvals > 0), "rescaled eigenvalues must be positive"
    theta = (vecs * tvals[:, None, :]) @ vecs.swapaxes(1, 2)
    return mirror_upper(theta)


def z_update(state, problem, ws, inner_state=None, stats=None):
    """Consensus update: analytic diagonal, one edge subproblem per pair.

    ``inner_state`` carries warm iterates between outer iterations; when
    omitted every subproblem is cold-started, which makes a single call
    match a standalone :func:`covnet.wflsa.wflsa_solve` on the same target.
    """
    p = problem.p
    target = state.theta + state.y
    z = np.zeros_like(target)
    idx = np.arange(p)
    z[:, idx, idx] = target[:, idx, idx]
    iu, ju = np.triu_indices(p, 1)
    if iu.size:
        Y = np.ascontiguousarray(target[:, iu, ju].T)
        B, iters, converged, (res_p, res_d) = solve_batch(ws, Y, state=inner_state)
        if not converged.all():
            e = int(np.argmin(converged))
            raise ConvergenceFailure(
                f"edge subproblem ({iu[e]}, {ju[e]}) hit max_iter={ws.max_iter} "
                f"(primal {res_p[e]:.3e}, dual {res_d[e]:.3e})",
                iterate=B[e].copy(), primal_residual=float(res_p[e]),
                dual_residual=float(res_d[e]), edge=(int(iu[e]), int(ju[e])))
        z[:, iu, ju] = B.T
        z[:, ju, iu] = B.T
        if stats is not None:
            stats.inner_iterations += int(iters.sum())
            stats.inner_iterations_max = max(stats.inner_iterations_max,
                                             int(iters.max()))
    return z


def y_update(state):
    """Scaled dual ascent: Y + (Theta - Z), exact entrywise arithmetic.

    Grouped so that consensus (Theta == Z) leaves Y bitwise unchanged.
    """
    return state.y + (state.theta - state.z)


def relative_change(prev, new):
    """Entrywise-L1 relative change between two theta stacks."""
    prev = np.asarray(prev, dtype=float)
    new = np.asarray(new, dtype=float)
    if prev.shape != new.shape:
        raise DimensionError(f"shape mismatch: {prev.shape} vs {new.shape}")
    denom = np.abs(prev).sum()
    if denom <= 0:
        raise DegenerateState("previous iterate has zero L1 norm")
    return float(np.abs(new - prev).sum() / denom)


def extract_adjacency(z, tau):
    """Binary adjacency: off-diagonal entries of z larger than tau in magnitude."""
    if tau < 0:
        raise InvalidDimension(f"tau must be >= 0, got {tau}")
    z = np.asarray(z, dtype=float)
    adj = (np.abs(z) > tau).astype(np.uint8)
    idx = np.arange(z.shape[-1])
    adj[..., idx, idx] = 0
    return adj


def fit(problem, pen, opts=None):
    """Estimate the m precision matrices for one penalty pair.

    Loops theta/z/y updates until the relative-change criterion drops
    below ``opts.eps`` or ``opts.max_iter`` is reached.  Outer
    non-convergence is reported via ``converged=False``, never raised;
    ConvergenceFailure can only come from an edge subproblem.
    """
    if opts is None:
        opts = FitOptions()
    state = initialize(problem, opts, pen)
    ws = wflsa_prepare(problem.weights,
                       pen.lambda1 / opts.rho, pen.lambda2 / opts.rho,
                       rho_in=opts.inner_rho, tol=opts.inner_tol,
                       max_iter=opts.inner_max_iter)
    diag = FitDiagnostics()
    inner_state = None
    converged = False
    rc = np.inf
    iu, ju = np.triu_indices(problem.p, 1)
    for k in range(1, opts.max_iter + 1):
        t0 = time.perf_counter()
        theta_prev = state.theta
        state.theta = theta_update(state, problem, opts.rho)
        t1 = time.perf_counter()
        if inner_state is None and iu.size:
            target = state.theta + state.y
            inner_state = new_state(ws, np.ascontiguousarray(target[:, iu, ju].T))
        state.z = z_update(state, problem, ws, inner_state=inner_state, stats=diag)
        t2 = time.perf_counter()
        state.y = y_update(state)
        t3 = time.perf_counter()
        diag.theta_seconds += t1 - t0
        diag.z_seconds += t2 - t1
        diag.y_seconds += t3 - t2
        state.iteration = k
        rc = relative_change(theta_prev, state.theta)
        if rc < opts.eps:
            converged = True
            break
    adjacency = extract_adjacency(state.z, opts.adjacency_tol)
    return CvnFit(p=problem.p, m=problem.m, keys=problem.keys,
                  ns=problem.ns.copy(), penalties=pen,
                  theta=state.theta, z=state.z, adjacency=adjacency,
                  tau=opts.adjacency_tol, rho=opts.rho, eps=opts.eps,
                  iterations=state.iteration, converged=converged,
                  final_relative_change=float(rc), diagnostics=diag)
