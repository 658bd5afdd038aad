"""Hot numerical kernels: the batched inner-solver iteration.

Two interchangeable implementations live here:

* a numba ``@njit`` kernel that loops over edge subproblems one at a time,
  exploiting that every penalty row touches at most two coordinates
  (a coordinate row e_i or a difference row e_i - e_j), and
* a pure-numpy fallback that advances all unconverged subproblems in
  lockstep with dense matrix products, freezing each one as soon as its
  own residuals drop below tolerance, so every subproblem follows the
  same iterate sequence as the per-edge loop.

Set the environment variable ``COVNET_DISABLE_NUMBA=1`` to force the numpy
path; it is also selected automatically when numba is not installed.
``benchmarks/bench_wflsa.py`` compares the two.

Each subproblem is the weighted form

    min_b  0.5 * ||y - b||^2 + sum_r  t_r * |E_r b|

with unit-structure rows E_r and per-row penalty magnitudes t_r, solved by
splitting on z = E b:

    b <- (I + rho E^T E)^{-1} (y + rho E^T (z - u))      (cached Cholesky L)
    z_r <- soft(E_r b + u_r, t_r / rho)
    u <- u + E b - z

with infinity-norm stopping on the primal residual E b - z and the dual
residual rho * E^T (z - z_prev).  Keeping the penalty magnitudes in the
thresholds rather than in the rows keeps the iteration's conditioning
independent of the penalty size.
"""

import os

import numpy as np
from scipy.linalg import solve_triangular

_DISABLED = os.environ.get("COVNET_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if not _DISABLED:
    try:
        from numba import njit
    except ImportError:
        _DISABLED = True


def backend():
    """Name of the active kernel path: 'numba' or 'numpy'."""
    return "numpy" if _DISABLED else "numba"


def _prox_batch_numpy(Y, E, row_i, row_j, L, thresh, rho, tol, max_iter,
                      B, Z, U, iters, converged, res_p, res_d):
    """Lockstep batch iteration; rows are frozen once their residuals pass."""
    kappa = thresh / rho
    active = np.arange(B.shape[0])
    it = 0
    while active.size and it < max_iter:
        it += 1
        V = Y[active] + rho * (Z[active] - U[active]) @ E
        T = solve_triangular(L, V.T, lower=True, check_finite=False)
        Bact = solve_triangular(L.T, T, lower=False, check_finite=False).T
        W = Bact @ E.T
        S = W + U[active]
        Znew = np.maximum(S - kappa, 0.0) + np.minimum(S + kappa, 0.0)
        r_primal = np.abs(W - Znew).max(axis=1)
        s_dual = rho * np.abs((Znew - Z[active]) @ E).max(axis=1)
        U[active] += W - Znew
        Z[active] = Znew
        B[active] = Bact
        iters[active] = it
        res_p[active] = r_primal
        res_d[active] = s_dual
        done = (r_primal < tol) & (s_dual < tol)
        if done.any():
            converged[active[done]] = True
            active = active[~done]


if not _DISABLED:

    @njit(cache=True)
    def _prox_batch_numba(Y, E, row_i, row_j, L, thresh, rho, tol, max_iter,
                          B, Z, U, iters, converged, res_p, res_d):
        n_rows, m = B.shape
        K = row_i.shape[0]
        v = np.empty(m)
        t = np.empty(m)
        beta = np.empty(m)
        dz = np.empty(K)
        for e in range(n_rows):
            for it in range(1, max_iter + 1):
                # v = y + rho * E^T (z - u); rows touch <= 2 coordinates
                for a in range(m):
                    v[a] = Y[e, a]
                for r in range(K):
                    s = rho * (Z[e, r] - U[e, r])
                    v[row_i[r]] += s
                    if row_j[r] >= 0:
                        v[row_j[r]] -= s
                # beta-step: solve (L L^T) beta = v
                for i in range(m):
                    acc = v[i]
                    for j in range(i):
                        acc -= L[i, j] * t[j]
                    t[i] = acc / L[i, i]
                for i in range(m - 1, -1, -1):
                    acc = t[i]
                    for j in range(i + 1, m):
                        acc -= L[j, i] * beta[j]
                    beta[i] = acc / L[i, i]
                # z-step, u-step, primal residual
                r_primal = 0.0
                for r in range(K):
                    if row_j[r] >= 0:
                        w = beta[row_i[r]] - beta[row_j[r]]
                    else:
                        w = beta[row_i[r]]
                    s = w + U[e, r]
                    kappa = thresh[r] / rho
                    if s > kappa:
                        zn = s - kappa
                    elif s < -kappa:
                        zn = s + kappa
                    else:
                        zn = 0.0
                    rp = abs(w - zn)
                    if rp > r_primal:
                        r_primal = rp
                    dz[r] = zn - Z[e, r]
                    U[e, r] += w - zn
                    Z[e, r] = zn
                # dual residual rho * ||E^T dz||_inf via scatter
                for a in range(m):
                    v[a] = 0.0
                for r in range(K):
                    v[row_i[r]] += dz[r]
                    if row_j[r] >= 0:
                        v[row_j[r]] -= dz[r]
                s_dual = 0.0
                for a in range(m):
                    sd = abs(rho * v[a])
                    if sd > s_dual:
                        s_dual = sd
                for a in range(m):
                    B[e, a] = beta[a]
                iters[e] = it
                res_p[e] = r_primal
                res_d[e] = s_dual
                if r_primal < tol and s_dual < tol:
                    converged[e] = True
                    break

else:
    _prox_batch_numba = None


def prox_batch(Y, E, row_i, row_j, L, thresh, rho, tol, max_iter,
               B, Z, U, iters, converged, res_p, res_d):
    """Run the active kernel path on a batch of subproblems, in place.

    ``E`` is the dense (K, m) structure matrix used by the numpy path;
    ``row_i``/``row_j`` are its index form (``row_j`` is -1 on coordinate
    rows) used by the numba path.  Both paths fill the per-row output
    slots: iteration counts, convergence flags and final residuals.
    """
    if _DISABLED:
        _prox_batch_numpy(Y, E, row_i, row_j, L, thresh, rho, tol, max_iter,
                          B, Z, U, iters, converged, res_p, res_d)
    else:
        _prox_batch_numba(Y, E, row_i, row_j, L, thresh, rho, tol, max_iter,
                          B, Z, U, iters, converged, res_p, res_d)
