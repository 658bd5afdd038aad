"""Dense symmetric-matrix primitives.

All matrices are plain ``float64`` ndarrays.  Symmetry is enforced
structurally: every constructor mirrors the upper triangle into the lower
one, so ``a[s, t] == a[t, s]`` holds exactly and floating-point drift can
never break it.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionError, NotPositiveDefinite, NumericError

# Cholesky pivots at or below this value are treated as zero; matrices
# built by the simulator have smallest eigenvalue 0.2, far above it.
PD_PIVOT_TOL = 1e-12


def mirror_upper(a):
    """Copy the upper triangle of ``a`` onto the lower one, in place.

    Works on a single (p, p) matrix or a stack (..., p, p).  Returns ``a``.
    """
    il = np.tril_indices(a.shape[-1], -1)
    a[..., il[0], il[1]] = a[..., il[1], il[0]]
    return a


@dataclass
class EigenPair:
    """Spectral decomposition ``vectors @ diag(values) @ vectors.T``.

    ``values`` are ascending; each eigenvector's first non-zero component
    is positive, which makes the decomposition deterministic.
    """

    vectors: np.ndarray
    values: np.ndarray


def empirical_covariance(rows):
    """Empirical covariance (1/n) * sum of outer products x_j x_j^T.

    No mean-centering is applied; the data are assumed centered.

    Parameters
    ----------
    rows : ndarray, shape (n, p)
        One observation per row.

    Returns
    -------
    ndarray, shape (p, p)
        Exactly symmetric positive semidefinite matrix.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
        raise DimensionError(f"need an (n, p) matrix with n, p >= 1, got shape {rows.shape}")
    if not np.isfinite(rows).all():
        raise NumericError("data matrix contains non-finite entries")
    cov = rows.T @ rows / rows.shape[0]
    return mirror_upper(cov)


def sym_eigen(a):
    """Full spectral decomposition of a symmetric matrix.

    Eigenvalues come out in ascending order.  Each eigenvector is flipped
    so its first component larger than 1e-12 in magnitude is positive,
    giving a deterministic sign convention.
    """
    a = np.asarray(a, dtype=float)
    if not np.isfinite(a).all():
        raise NumericError("input to sym_eigen contains non-finite entries")
    values, vectors = np.linalg.eigh(a)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = col[np.abs(col) > 1e-12]
        if lead.size and lead[0] < 0:
            vectors[:, j] = -col
    return EigenPair(vectors=vectors, values=values)


def cholesky(a):
    """Lower-triangular L with L @ L.T == a.

    Raises
    ------
    NotPositiveDefinite
        If the factorization fails or any pivot (squared diagonal of L)
        is <= 1e-12.
    """
    a = np.asarray(a, dtype=float)
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix is not positive definite: {exc}") from None
    pivots = np.diagonal(lower) ** 2
    if pivots.size and pivots.min() <= PD_PIVOT_TOL:
        raise NotPositiveDefinite(
            f"matrix is numerically singular (pivot {pivots.min():.3e} <= {PD_PIVOT_TOL:.0e})"
        )
    return lower


def invert_pd(a):
    """Inverse of a symmetric positive definite matrix.

    The PD check goes through :func:`cholesky`, so non-PD input raises
    NotPositiveDefinite.  The result is exactly symmetric.
    """
    lower = cholesky(a)
    linv = solve_triangular(lower, np.eye(lower.shape[0]), lower=True)
    inv = linv.T @ linv
    return mirror_upper(inv)
