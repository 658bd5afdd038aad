"""Problem definition: datasets per covariate combination, meta-graph weights,
and the two penalty parameterizations.

A problem consists of m graphs, one per distinct combination of discrete
covariate levels.  Graphs are ordered lexicographically by their level
labels; the meta-graph weight matrix W follows the same ordering.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError, EmptyData, InvalidDimension, ParseError
from .matrixcore import empirical_covariance


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric m x m meta-graph adjacency with entries in [0, 1], zero diagonal."""

    m: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.shape != (self.m, self.m):
            raise DimensionError(f"weight matrix shape {w.shape} != ({self.m}, {self.m})")
        if not np.isfinite(w).all():
            raise DimensionError("weight matrix has non-finite entries")
        if not np.array_equal(w, w.T):
            raise DimensionError("weight matrix is not symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise DimensionError("weight matrix diagonal must be exactly zero")
        if w.min(initial=0.0) < 0.0 or w.max(initial=0.0) > 1.0:
            raise DimensionError("weight matrix entries must lie in [0, 1]")


@dataclass(frozen=True)
class GraphData:
    """Per-graph data: covariate level labels, sample count and covariance."""

    key: tuple
    n: int
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "key", tuple(str(k) for k in self.key))
        if self.n < 1:
            raise DimensionError(f"graph {self.key}: need n >= 1, got {self.n}")
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "cov", cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise DimensionError(f"graph {self.key}: covariance must be square")
        if not np.isfinite(cov).all():
            raise DimensionError(f"graph {self.key}: covariance has non-finite entries")
        if not np.array_equal(cov, cov.T):
            raise DimensionError(f"graph {self.key}: covariance is not symmetric")
        floor = -1e-8 * max(1.0, float(np.abs(cov).max(initial=0.0)))
        if np.linalg.eigvalsh(cov)[0] < floor:
            raise DimensionError(f"graph {self.key}: covariance is not PSD")

    @property
    def p(self):
        return self.cov.shape[0]


@dataclass(frozen=True)
class CvnProblem:
    """Full estimation input: m graphs plus the meta-graph weight matrix."""

    p: int
    m: int
    graphs: list
    weights: WeightMatrix
    variables: tuple = None  # optional variable names, for error messages and echo

    def __post_init__(self):
        if len(self.graphs) != self.m:
            raise DimensionError(f"expected {self.m} graphs, got {len(self.graphs)}")
        for g in self.graphs:
            if g.p != self.p:
                raise DimensionError(
                    f"graph {g.key} has p={g.p}, problem has p={self.p}"
                )
        keys = [g.key for g in self.graphs]
        if len(set(keys)) != len(keys):
            raise DimensionError("graph keys are not distinct")
        if self.weights.m != self.m:
            raise DimensionError(
                f"weight matrix is {self.weights.m}x{self.weights.m} but there are {self.m} graphs"
            )

    @property
    def keys(self):
        return [g.key for g in self.graphs]

    @property
    def ns(self):
        return np.array([g.n for g in self.graphs])

    @property
    def covs(self):
        return np.stack([g.cov for g in self.graphs])

    def with_weights(self, weights):
        return replace(self, weights=weights)


def _check_penalty(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise InvalidDimension(f"{name} must be finite and >= 0, got {value}")
    return value


@dataclass(frozen=True)
class Penalties:
    """Whole-matrix penalties: lambda1 (sparsity), lambda2 (smoothness)."""

    lambda1: float
    lambda2: float

    def __post_init__(self):
        object.__setattr__(self, "lambda1", _check_penalty(self.lambda1, "lambda1"))
        object.__setattr__(self, "lambda2", _check_penalty(self.lambda2, "lambda2"))


@dataclass(frozen=True)
class Gammas:
    """Per-edge penalties: gamma1 (one edge), gamma2 (one edge pair)."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        object.__setattr__(self, "gamma1", _check_penalty(self.gamma1, "gamma1"))
        object.__setattr__(self, "gamma2", _check_penalty(self.gamma2, "gamma2"))


def gamma_to_lambda(g, m, p):
    """Convert per-edge penalties to whole-matrix ones.

    lambda1 = gamma1 * m p (p-1) / 2 and lambda2 = gamma2 * m (m-1) p (p-1) / 4,
    so gamma1 prices a single potential edge and gamma2 a single pair of
    corresponding edges in two graphs.
    """
    if p < 2:
        raise InvalidDimension(f"need p >= 2, got p={p}")
    if m < 2 and g.gamma2 > 0:
        raise InvalidDimension(f"gamma2 > 0 needs m >= 2 graphs, got m={m}")
    lambda1 = g.gamma1 * m * p * (p - 1) / 2.0
    lambda2 = g.gamma2 * m * (m - 1) * p * (p - 1) / 4.0
    return Penalties(lambda1=lambda1, lambda2=lambda2)


def lambda_to_gamma(pen, m, p):
    """Exact inverse of :func:`gamma_to_lambda`."""
    if p < 2:
        raise InvalidDimension(f"need p >= 2, got p={p}")
    if m < 2 and pen.lambda2 > 0:
        raise InvalidDimension(f"lambda2 > 0 needs m >= 2 graphs, got m={m}")
    gamma1 = 2.0 * pen.lambda1 / (m * p * (p - 1))
    gamma2 = 4.0 * pen.lambda2 / (m * (m - 1) * p * (p - 1)) if m >= 2 else 0.0
    return Gammas(gamma1=gamma1, gamma2=gamma2)


def weights_tvgl(t):
    """Chain meta-graph: consecutive graphs smoothed with weight 1."""
    if t < 1:
        raise InvalidDimension(f"need t >= 1, got {t}")
    w = np.zeros((t, t))
    idx = np.arange(t - 1)
    w[idx, idx + 1] = 1.0
    w[idx + 1, idx] = 1.0
    return WeightMatrix(m=t, w=w)


def weights_fgl(m):
    """Complete meta-graph: every pair of graphs smoothed with weight 1."""
    if m < 1:
        raise InvalidDimension(f"need m >= 1, got {m}")
    w = np.ones((m, m)) - np.eye(m)
    return WeightMatrix(m=m, w=w)


def weights_zero(m):
    """No smoothing: m independent single-graph problems."""
    if m < 1:
        raise InvalidDimension(f"need m >= 1, got {m}")
    return WeightMatrix(m=m, w=np.zeros((m, m)))


def weights_grid(rows, cols):
    """4-neighbor lattice meta-graph, graphs indexed row-major.

    Graph (r, c) sits at index (r-1)*cols + (c-1); weight 1 joins lattice
    neighbors, 0 elsewhere.  ``weights_grid(1, t)`` equals ``weights_tvgl(t)``.
    """
    if rows < 1 or cols < 1:
        raise InvalidDimension(f"need rows, cols >= 1, got {rows}x{cols}")
    m = rows * cols
    w = np.zeros((m, m))
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                w[i, i + 1] = w[i + 1, i] = 1.0
            if r + 1 < rows:
                w[i, i + cols] = w[i + cols, i] = 1.0
    return WeightMatrix(m=m, w=w)


def build_problem(table, covariate_columns, weights=None):
    """Group a long-format table into a CvnProblem.

    Parameters
    ----------
    table : pandas.DataFrame
        One row per observation.  ``covariate_columns`` name the discrete
        covariates; every remaining column is a numeric variable.
    covariate_columns : list of str
    weights : WeightMatrix, optional
        Meta-graph weights; defaults to the zero matrix (no smoothing).

    Groups are ordered lexicographically by their level labels.  Rows
    within a group are put into a canonical (sorted) order before the
    covariance is computed, so shuffling the input rows yields an
    identical problem.
    """
    import pandas as pd

    if len(table) == 0:
        raise EmptyData("dataset has no rows")
    for col in covariate_columns:
        if col not in table.columns:
            raise DimensionError(f"covariate column {col!r} not in table")
    var_columns = [c for c in table.columns if c not in covariate_columns]
    if not var_columns:
        raise DimensionError("table has no variable columns")

    values = np.empty((len(table), len(var_columns)))
    for j, col in enumerate(var_columns):
        parsed = pd.to_numeric(table[col], errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(parsed)
        if bad.any():
            row = int(np.argmax(bad))
            raise ParseError(
                f"non-numeric value in row {table.index[row]}, column {col!r}: "
                f"{table[col].iloc[row]!r}"
            )
        values[:, j] = parsed

    labels = [tuple(str(v) for v in combo)
              for combo in table[list(covariate_columns)].itertuples(index=False, name=None)]
    groups = {}
    for i, key in enumerate(labels):
        groups.setdefault(key, []).append(i)

    graphs = []
    for key in sorted(groups):
        block = values[groups[key]]
        block = block[np.lexsort(block.T[::-1])]  # canonical row order
        graphs.append(GraphData(key=key, n=block.shape[0],
                                cov=empirical_covariance(block)))
    m = len(graphs)
    if weights is None:
        weights = weights_zero(m)
    return CvnProblem(p=len(var_columns), m=m, graphs=graphs, weights=weights,
                      variables=tuple(var_columns))
