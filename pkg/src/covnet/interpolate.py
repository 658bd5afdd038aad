"""Edge-set interpolation for an unobserved graph.

Given fitted per-graph values theta_hat for one node pair, the
interpolated entry minimizes the convex piecewise-linear function

    f(x) = lambda1 * |x| + lambda2 * sum_i omega_i * |theta_hat_i - x|

over x, where the non-negative smoothing coefficients omega say how much
each fitted graph should pull on the new one.  There is no likelihood
term because the new graph has no observations.  The minimum is located
with Brent's bounded search on [-max|theta_hat| - 1, max|theta_hat| + 1].

An alternative collapsed form, |omega . theta_hat - x| in place of the
weighted sum, is available via ``mode="aggregate"``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import fminbound

from .errors import DimensionError, InvalidDimension
from .solver import extract_adjacency

BRENT_XTOL = 1e-8

MODES = ("sum", "aggregate")


@dataclass(frozen=True)
class InterpolationSpec:
    """Smoothing coefficients and penalties for graph interpolation."""

    omegas: np.ndarray
    lambda1: float
    lambda2: float

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        object.__setattr__(self, "omegas", om)
        if om.ndim != 1 or om.size == 0:
            raise DimensionError("omegas must be a non-empty vector")
        if not np.isfinite(om).all() or om.min() < 0:
            raise InvalidDimension("omegas must be finite and >= 0")
        if om.max() == 0:
            raise InvalidDimension("at least one omega must be > 0")
        if not np.isfinite(self.lambda1) or self.lambda1 < 0:
            raise InvalidDimension(f"lambda1 must be >= 0, got {self.lambda1}")
        if not np.isfinite(self.lambda2) or self.lambda2 < 0:
            raise InvalidDimension(f"lambda2 must be >= 0, got {self.lambda2}")


def edge_objective(x, theta_hats, spec, mode="sum"):
    """The interpolation objective at ``x``; exposed for direct checks."""
    if mode == "sum":
        smooth = np.sum(spec.omegas * np.abs(theta_hats - x))
    elif mode == "aggregate":
        smooth = abs(float(spec.omegas @ theta_hats) - x)
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return spec.lambda1 * abs(x) + spec.lambda2 * smooth


def interpolate_edge(theta_hats, spec, mode="sum"):
    """Interpolated precision entry for one node pair."""
    theta_hats = np.asarray(theta_hats, dtype=float)
    if theta_hats.shape != spec.omegas.shape:
        raise DimensionError(
            f"{theta_hats.shape[0] if theta_hats.ndim else 0} fitted values for "
            f"{spec.omegas.shape[0]} smoothing coefficients")
    half = float(np.max(np.abs(theta_hats))) + 1.0
    x = fminbound(edge_objective, -half, half, args=(theta_hats, spec, mode),
                  xtol=BRENT_XTOL)
    return float(x)


def interpolate_graph(cvnfit, spec, tau=1e-6, mode="sum"):
    """Adjacency of the interpolated graph from a fit's consensus values.

    Runs :func:`interpolate_edge` on the fitted z-vector of every node
    pair and keeps edges whose interpolated magnitude exceeds ``tau``.
    """
    if spec.omegas.shape[0] != cvnfit.m:
        raise DimensionError(
            f"{spec.omegas.shape[0]} smoothing coefficients for {cvnfit.m} graphs")
    p = cvnfit.p
    theta_new = np.zeros((p, p))
    iu, ju = np.triu_indices(p, 1)
    for s, t in zip(iu, ju):
        value = interpolate_edge(cvnfit.z[:, s, t], spec, mode=mode)
        theta_new[s, t] = theta_new[t, s] = value
    return extract_adjacency(theta_new, tau)
