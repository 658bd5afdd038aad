import numpy as np
import pytest

from covnet import CvnProblem, GraphData, empirical_covariance, weights_zero

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spd(rng, p, jitter=1.0):
    """Random symmetric positive definite matrix M M^T + jitter * I."""
    m = rng.standard_normal((p, p))
    a = m @ m.T + jitter * np.eye(p)
    return (a + a.T) / 2.0


def random_symmetric(rng, p, scale=1.0):
    m = scale * rng.standard_normal((p, p))
    a = (m + m.T) / 2.0
    return (a + a.T) / 2.0


def problem_from_datasets(datasets, keys=None, weights=None, ns=None):
    """Assemble a CvnProblem from raw (n, p) data blocks."""
    graphs = []
    for i, rows in enumerate(datasets):
        key = keys[i] if keys is not None else (str(i + 1),)
        graphs.append(GraphData(key=tuple(key), n=rows.shape[0],
                                cov=empirical_covariance(rows)))
    m = len(graphs)
    if weights is None:
        weights = weights_zero(m)
    return CvnProblem(p=graphs[0].p, m=m, graphs=graphs, weights=weights)
