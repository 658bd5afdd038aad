"""Structure-recovery metrics: confusion counts, F1, Hamming distances.

All counts run over unordered node pairs (s < t) and sum over the graphs
of the collection, so a single score describes the whole network family.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyGrid


@dataclass(frozen=True)
class Confusion:
    """Edge-detection counts summed over all graphs and node pairs."""

    tp: int
    fp: int
    fn: int


def _check_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"adjacency shapes differ or are not square: {a.shape} vs {b.shape}")
    return a, b


def confusion(truth, est):
    """TP/FP/FN of an estimated graph list against the true one."""
    if len(truth) != len(est):
        raise DimensionError(f"got {len(truth)} true graphs but {len(est)} estimates")
    tp = fp = fn = 0
    for t, e in zip(truth, est):
        t, e = _check_pair(t, e)
        iu, ju = np.triu_indices(t.shape[0], 1)
        tv = t[iu, ju] != 0
        ev = e[iu, ju] != 0
        tp += int(np.count_nonzero(tv & ev))
        fp += int(np.count_nonzero(~tv & ev))
        fn += int(np.count_nonzero(tv & ~ev))
    return Confusion(tp=tp, fp=fp, fn=fn)


def precision_recall_f1(c):
    """(precision, recall, F1) with the 0/0 convention mapped to 0."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def f1_score(truth, est):
    """Shorthand for the F1 of an estimated graph list."""
    return precision_recall_f1(confusion(truth, est))[2]


def hamming(a, b):
    """Number of node pairs whose edge status differs between two graphs."""
    a, b = _check_pair(a, b)
    iu, ju = np.triu_indices(a.shape[0], 1)
    return int(np.count_nonzero((a[iu, ju] != 0) != (b[iu, ju] != 0)))


def hamming_matrix(adjacencies):
    """Pairwise Hamming distances of a graph list as an m x m array."""
    m = len(adjacencies)
    out = np.zeros((m, m), dtype=int)
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = hamming(adjacencies[i], adjacencies[j])
    return out


def oracle_f1(truth, grid_estimates):
    """Best F1 over a grid of estimates, given the true graphs.

    Parameters
    ----------
    truth : list of adjacency matrices
    grid_estimates : iterable of (gamma1, gamma2, estimate_list)

    Returns
    -------
    (best_f1, (gamma1, gamma2))
        Ties break toward larger gamma1, then larger gamma2.
    """
    cells = list(grid_estimates)
    if not cells:
        raise EmptyGrid("no grid estimates supplied")
    scored = [(f1_score(truth, est), g1, g2) for g1, g2, est in cells]
    best = max(scored, key=lambda row: (row[0], row[1], row[2]))
    return best[0], (best[1], best[2])
