"""Ground-truth generator: a 3x3 covariate grid of related graphs.

A starting graph (Erdos-Renyi or Barabasi-Albert) is split into two node
blocks: the first ceil(p/2) nodes and the rest.  Walking the first
covariate re-draws b1 edges inside block 1, walking the second re-draws b2
edges inside block 2, and the cross-block edges never change, so the nine
cells share a fixed core.  Each adjacency A becomes a precision matrix

    Theta = v * A + (|kappa| + 0.1 + u) * I,   kappa = min eigenvalue of v * A,

whose smallest eigenvalue is u + 0.1 by construction, and each cell gets n
draws from N(0, inverse(Theta)).

All randomness flows from a single seeded generator, so a fixed seed gives
bitwise-identical output.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimension
from .matrixcore import cholesky, invert_pd, mirror_upper

GRAPH_TYPES = ("er", "ba")


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings; ``pi1``/``pi2`` are the fractions of the starting
    graph's edges that change per step of the first/second covariate."""

    p: int
    n: int
    graph_type: str = "er"
    pi: float = 0.1
    pi1: float = 0.1
    pi2: float = 0.1
    v: float = 0.4
    u: float = 0.1
    seed: int = 0
    ba_edges_per_node: int = 1

    def __post_init__(self):
        if self.p < 2:
            raise InvalidDimension(f"need p >= 2, got {self.p}")
        if self.n < 1:
            raise InvalidDimension(f"need n >= 1, got {self.n}")
        if self.graph_type not in GRAPH_TYPES:
            raise InvalidDimension(f"graph_type must be one of {GRAPH_TYPES}")
        for name in ("pi", "pi1", "pi2"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise InvalidDimension(f"{name} must lie in [0, 1], got {val}")
        if self.v <= 0 or self.u <= 0:
            raise InvalidDimension("v and u must be > 0")
        if self.ba_edges_per_node < 1:
            raise InvalidDimension("ba_edges_per_node must be >= 1")


@dataclass
class SimTruth:
    """The nine ground-truth graphs plus the sampled datasets."""

    keys: list                 # [('1','1'), ('1','2'), ...] in lexicographic order
    adjacency: np.ndarray      # (9, p, p) uint8
    precision: np.ndarray      # (9, p, p)
    covariance: np.ndarray     # (9, p, p)
    data: np.ndarray           # (9, n, p)
    b1: int
    b2: int
    config: SimConfig = field(repr=False, default=None)


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def gen_starting_graph(cfg, rng):
    """Random starting adjacency: ER with edge probability pi, or BA
    preferential attachment adding ``ba_edges_per_node`` edges per node."""
    p = cfg.p
    adj = np.zeros((p, p), dtype=np.uint8)
    iu, ju = np.triu_indices(p, 1)
    if cfg.graph_type == "er":
        present = rng.random(iu.size) < cfg.pi
        adj[iu[present], ju[present]] = 1
        adj[ju[present], iu[present]] = 1
        return adj
    # Barabasi-Albert: nodes arrive one by one and attach to existing nodes
    # picked proportionally to degree (repeated-node list trick).
    c = min(cfg.ba_edges_per_node, p - 1)
    targets = list(range(c))
    repeated = []
    for source in range(c, p):
        for t in targets:
            adj[source, t] = adj[t, source] = 1
        repeated.extend(targets)
        repeated.extend([source] * c)
        picked = set()
        while len(picked) < c:
            picked.add(repeated[int(rng.integers(len(repeated)))])
        targets = sorted(picked)
    return adj


def _block_pairs(lo, hi):
    idx = np.arange(lo, hi)
    iu, ju = np.triu_indices(idx.size, 1)
    return idx[iu], idx[ju]


def _toggle_block(adj, lo, hi, b, rng):
    """Toggle b distinct node pairs inside adj[lo:hi, lo:hi], in a copy.

    If the block holds fewer than b edges, every existing edge is toggled
    and the remainder comes from uniformly chosen absent pairs; b is
    capped at the number of pairs in the block.
    """
    out = adj.copy()
    rows, cols = _block_pairs(lo, hi)
    total = rows.size
    b = min(b, total)
    if b == 0:
        return out
    present = out[rows, cols] != 0
    n_edges = int(np.count_nonzero(present))
    if n_edges >= b:
        chosen = rng.choice(total, size=b, replace=False)
    else:
        absent_pos = np.flatnonzero(~present)
        extra = rng.choice(absent_pos.size, size=b - n_edges, replace=False)
        chosen = np.concatenate([np.flatnonzero(present), absent_pos[extra]])
    r, c = rows[chosen], cols[chosen]
    out[r, c] ^= 1
    out[c, r] ^= 1
    return out


def split_and_perturb(start, b1, b2, rng):
    """Build the nine adjacency matrices from a starting graph.

    Returns (keys, stack) where stack[k] belongs to keys[k] = (i, j): the
    block of the first ceil(p/2) nodes is at its i-th perturbation step
    and the complementary block at its j-th; cross-block entries are
    shared by all nine.
    """
    if b1 < 0 or b2 < 0:
        raise InvalidDimension("b1 and b2 must be >= 0")
    start = np.asarray(start, dtype=np.uint8)
    p = start.shape[0]
    q = (p + 1) // 2
    chain1 = [start]
    for _ in range(2):
        chain1.append(_toggle_block(chain1[-1], 0, q, b1, rng))
    chain2 = [start]
    for _ in range(2):
        chain2.append(_toggle_block(chain2[-1], q, p, b2, rng))
    keys = []
    stack = np.empty((9, p, p), dtype=np.uint8)
    k = 0
    for i in range(3):
        for j in range(3):
            a = start.copy()
            a[:q, :q] = chain1[i][:q, :q]
            a[q:, q:] = chain2[j][q:, q:]
            stack[k] = a
            keys.append((str(i + 1), str(j + 1)))
            k += 1
    return keys, stack


def adjacency_to_precision(adj, v, u):
    """Precision matrix v * A with the diagonal raised to |kappa| + 0.1 + u."""
    if v <= 0 or u <= 0:
        raise InvalidDimension("v and u must be > 0")
    scaled = v * np.asarray(adj, dtype=float)
    mirror_upper(scaled)
    kappa = float(np.linalg.eigvalsh(scaled)[0])
    theta = scaled + (abs(kappa) + 0.1 + u) * np.eye(scaled.shape[0])
    return mirror_upper(theta)


def sample_dataset(sigma, n, rng):
    """n rows x = L g with L the Cholesky factor of sigma and g standard normal."""
    lower = cholesky(sigma)
    g = rng.standard_normal((n, sigma.shape[0]))
    return g @ lower.T


def simulate(cfg):
    """Run the full pipeline and return the ground truth plus datasets.

    The edge-change counts are b_k = round(pi_k * |E|) with |E| the
    realized edge count of the generated starting graph.
    """
    rng = np.random.default_rng(cfg.seed)
    start = gen_starting_graph(cfg, rng)
    n_edges = int(np.triu(start, 1).sum())
    b1 = _round_half_up(cfg.pi1 * n_edges)
    b2 = _round_half_up(cfg.pi2 * n_edges)
    keys, adjacency = split_and_perturb(start, b1, b2, rng)
    precision = np.empty((9, cfg.p, cfg.p))
    covariance = np.empty((9, cfg.p, cfg.p))
    data = np.empty((9, cfg.n, cfg.p))
    for k in range(9):
        precision[k] = adjacency_to_precision(adjacency[k], cfg.v, cfg.u)
        covariance[k] = invert_pd(precision[k])
    for k in range(9):
        data[k] = sample_dataset(covariance[k], cfg.n, rng)
    return SimTruth(keys=keys, adjacency=adjacency, precision=precision,
                    covariance=covariance, data=data, b1=b1, b2=b2, config=cfg)
