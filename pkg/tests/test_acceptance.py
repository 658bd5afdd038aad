"""Acceptance suite: every criterion prints one pass/fail line.

The heavy shared computation (20-seed grid study at p=20, m=9) lives in a
module-scoped fixture reused by the oracle-F1, selection-dominance and
convergence-behavior criteria.  Lines are written straight to the real
stderr so they appear regardless of pytest's capture mode.
"""

import sys
import time

import numpy as np
import pytest

from covnet import (CvnProblem, FitOptions, Gammas, GraphData, Penalties,
                    empirical_covariance, extract_adjacency, f1_score, fit,
                    gamma_to_lambda, hamming, interpolate_edge,
                    InterpolationSpec, SimConfig, simulate, split_and_perturb,
                    weights_fgl, weights_grid, weights_zero, wflsa_prepare,
                    wflsa_solve)
from covnet.interpolate import edge_objective
from covnet.tuning import GAMMA_LADDER
from conftest import problem_from_datasets, random_symmetric
from oracles import (fused_grid_scan_1d, fused_grid_scan_2d,
                     glasso_coordinate_descent, interpolation_grid_scan,
                     soft_threshold)


def report(num, slug, ok, detail=""):
    line = f"[acceptance] criterion {num:2d} ({slug}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" — {detail}"
    from conftest import ACCEPTANCE_LINES
    ACCEPTANCE_LINES.append(line)
    print(line, file=sys.__stderr__, flush=True)
    assert ok, line


def problem_from_truth(truth, weights):
    graphs = [GraphData(key=truth.keys[k], n=truth.data.shape[1],
                        cov=empirical_covariance(truth.data[k]))
              for k in range(9)]
    return CvnProblem(p=truth.data.shape[2], m=9, graphs=graphs, weights=weights)


def test_criterion_01_glasso_reduction():
    start = time.perf_counter()
    p, n = 5, 50
    rng = np.random.default_rng(41)
    from covnet import adjacency_to_precision, gen_starting_graph, sample_dataset, invert_pd
    adj = gen_starting_graph(SimConfig(p=p, n=n, pi=0.4, seed=0), rng)
    sigma = invert_pd(adjacency_to_precision(adj, 0.4, 0.1))
    rows = sample_dataset(sigma, n, rng)
    prob = problem_from_datasets([rows])
    lam1 = 4.0
    result = fit(prob, Penalties(lam1, 0.0), FitOptions(eps=1e-7, max_iter=4000))
    theta_cd, _ = glasso_coordinate_descent(prob.graphs[0].cov, 2.0 * lam1 / n)
    max_abs = float(np.max(np.abs(result.theta[0] - theta_cd)))
    adj_match = np.array_equal(result.adjacency[0],
                               extract_adjacency(theta_cd, 1e-6))
    elapsed = time.perf_counter() - start
    report(1, "glasso-reduction",
           result.converged and adj_match and max_abs < 1e-3 and elapsed < 10.0,
           f"max|dTheta|={max_abs:.2e}, adjacency match={adj_match}, {elapsed:.1f}s")


def test_criterion_02_theta_update_exactness():
    from covnet import theta_update
    from covnet.solver import AdmmState
    rng = np.random.default_rng(42)
    worst = 0.0
    all_pd = True
    for _ in range(100):
        p = int(rng.integers(1, 11))
        m = int(rng.integers(1, 4))
        n = int(rng.integers(2, 80))
        rho = float(rng.uniform(0.2, 3.0))
        datasets = [rng.standard_normal((n, p)) for _ in range(m)]
        prob = problem_from_datasets(datasets)
        state = AdmmState(
            theta=np.stack([np.eye(p)] * m),
            z=np.stack([random_symmetric(rng, p) for _ in range(m)]),
            y=np.stack([random_symmetric(rng, p) for _ in range(m)]))
        theta = theta_update(state, prob, rho)
        for i in range(m):
            vals = np.linalg.eigvalsh(theta[i])
            all_pd &= bool(vals.min() > 0)
            res = (0.5 * prob.graphs[i].n
                   * (prob.graphs[i].cov - np.linalg.inv(theta[i]))
                   + rho * (theta[i] - state.z[i] + state.y[i]))
            worst = max(worst, float(np.max(np.abs(res))))
    report(2, "theta-update-exactness", worst < 1e-6 and all_pd,
           f"max stationarity residual {worst:.2e}, all PD={all_pd}")


def test_criterion_03_wflsa_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(43)
    from covnet import WeightMatrix
    # grid-scan agreement at m = 1 and m = 2 (100 instances each)
    worst_scan = 0.0
    for _ in range(100):
        y = rng.uniform(-1, 1, size=1)
        eta1 = float(rng.uniform(0, 1))
        ws = wflsa_prepare(weights_fgl(1), eta1, 0.0)
        beta = wflsa_solve(ws, y)
        scan, _ = fused_grid_scan_1d(y, eta1)
        worst_scan = max(worst_scan, float(np.max(np.abs(beta - scan))))
    for _ in range(100):
        y = rng.uniform(-1, 1, size=2)
        eta1 = float(rng.uniform(0, 0.6))
        eta2 = float(rng.uniform(0, 0.6))
        w12 = float(rng.uniform(0.2, 1.0))
        ws = wflsa_prepare(WeightMatrix(m=2, w=np.array([[0.0, w12], [w12, 0.0]])),
                           eta1, eta2)
        beta = wflsa_solve(ws, y)
        scan, _ = fused_grid_scan_2d(y, eta1, eta2, w12)
        worst_scan = max(worst_scan, float(np.max(np.abs(beta - scan))))
    # analytic soft-thresholding at eta2 = 0 (100 instances)
    worst_soft = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 7))
        eta1 = float(rng.uniform(0.05, 1.5))
        y = rng.uniform(-3, 3, size=m)
        ws = wflsa_prepare(weights_fgl(m), eta1, 0.0)
        beta = wflsa_solve(ws, y)
        worst_soft = max(worst_soft, float(np.max(np.abs(beta - soft_threshold(y, eta1)))))
    # fusion limit (100 instances)
    worst_spread = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 7))
        y = rng.uniform(-2, 2, size=m)
        eta2 = 10.0 * float(np.max(np.abs(y))) + 1.0
        ws = wflsa_prepare(weights_fgl(m), float(rng.uniform(0, 0.5)), eta2)
        beta = wflsa_solve(ws, y)
        worst_spread = max(worst_spread, float(np.max(beta) - np.min(beta)))
    elapsed = time.perf_counter() - start
    report(3, "wflsa-oracle",
           worst_scan < 2e-4 and worst_soft < 1e-6 and worst_spread < 1e-6
           and elapsed < 60.0,
           f"scan {worst_scan:.2e}, soft {worst_soft:.2e}, "
           f"spread {worst_spread:.2e}, {elapsed:.1f}s")


def test_criterion_04_full_fusion_fit():
    truth = simulate(SimConfig(p=20, n=100, pi=0.1, pi1=0.1, pi2=0.1, seed=44))
    prob = problem_from_truth(truth, weights_fgl(9))
    result = fit(prob, Penalties(1.0, 1e4), FitOptions())
    worst = max(hamming(result.adjacency[i], result.adjacency[j])
                for i in range(9) for j in range(i + 1, 9))
    report(4, "full-fusion-fit", worst == 0,
           f"max pairwise Hamming distance {worst}")


@pytest.fixture(scope="module")
def grid_study():
    """20-seed study on ER(p=20, n=100, pi=.1, pi1=pi2=.1): every gamma grid
    cell fitted under the lattice weights and under no smoothing.

    With zero weights gamma2 has no effect, so the 6 distinct gamma1 fits
    represent the full 36-cell grid; rows are replicated across gamma2 so
    selection and convergence accounting see the whole grid.
    """
    t0 = time.perf_counter()
    records = []
    for seed in range(1, 21):
        truth = simulate(SimConfig(p=20, n=100, pi=0.1, pi1=0.1, pi2=0.1,
                                   seed=seed))
        truth_adj = list(truth.adjacency)
        for wname, weights in (("grid", weights_grid(3, 3)),
                               ("zero", weights_zero(9))):
            prob = problem_from_truth(truth, weights)
            if wname == "zero":
                fits = {}
                for g1 in GAMMA_LADDER:
                    pen = gamma_to_lambda(Gammas(g1, 0.0), 9, 20)
                    fits[g1] = fit(prob, pen, FitOptions())
                cell_fit = {(g1, g2): fits[g1]
                            for g1 in GAMMA_LADDER for g2 in GAMMA_LADDER}
            else:
                cell_fit = {}
                for g1 in GAMMA_LADDER:
                    for g2 in GAMMA_LADDER:
                        pen = gamma_to_lambda(Gammas(g1, g2), 9, 20)
                        cell_fit[(g1, g2)] = fit(prob, pen, FitOptions())
            from covnet import aic as aic_fn, bic as bic_fn
            for (g1, g2), f in cell_fit.items():
                records.append({
                    "seed": seed, "weights": wname, "gamma1": g1, "gamma2": g2,
                    "converged": f.converged,
                    "f1": f1_score(truth_adj, list(f.adjacency)),
                    "aic": aic_fn(f, prob), "bic": bic_fn(f, prob),
                })
    return {"records": records, "seconds": time.perf_counter() - t0}


def _oracle(records):
    best = max(records, key=lambda r: (r["f1"], r["gamma1"], r["gamma2"]))
    return best["f1"]


def _selected(records, criterion):
    usable = [r for r in records if r["converged"]]
    if not usable:
        return None
    return min(usable, key=lambda r: (r[criterion], -r["gamma1"], -r["gamma2"]))


def test_criterion_05_smoothing_benefit(grid_study):
    records = grid_study["records"]
    means = {}
    for wname in ("grid", "zero"):
        oracle_scores = []
        for seed in range(1, 21):
            cell = [r for r in records
                    if r["seed"] == seed and r["weights"] == wname]
            oracle_scores.append(_oracle(cell))
        means[wname] = float(np.mean(oracle_scores))
    ok = means["grid"] >= means["zero"] - 0.02
    budget_ok = grid_study["seconds"] < 30 * 60
    report(5, "smoothing-benefit", ok and budget_ok,
           f"mean oracle F1: lattice {means['grid']:.4f} vs none "
           f"{means['zero']:.4f}, study took {grid_study['seconds'] / 60:.1f} min")


def test_criterion_06_oracle_dominance(grid_study):
    records = grid_study["records"]
    violations = 0
    checked = 0
    for seed in range(1, 21):
        for wname in ("grid", "zero"):
            cell = [r for r in records
                    if r["seed"] == seed and r["weights"] == wname]
            oracle = _oracle(cell)
            for criterion in ("aic", "bic"):
                sel = _selected(cell, criterion)
                if sel is None:
                    continue
                checked += 1
                if not sel["f1"] <= oracle:
                    violations += 1
    report(6, "oracle-dominance", violations == 0,
           f"{checked} selections checked, {violations} above the oracle")


def test_criterion_07_interpolation():
    rng = np.random.default_rng(47)
    worst_gap = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 6))
        theta = rng.uniform(-2, 2, size=m)
        omegas = rng.uniform(0.1, 2.0, size=m)
        lam1 = float(rng.uniform(0.0, 2.0))
        lam2 = float(rng.uniform(0.0, 2.0))
        spec = InterpolationSpec(omegas=omegas, lambda1=lam1, lambda2=lam2)
        x = interpolate_edge(theta, spec)
        _, best = interpolation_grid_scan(theta, omegas, lam1, lam2, step=1e-5)
        worst_gap = max(worst_gap, edge_objective(x, theta, spec) - best)
    worst_convexity = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 5))
        theta = rng.uniform(-2, 2, size=m)
        spec = InterpolationSpec(omegas=rng.uniform(0, 2, size=m) + 1e-3,
                                 lambda1=float(rng.uniform(0, 2)),
                                 lambda2=float(rng.uniform(0, 2)))
        x1, x2 = rng.uniform(-4, 4, size=2)
        alpha = float(rng.uniform(0, 1))
        gap = (edge_objective(alpha * x1 + (1 - alpha) * x2, theta, spec)
               - alpha * edge_objective(x1, theta, spec)
               - (1 - alpha) * edge_objective(x2, theta, spec))
        worst_convexity = max(worst_convexity, gap)
    report(7, "interpolation", worst_gap < 1e-4 and worst_convexity <= 1e-12,
           f"objective gap {worst_gap:.2e}, convexity excess {worst_convexity:.2e}")


def test_criterion_08_simulator_invariants():
    eig_ok = True
    for seed in (48, 480):
        truth = simulate(SimConfig(p=15, n=5, pi=0.25, pi1=0.2, pi2=0.1,
                                   seed=seed))
        for k in range(9):
            lam = np.linalg.eigvalsh(truth.precision[k])[0]
            eig_ok &= abs(lam - 0.2) < 1e-8
    # block-change discipline, exact
    rng = np.random.default_rng(48)
    from covnet import gen_starting_graph
    start = gen_starting_graph(SimConfig(p=15, n=5, pi=0.3, seed=0), rng)
    keys, stack = split_and_perturb(start, 3, 2, rng)
    idx = {key: k for k, key in enumerate(keys)}
    q = 8
    block_ok = True
    for i in (1, 2):
        for j in (1, 2, 3):
            d = stack[idx[(str(i), str(j))]] != stack[idx[(str(i + 1), str(j))]]
            block_ok &= not d[q:, q:].any() and not d[:q, q:].any()
            block_ok &= int(np.triu(d[:q, :q], 1).sum()) == 3
    for i in (1, 2, 3):
        for j in (1, 2):
            d = stack[idx[(str(i), str(j))]] != stack[idx[(str(i), str(j + 1))]]
            block_ok &= not d[:q, :q].any() and not d[:q, q:].any()
            block_ok &= int(np.triu(d[q:, q:], 1).sum()) == 2
    cfg = SimConfig(p=12, n=6, pi=0.3, pi1=0.1, pi2=0.2, seed=49)
    a, b = simulate(cfg), simulate(cfg)
    bitwise = (np.array_equal(a.adjacency, b.adjacency)
               and np.array_equal(a.precision, b.precision)
               and np.array_equal(a.covariance, b.covariance)
               and np.array_equal(a.data, b.data))
    report(8, "simulator-invariants", eig_ok and block_ok and bitwise,
           f"eigenvalue 0.2 ok={eig_ok}, block discipline ok={block_ok}, "
           f"bitwise reproducible={bitwise}")


def test_criterion_09_convergence_behavior(grid_study):
    # ">= 90% of grid cells" pooled over all study instances; the heavy-
    # smoothing corner cells on a few seeds legitimately exceed 1000
    # iterations at rho = 1 and are reported, never dropped
    records = grid_study["records"]
    fractions = []
    for seed in range(1, 21):
        for wname in ("grid", "zero"):
            cell = [r for r in records
                    if r["seed"] == seed and r["weights"] == wname]
            assert len(cell) == 36  # every cell reported, none dropped
            fractions.append(np.mean([r["converged"] for r in cell]))
    pooled = float(np.mean([r["converged"] for r in records]))
    nonconv = sum(1 for r in records if not r["converged"])
    report(9, "convergence-behavior", pooled >= 0.90,
           f"pooled converged fraction {pooled:.3f} over {len(records)} cells "
           f"({nonconv} non-converged reported, worst instance "
           f"{min(fractions):.3f})")


def test_criterion_10_complexity_smoke():
    pen = Penalties(2.0, 1.0)

    def timed_fit(p, m, weights, seed):
        truth_rng = np.random.default_rng(seed)
        datasets = [truth_rng.standard_normal((60, p)) for _ in range(m)]
        prob = problem_from_datasets(datasets, weights=weights)
        opts = FitOptions(eps=1e-300, max_iter=15)
        best_total, best_z = np.inf, np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            result = fit(prob, pen, opts)
            total = time.perf_counter() - t0
            best_total = min(best_total, total)
            best_z = min(best_z, result.diagnostics.z_seconds)
        return best_total, best_z

    timed_fit(20, 9, weights_grid(3, 3), seed=1)  # warm the kernels
    t20, _ = timed_fit(20, 9, weights_grid(3, 3), seed=2)
    t40, _ = timed_fit(40, 9, weights_grid(3, 3), seed=3)
    p_ratio = t40 / t20
    from covnet import weights_tvgl
    _, z4 = timed_fit(20, 4, weights_tvgl(4), seed=4)
    _, z8 = timed_fit(20, 8, weights_tvgl(8), seed=5)
    m_ratio = z8 / z4
    report(10, "complexity-smoke", p_ratio < 12.0 and m_ratio < 6.0,
           f"p 20->40 wall ratio {p_ratio:.1f} (< 12), "
           f"m 4->8 z-step ratio {m_ratio:.1f} (< 6)")
