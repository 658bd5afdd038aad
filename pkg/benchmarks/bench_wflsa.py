#!/usr/bin/env python3
"""Benchmark the two kernel paths (numba vs pure numpy) on the inner solver.

The numba path loops edge subproblems one at a time with index-based
structure rows; the numpy path advances the whole batch in lockstep with
dense matrix products.  Both produce the same iterate sequence per
subproblem (up to floating-point reassociation), so the comparison is
apples to apples.

Run:  python benchmarks/bench_wflsa.py [--edges 4950] [--repeat 3]
"""

import argparse
import time

import numpy as np

from covnet import weights_grid
from covnet._kernels import _prox_batch_numba, _prox_batch_numpy, backend
from covnet.wflsa import new_state, wflsa_prepare


def run_kernel(kernel, ws, Y):
    state = new_state(ws, Y)
    E = Y.shape[0]
    iters = np.zeros(E, dtype=np.int64)
    conv = np.zeros(E, dtype=np.bool_)
    res_p = np.zeros(E)
    res_d = np.zeros(E)
    t0 = time.perf_counter()
    kernel(Y, ws.structure, ws.row_i, ws.row_j, ws.factorization,
           ws.thresholds, ws.rho_in, ws.tol, ws.max_iter,
           state.B, state.Z, state.U, iters, conv, res_p, res_d)
    elapsed = time.perf_counter() - t0
    return elapsed, state.B, int(iters.sum()), bool(conv.all())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--edges", type=int, default=4950,
                        help="batch size (default: all pairs at p=100)")
    parser.add_argument("--rows", type=int, default=3, help="meta-graph rows")
    parser.add_argument("--cols", type=int, default=3, help="meta-graph cols")
    parser.add_argument("--eta1", type=float, default=0.3)
    parser.add_argument("--eta2", type=float, default=0.5)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ws = wflsa_prepare(weights_grid(args.rows, args.cols), args.eta1, args.eta2)
    rng = np.random.default_rng(args.seed)
    Y = np.ascontiguousarray(rng.uniform(-1.5, 1.5, size=(args.edges, ws.m)))

    print(f"batch of {args.edges} subproblems, m={ws.m}, "
          f"K={ws.structure.shape[0]} penalty rows, active backend: {backend()}")

    kernels = [("numpy", _prox_batch_numpy)]
    if _prox_batch_numba is not None:
        run_kernel(_prox_batch_numba, ws, Y)  # compile before timing
        kernels.insert(0, ("numba", _prox_batch_numba))
    else:
        print("numba unavailable or disabled; benchmarking numpy path only")

    results = {}
    for name, kernel in kernels:
        best = None
        for _ in range(args.repeat):
            elapsed, B, total_iters, ok = run_kernel(kernel, ws, Y)
            if best is None or elapsed < best[0]:
                best = (elapsed, B, total_iters, ok)
        results[name] = best
        elapsed, _, total_iters, ok = best
        rate = total_iters / elapsed
        print(f"  {name:>5}: {elapsed * 1e3:8.1f} ms   "
              f"{total_iters} inner iterations ({rate / 1e6:.2f} M it/s)   "
              f"all converged: {ok}")

    if len(results) == 2:
        gap = float(np.max(np.abs(results["numba"][1] - results["numpy"][1])))
        speedup = results["numpy"][0] / results["numba"][0]
        print(f"  numba speedup: {speedup:.1f}x, max |difference|: {gap:.2e}")


if __name__ == "__main__":
    main()
