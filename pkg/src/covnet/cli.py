"""Command-line interface.

Subcommands wire the library into reproducible batch runs:

    covnet simulate   --p 20 --n 100 --graph-type er --pi 0.1 --pi1 0.1 \
                      --pi2 0.1 --seed 7 --out sim/
    covnet fit        --data sim/data.csv --covariates u1,u2 \
                      --weights grid:3x3 --gamma1 1e-4 --gamma2 1e-4 \
                      --out fit.json
    covnet tune       --data sim/data.csv --covariates u1,u2 \
                      --weights grid:3x3 --criterion bic --grid default \
                      --out tune/
    covnet metrics    --truth sim/truth_adjacency.json --fit fit.json \
                      --out metrics.csv
    covnet hamming    --fit fit.json --out hamming.csv
    covnet interpolate --fit fit.json --omega 1,1,0,1,0,0,0,0,0 \
                      --out interp.json

Exit codes: 0 success, 1 I/O or validation error, 2 usage error,
3 non-convergence (the fit file is still written).
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import io
from .errors import CovnetError, DegenerateVariable, NoConvergedCell
from .interpolate import InterpolationSpec, interpolate_graph
from .metrics import confusion, hamming_matrix, oracle_f1, precision_recall_f1
from .model import (Gammas, Penalties, build_problem, gamma_to_lambda,
                    weights_fgl, weights_grid, weights_tvgl, weights_zero)
from .simulate import SimConfig, simulate
from .solver import FitOptions, fit
from .tuning import default_gamma_grid, grid_search

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def _resolve_weights(spec, m):
    """Parse a --weights value: csv path or tvgl:T | fgl:M | grid:RxC | zero:M."""
    kind, _, arg = spec.partition(":")
    if kind == "tvgl":
        return weights_tvgl(int(arg))
    if kind == "fgl":
        return weights_fgl(int(arg))
    if kind == "zero":
        return weights_zero(int(arg))
    if kind == "grid":
        rows, _, cols = arg.partition("x")
        return weights_grid(int(rows), int(cols))
    return io.read_weights_csv(spec)


def _standardize_within_groups(table, covariate_columns):
    """Scale every variable to mean 0, standard deviation 1 within each group."""
    out = table.copy()
    var_columns = [c for c in table.columns if c not in covariate_columns]
    grouped = out.groupby(list(covariate_columns), sort=False)
    for col in var_columns:
        values = pd.to_numeric(out[col], errors="coerce")
        mean = grouped[col].transform(lambda s: pd.to_numeric(s, errors="coerce").mean())
        sd = grouped[col].transform(lambda s: pd.to_numeric(s, errors="coerce").std(ddof=0))
        if (sd <= 0).any() or sd.isna().any():
            raise DegenerateVariable(f"variable {col!r} has zero variance in some group")
        out[col] = (values - mean) / sd
    return out


def _load_problem(args):
    table = pd.read_csv(args.data, dtype=str)
    covariates = [c.strip() for c in args.covariates.split(",") if c.strip()]
    if getattr(args, "standardize", False):
        table = _standardize_within_groups(table, covariates)
    problem = build_problem(table, covariates)
    weights = _resolve_weights(args.weights, problem.m)
    if weights.m != problem.m:
        raise CovnetError(
            f"weight matrix is {weights.m}x{weights.m} but the data contain "
            f"{problem.m} covariate combinations")
    return problem.with_weights(weights)


def _fit_options(args):
    return FitOptions(rho=args.rho, eps=args.eps, max_iter=args.max_iter,
                      warmstart=args.warmstart, adjacency_tol=args.tau)


def _set_threads(threads):
    # caps numba's worker pool; the solver is sequential, so results never
    # depend on this value
    if threads is None:
        return
    import warnings
    try:
        import numba
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            numba.set_num_threads(max(1, threads))
    except (ImportError, ValueError):
        pass


def _resolve_penalties(parser, args, m, p):
    lam_given = args.lambda1 is not None or args.lambda2 is not None
    gam_given = args.gamma1 is not None or args.gamma2 is not None
    if lam_given and gam_given:
        parser.error("give either --lambda1/--lambda2 or --gamma1/--gamma2, not both")
    if not lam_given and not gam_given:
        parser.error("one penalty parameterization is required "
                     "(--lambda1/--lambda2 or --gamma1/--gamma2)")
    if lam_given:
        pen = Penalties(args.lambda1 or 0.0, args.lambda2 or 0.0)
        return pen, None
    gammas = Gammas(args.gamma1 or 0.0, args.gamma2 or 0.0)
    return gamma_to_lambda(gammas, m, p), gammas


def cmd_simulate(parser, args):
    cfg = SimConfig(p=args.p, n=args.n, graph_type=args.graph_type, pi=args.pi,
                    pi1=args.pi1, pi2=args.pi2, v=args.v, u=args.u,
                    seed=args.seed, ba_edges_per_node=args.ba_edges)
    truth = simulate(cfg)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    io.write_data_csv(outdir / "data.csv", truth)
    io.write_truth_files(outdir, truth)
    print(f"wrote data.csv, truth_adjacency.json, truth_precision.json, "
          f"config.json to {outdir}")
    return EXIT_OK


def cmd_fit(parser, args):
    _set_threads(args.threads)
    problem = _load_problem(args)
    pen, gammas = _resolve_penalties(parser, args, problem.m, problem.p)
    result = fit(problem, pen, _fit_options(args))
    result.gammas = gammas
    io.write_fit(args.out, result)
    if not result.converged:
        print(f"not converged after {result.iterations} iterations "
              f"(relative change {result.final_relative_change:.3e}); "
              f"fit written to {args.out}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"converged in {result.iterations} iterations; wrote {args.out}")
    return EXIT_OK


def cmd_tune(parser, args):
    _set_threads(args.threads)
    problem = _load_problem(args)
    if args.gamma1_grid and args.gamma2_grid:
        g1s = [float(v) for v in args.gamma1_grid.split(",")]
        g2s = [float(v) for v in args.gamma2_grid.split(",")]
        grid = [(a, b) for a in g1s for b in g2s]
    elif args.gamma1_grid or args.gamma2_grid:
        parser.error("give both --gamma1-grid and --gamma2-grid")
    elif args.grid == "default":
        grid = default_gamma_grid()
    else:
        parser.error("--grid must be 'default' or use --gamma1-grid/--gamma2-grid")
    result = grid_search(problem, grid, criterion=args.criterion,
                         opts=_fit_options(args))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    io.write_grid_csv(outdir / "grid.csv", result)
    result.best.fit.gammas = Gammas(result.best.gamma1, result.best.gamma2)
    io.write_fit(outdir / "fit_best.json", result.best.fit)
    print(f"best {args.criterion} at gamma1={result.best.gamma1:g}, "
          f"gamma2={result.best.gamma2:g}; wrote grid.csv and fit_best.json")
    return EXIT_OK


def cmd_metrics(parser, args):
    keys, truth = io.load_truth_adjacency(args.truth)
    rows = []
    scored = []
    for path in args.fit:
        ff = io.load_fit(path)
        if list(ff.keys) != list(keys):
            raise CovnetError(f"{path}: fit keys {ff.keys} do not match truth keys {keys}")
        est = ff.adjacency
        conf = confusion(list(truth), list(est))
        precision, recall, f1 = precision_recall_f1(conf)
        rows.append({"label": Path(path).name,
                     "gamma1": ff.gamma1, "gamma2": ff.gamma2,
                     "lambda1": ff.lambda1, "lambda2": ff.lambda2,
                     "tp": conf.tp, "fp": conf.fp, "fn": conf.fn,
                     "precision": precision, "recall": recall, "f1": f1})
        scored.append((ff.gamma1 or 0.0, ff.gamma2 or 0.0, list(est)))
    if len(args.fit) > 1:
        best_f1, (g1, g2) = oracle_f1(list(truth), scored)
        rows.append({"label": "oracle", "gamma1": g1, "gamma2": g2, "f1": best_f1})
    io.write_metrics_csv(args.out, rows)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_hamming(parser, args):
    ff = io.load_fit(args.fit)
    io.write_matrix_csv(args.out, hamming_matrix(list(ff.adjacency)).astype(float))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_interpolate(parser, args):
    ff = io.load_fit(args.fit)
    omegas = np.array([float(v) for v in args.omega.split(",")])
    lambda1 = ff.lambda1 if args.lambda1 is None else args.lambda1
    lambda2 = ff.lambda2 if args.lambda2 is None else args.lambda2
    spec = InterpolationSpec(omegas=omegas, lambda1=lambda1, lambda2=lambda2)
    adjacency = interpolate_graph(ff, spec, tau=args.tau, mode=args.mode)
    iu, ju = np.nonzero(np.triu(adjacency, 1))
    io.write_json(args.out, {
        "version": io.FIT_FORMAT_VERSION,
        "p": ff.p,
        "omegas": omegas,
        "lambda1": float(lambda1),
        "lambda2": float(lambda2),
        "tau": float(args.tau),
        "mode": args.mode,
        "adjacency": adjacency.astype(int),
        "edges": [[int(s), int(t)] for s, t in zip(iu, ju)],
    })
    print(f"wrote {args.out} ({iu.size} edges)")
    return EXIT_OK


def _add_fit_flags(sub):
    sub.add_argument("--data", required=True, help="long-format CSV")
    sub.add_argument("--covariates", required=True,
                     help="comma-separated covariate column names")
    sub.add_argument("--weights", required=True,
                     help="weight matrix: csv path, tvgl:T, fgl:M, grid:RxC or zero:M")
    sub.add_argument("--rho", type=float, default=1.0, help="dual step length")
    sub.add_argument("--eps", type=float, default=1e-5, help="stopping threshold")
    sub.add_argument("--max-iter", type=int, default=1000)
    sub.add_argument("--warmstart", action="store_true",
                     help="start from single-graph fits")
    sub.add_argument("--tau", type=float, default=1e-6, help="adjacency threshold")
    sub.add_argument("--standardize", action="store_true",
                     help="standardize variables within each covariate group")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker cap; results do not depend on it")


def build_parser():
    parser = argparse.ArgumentParser(prog="covnet",
                                     description="Covariate-varying network estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate ground truth and datasets")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--graph-type", choices=("er", "ba"), default="er")
    sim.add_argument("--pi", type=float, default=0.1, help="ER edge probability")
    sim.add_argument("--pi1", type=float, default=0.1)
    sim.add_argument("--pi2", type=float, default=0.1)
    sim.add_argument("--v", type=float, default=0.4)
    sim.add_argument("--u", type=float, default=0.1)
    sim.add_argument("--ba-edges", type=int, default=1,
                     help="attachment count per node for BA graphs")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    fit_p = sub.add_parser("fit", help="estimate the networks at one penalty pair")
    _add_fit_flags(fit_p)
    fit_p.add_argument("--lambda1", type=float, default=None)
    fit_p.add_argument("--lambda2", type=float, default=None)
    fit_p.add_argument("--gamma1", type=float, default=None)
    fit_p.add_argument("--gamma2", type=float, default=None)
    fit_p.add_argument("--out", required=True, help="fit JSON path")
    fit_p.set_defaults(func=cmd_fit)

    tune = sub.add_parser("tune", help="grid search over per-edge penalties")
    _add_fit_flags(tune)
    tune.add_argument("--criterion", choices=("aic", "bic"), required=True)
    tune.add_argument("--grid", default="default")
    tune.add_argument("--gamma1-grid", default=None, help="comma-separated values")
    tune.add_argument("--gamma2-grid", default=None, help="comma-separated values")
    tune.add_argument("--out", required=True, help="output directory")
    tune.set_defaults(func=cmd_tune)

    met = sub.add_parser("metrics", help="structure-recovery scores against truth")
    met.add_argument("--truth", required=True, help="truth_adjacency.json")
    met.add_argument("--fit", required=True, nargs="+", help="fit JSON file(s)")
    met.add_argument("--out", required=True, help="metrics CSV path")
    met.set_defaults(func=cmd_metrics)

    ham = sub.add_parser("hamming", help="pairwise Hamming distances of a fit")
    ham.add_argument("--fit", required=True)
    ham.add_argument("--out", required=True, help="m x m CSV path")
    ham.set_defaults(func=cmd_hamming)

    itp = sub.add_parser("interpolate", help="interpolate an unobserved graph")
    itp.add_argument("--fit", required=True)
    itp.add_argument("--omega", required=True, help="comma-separated coefficients")
    itp.add_argument("--lambda1", type=float, default=None,
                     help="defaults to the fit's value")
    itp.add_argument("--lambda2", type=float, default=None,
                     help="defaults to the fit's value")
    itp.add_argument("--tau", type=float, default=1e-6)
    itp.add_argument("--mode", choices=("sum", "aggregate"), default="sum")
    itp.add_argument("--out", required=True, help="adjacency JSON path")
    itp.set_defaults(func=cmd_interpolate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except NoConvergedCell as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (CovnetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
