"""File formats: fit JSON, matrix/weight CSV, long-format data CSV.

All writers are canonical so that re-serializing a loaded artifact is
byte-identical: dictionary keys keep a fixed order and every float is
rendered with 17 significant digits (``%.17g``), which round-trips IEEE
doubles exactly.  NaN and infinity are rejected.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError
from .model import WeightMatrix
from .solver import extract_adjacency

FIT_FORMAT_VERSION = "covnet-fit-1"
TRUTH_FORMAT_VERSION = "covnet-truth-1"


def format_float(x):
    """Canonical float rendering: 17 significant digits, valid JSON."""
    x = float(x)
    if not np.isfinite(x):
        raise NumericError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _dump(obj, out):
    if isinstance(obj, dict):
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _dump(val, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, val in enumerate(obj):
            if i:
                out.append(",")
            _dump(val, out)
        out.append("]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    elif isinstance(obj, np.ndarray):
        _dump(obj.tolist(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_canonical(obj):
    """Serialize to the canonical JSON text."""
    out = []
    _dump(obj, out)
    return "".join(out)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(obj))
        fh.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------- matrices

def write_matrix_csv(path, mat):
    """Dense row-major CSV, no header, canonical float format."""
    mat = np.atleast_2d(np.asarray(mat))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in mat:
            fh.write(",".join(format_float(v) for v in row))
            fh.write("\n")


def read_matrix_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise DimensionError(f"{path}: empty matrix file")
    return np.array(rows, dtype=float)


def read_weights_csv(path):
    w = read_matrix_csv(path)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionError(f"{path}: weight matrix must be square, got {w.shape}")
    return WeightMatrix(m=w.shape[0], w=w)


# ---------------------------------------------------------------- fit files

@dataclass
class FitFile:
    """In-memory image of a fit JSON document."""

    version: str
    p: int
    m: int
    keys: list
    n: list
    lambda1: float
    lambda2: float
    gamma1: object
    gamma2: object
    rho: float
    eps: float
    tau: float
    iterations: int
    converged: bool
    final_relative_change: float
    theta: np.ndarray
    z: np.ndarray

    @property
    def adjacency(self):
        return extract_adjacency(self.z, self.tau)


def _fit_doc(ff):
    graphs = []
    adjacency = ff.adjacency
    for i in range(ff.m):
        iu, ju = np.nonzero(np.triu(adjacency[i], 1))
        graphs.append({
            "key": list(ff.keys[i]),
            "theta": ff.theta[i],
            "z": ff.z[i],
            "edges": [[int(s), int(t)] for s, t in zip(iu, ju)],
        })
    return {
        "version": ff.version,
        "p": int(ff.p),
        "m": int(ff.m),
        "keys": [list(k) for k in ff.keys],
        "n": [int(v) for v in ff.n],
        "lambda1": float(ff.lambda1),
        "lambda2": float(ff.lambda2),
        "gamma1": None if ff.gamma1 is None else float(ff.gamma1),
        "gamma2": None if ff.gamma2 is None else float(ff.gamma2),
        "rho": float(ff.rho),
        "eps": float(ff.eps),
        "tau": float(ff.tau),
        "iterations": int(ff.iterations),
        "converged": bool(ff.converged),
        "final_relative_change": float(ff.final_relative_change),
        "graphs": graphs,
    }


def fitfile_from_fit(cvnfit):
    """Build the serializable image of a solver fit."""
    gammas = cvnfit.gammas
    return FitFile(
        version=FIT_FORMAT_VERSION, p=cvnfit.p, m=cvnfit.m,
        keys=[tuple(k) for k in cvnfit.keys], n=[int(v) for v in cvnfit.ns],
        lambda1=cvnfit.penalties.lambda1, lambda2=cvnfit.penalties.lambda2,
        gamma1=None if gammas is None else gammas.gamma1,
        gamma2=None if gammas is None else gammas.gamma2,
        rho=cvnfit.rho, eps=cvnfit.eps, tau=cvnfit.tau,
        iterations=cvnfit.iterations, converged=cvnfit.converged,
        final_relative_change=cvnfit.final_relative_change,
        theta=np.asarray(cvnfit.theta, dtype=float),
        z=np.asarray(cvnfit.z, dtype=float))


def write_fit(path, cvnfit_or_fitfile):
    ff = cvnfit_or_fitfile
    if not isinstance(ff, FitFile):
        ff = fitfile_from_fit(ff)
    write_json(path, _fit_doc(ff))
    return ff


def load_fit(path):
    doc = read_json(path)
    theta = np.array([g["theta"] for g in doc["graphs"]], dtype=float)
    z = np.array([g["z"] for g in doc["graphs"]], dtype=float)
    return FitFile(
        version=doc["version"], p=int(doc["p"]), m=int(doc["m"]),
        keys=[tuple(k) for k in doc["keys"]], n=[int(v) for v in doc["n"]],
        lambda1=float(doc["lambda1"]), lambda2=float(doc["lambda2"]),
        gamma1=doc.get("gamma1"), gamma2=doc.get("gamma2"),
        rho=float(doc["rho"]), eps=float(doc["eps"]), tau=float(doc["tau"]),
        iterations=int(doc["iterations"]), converged=bool(doc["converged"]),
        final_relative_change=float(doc["final_relative_change"]),
        theta=theta, z=z)


# ---------------------------------------------------------------- datasets

def write_data_csv(path, truth, covariate_names=("u1", "u2")):
    """Long-format dataset of a simulation: covariates, then x1..xp."""
    p = truth.data.shape[2]
    header = list(covariate_names) + [f"x{j + 1}" for j in range(p)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for k, key in enumerate(truth.keys):
            for row in truth.data[k]:
                fh.write(",".join(list(key) + [format_float(v) for v in row]))
                fh.write("\n")


def write_truth_files(outdir, truth):
    """Emit truth_adjacency.json, truth_precision.json and config.json."""
    cfg = truth.config
    base = {
        "version": TRUTH_FORMAT_VERSION,
        "p": int(cfg.p),
        "keys": [list(k) for k in truth.keys],
    }
    adj = dict(base)
    adj["matrices"] = truth.adjacency.astype(int)
    write_json(outdir / "truth_adjacency.json", adj)
    prec = dict(base)
    prec["matrices"] = truth.precision
    write_json(outdir / "truth_precision.json", prec)
    write_json(outdir / "config.json", {
        "version": TRUTH_FORMAT_VERSION,
        "p": cfg.p, "n": cfg.n, "graph_type": cfg.graph_type,
        "pi": float(cfg.pi), "pi1": float(cfg.pi1), "pi2": float(cfg.pi2),
        "v": float(cfg.v), "u": float(cfg.u), "seed": int(cfg.seed),
        "ba_edges_per_node": int(cfg.ba_edges_per_node),
        "b1": int(truth.b1), "b2": int(truth.b2),
    })


def load_truth_adjacency(path):
    doc = read_json(path)
    return [tuple(k) for k in doc["keys"]], np.array(doc["matrices"], dtype=np.uint8)


# ---------------------------------------------------------------- tables

def write_grid_csv(path, result):
    """One row per tuning-grid cell."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma1", "gamma2", "lambda1", "lambda2", "aic", "bic",
                         "converged", "iterations", "edges_total", "edge_counts"])
        for row in result.rows:
            writer.writerow([
                format_float(row.gamma1), format_float(row.gamma2),
                format_float(row.lambda1), format_float(row.lambda2),
                format_float(row.aic), format_float(row.bic),
                int(row.converged), row.fit.iterations,
                int(sum(row.edge_counts)),
                ";".join(str(c) for c in row.edge_counts)])


def write_metrics_csv(path, rows):
    """Rows: dicts with gamma1, gamma2, tp, fp, fn, precision, recall, f1."""
    fields = ["label", "gamma1", "gamma2", "lambda1", "lambda2",
              "tp", "fp", "fn", "precision", "recall", "f1"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            out = []
            for name in fields:
                val = row.get(name, "")
                if isinstance(val, float):
                    val = format_float(val)
                out.append(val)
            writer.writerow(out)
