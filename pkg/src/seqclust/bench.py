"""Benchmark harness: risk sweeps, contamination/CER studies, timing tables.

An ExperimentSpec names a generator, an algorithm list and grid parameters;
run_sweep / run_cer_experiment expand it into independent cells (replication
x size x k x algorithm x gain constant). Every cell derives its RNG streams
from the master seed and its own grid position, so results do not depend on
execution order or worker count. A failed cell records an error status and
the run continues.

Deterministic outputs (results CSV, summary JSON) never contain wall-clock
times; timing presets write a separate timings CSV that is not expected to
be identical across runs.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import Dataset
from .datagen import Sim1Config, Sim2Config, profiles_sample, sim1_sample, sim2_sample
from .kmeans import kmeans_fit
from .kmedians import GainConfig, kmedians_fit, kmedians_fit_data_driven
from .metrics import cer
from .pam import pam_fit

__all__ = ["ExperimentSpec", "ResultTable", "run_sweep", "run_cer_experiment",
           "run_experiment", "preset", "load_spec_file", "PRESET_NAMES", "time_fit"]

_GENERATORS = ("sim1", "sim2", "profiles")
_ALGORITHMS = ("kmeans", "kmedians", "kmedians-auto", "pam", "tkmeans")

_COLUMNS = [
    "experiment", "kind", "replication", "n", "d", "k", "algorithm",
    "c_gamma", "restarts", "risk", "cer", "chosen_restart",
    "distance_evals", "status",
]
_TIMING_COLUMNS = ["experiment", "replication", "n", "d", "k", "algorithm",
                   "c_gamma", "wall_median", "wall_runs"]


@dataclass
class ExperimentSpec:
    """Declarative description of one experiment grid."""

    name: str
    kind: str                      # "sweep" or "cer"
    generator: str
    generator_params: dict
    k: int
    algorithms: list
    restarts: int
    replications: int
    c_grid: list = None
    seed: int = 0
    measure_time: bool = False
    sizes: list = None             # optional n grid overriding generator_params["n"]
    ks: list = None                # optional k grid overriding k

    def validate(self) -> "ExperimentSpec":
        if self.kind not in ("sweep", "cer"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.generator not in _GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        for a in self.algorithms:
            if a not in _ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if not self.algorithms:
            raise ValueError("empty algorithm list")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if "kmedians" in self.algorithms and not self.c_grid:
            raise ValueError("algorithm 'kmedians' needs a non-empty c_grid")
        if self.c_grid is not None:
            cg = [float(c) for c in self.c_grid]
            if any(not np.isfinite(c) or c <= 0 for c in cg):
                raise ValueError("c_grid values must be positive and finite")
            self.c_grid = cg
        if self.kind == "cer" and self.generator == "profiles":
            raise ValueError("CER experiments need a generator with labels")
        if self.generator in ("sim1", "sim2") and "n" not in self.generator_params and not self.sizes:
            raise ValueError("generator_params must set n (or provide sizes)")
        if self.generator == "sim2" and "d" not in self.generator_params:
            raise ValueError("sim2 needs generator_params['d']")
        return self


def _generate(spec: ExperimentSpec, n, entropy) -> Dataset:
    params = dict(spec.generator_params)
    if n is not None:
        params["n"] = n
    if spec.generator == "sim1":
        return sim1_sample(Sim1Config(n=params["n"], epsilon=params.get("epsilon", 0.0),
                                      seed=entropy))
    if spec.generator == "sim2":
        return sim2_sample(Sim2Config(n=params["n"], d=params["d"],
                                      epsilon=params.get("epsilon", 0.0),
                                      scale=params.get("scale", 1.0), seed=entropy))
    return profiles_sample(n=params.get("n", 5422), d=params.get("d", 1440), seed=entropy)


def _fit_cell(algorithm, data, k, c, restarts, entropy):
    if algorithm == "kmeans":
        return kmeans_fit(data, k, restarts=restarts, seed=entropy)
    if algorithm == "kmedians":
        return kmedians_fit(data, k, GainConfig(c_gamma=c), restarts=restarts, seed=entropy)
    if algorithm == "kmedians-auto":
        return kmedians_fit_data_driven(data, k, restarts=restarts, seed=entropy)
    if algorithm == "pam":
        return pam_fit(data, k)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def time_fit(fn, repeats: int = 5):
    """Warm-up call plus `repeats` timed calls; returns (result, median, runs)."""
    fn()
    runs = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return out, float(np.median(runs)), runs


def _run_replication(spec: ExperimentSpec, rep: int):
    rows = []
    timings = []
    sizes = spec.sizes if spec.sizes else [None]
    ks = spec.ks if spec.ks else [spec.k]
    for si, nn in enumerate(sizes):
        data = _generate(spec, nn, [spec.seed, 0, rep, si])
        for ki, kk in enumerate(ks):
            for ai, algo in enumerate(spec.algorithms):
                cs = spec.c_grid if (algo == "kmedians" and spec.c_grid) else [None]
                for ci, c in enumerate(cs):
                    row = {
                        "experiment": spec.name, "kind": spec.kind, "replication": rep,
                        "n": data.n, "d": data.d, "k": kk, "algorithm": algo,
                        "c_gamma": c, "restarts": spec.restarts, "risk": None,
                        "cer": None, "chosen_restart": None, "distance_evals": None,
                        "status": "ok",
                    }
                    if algo == "tkmeans":
                        row["status"] = "not implemented"
                        rows.append(row)
                        continue
                    entropy = [spec.seed, 1, rep, si, ki, ai, ci]
                    try:
                        fit = lambda: _fit_cell(algo, data, kk, c, spec.restarts, entropy)
                        if spec.measure_time:
                            report, med, runs = time_fit(fit)
                            timings.append({
                                "experiment": spec.name, "replication": rep,
                                "n": data.n, "d": data.d, "k": kk, "algorithm": algo,
                                "c_gamma": c, "wall_median": med,
                                "wall_runs": ";".join(f"{t:.6f}" for t in runs),
                            })
                        else:
                            report = fit()
                        row["risk"] = report.risk
                        row["chosen_restart"] = report.restart
                        row["distance_evals"] = report.distance_evals
                        if algo == "kmedians-auto":
                            row["c_gamma"] = report.c_gamma
                        if spec.kind == "cer":
                            if data.labels is None:
                                raise ValueError("dataset has no labels for CER")
                            row["cer"] = cer(report.assignments, data.labels,
                                             data.outlier_flags)
                    except Exception as exc:  # cell failures must not kill the run
                        row["status"] = f"error: {exc}"
                    rows.append(row)
    return rows, timings


@dataclass
class ResultTable:
    """Tidy result rows for one experiment plus optional timing records."""

    spec: ExperimentSpec
    rows: list = field(default_factory=list)
    timings: list = field(default_factory=list)

    def all_ok(self) -> bool:
        return all(r["status"] in ("ok", "not implemented") for r in self.rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_COLUMNS)
            for r in self.rows:
                w.writerow([_fmt(r[c]) for c in _COLUMNS])

    def timings_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_TIMING_COLUMNS)
            for r in self.timings:
                w.writerow([_fmt(r[c]) for c in _TIMING_COLUMNS])

    def summary(self) -> dict:
        groups = {}
        for r in self.rows:
            if r["status"] != "ok":
                continue
            key = (r["algorithm"], r["c_gamma"], r["n"], r["k"])
            groups.setdefault(key, []).append(r)
        out = []
        for key in sorted(groups, key=lambda t: (t[0], t[1] if t[1] is not None else -1.0, t[2], t[3])):
            rows = groups[key]
            entry = {
                "algorithm": key[0], "c_gamma": key[1], "n": key[2], "k": key[3],
                "count": len(rows),
            }
            for met in ("risk", "cer"):
                vals = np.array([r[met] for r in rows if r[met] is not None], dtype=float)
                if vals.size:
                    entry[f"{met}_mean"] = float(vals.mean())
                    entry[f"{met}_median"] = float(np.median(vals))
                    entry[f"{met}_q1"] = float(np.percentile(vals, 25))
                    entry[f"{met}_q3"] = float(np.percentile(vals, 75))
            out.append(entry)
        n_bad = sum(1 for r in self.rows if r["status"] not in ("ok", "not implemented"))
        return {
            "experiment": self.spec.name,
            "kind": self.spec.kind,
            "spec": asdict(self.spec),
            "cells": len(self.rows),
            "failed_cells": n_bad,
            "groups": out,
        }

    def write(self, outdir) -> list:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        res = outdir / f"{self.spec.name}_results.csv"
        self.to_csv(res)
        paths.append(str(res))
        summ = outdir / f"{self.spec.name}_summary.json"
        with open(summ, "w") as fh:
            json.dump(self.summary(), fh, sort_keys=True, indent=1)
            fh.write("\n")
        paths.append(str(summ))
        if self.timings:
            tim = outdir / f"{self.spec.name}_timings.csv"
            self.timings_to_csv(tim)
            paths.append(str(tim))
        return paths


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _run(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    spec.validate()
    table = ResultTable(spec=spec)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_run_replication, [spec] * spec.replications,
                                range(spec.replications)))
    else:
        parts = [_run_replication(spec, rep) for rep in range(spec.replications)]
    for rows, timings in parts:
        table.rows.extend(rows)
        table.timings.extend(timings)
    return table


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    """Risk sweep over the c grid (and optional size/k grids)."""
    if spec.kind != "sweep":
        raise ValueError("run_sweep expects a spec with kind='sweep'")
    return _run(spec, jobs)


def run_cer_experiment(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    """Fit each algorithm per replication and score CER against true labels."""
    if spec.kind != "cer":
        raise ValueError("run_cer_experiment expects a spec with kind='cer'")
    return _run(spec, jobs)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    return run_sweep(spec, jobs) if spec.kind == "sweep" else run_cer_experiment(spec, jobs)


# Presets mirroring the simulation studies. Replication-heavy defaults can be
# overridden from the CLI (--replications, --restarts, --c-grid, --sizes, --ks).
_PRESETS = {
    "fig3": dict(
        kind="sweep", generator="sim1", generator_params={"n": 250, "epsilon": 0.05},
        k=3, algorithms=["kmeans", "kmedians", "pam", "tkmeans"], restarts=10,
        replications=50, c_grid=[0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0],
    ),
    "fig4": dict(
        kind="sweep", generator="sim2",
        generator_params={"n": 500, "d": 50, "epsilon": 0.05},
        k=3, algorithms=["kmeans", "kmedians", "pam", "tkmeans"], restarts=25,
        replications=50, c_grid=[0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
    ),
    "fig5": dict(
        kind="sweep", generator="sim2",
        generator_params={"n": 1000, "d": 200, "epsilon": 0.05, "scale": 10.0},
        k=3, algorithms=["kmeans", "kmedians", "pam", "tkmeans"], restarts=50,
        replications=50, c_grid=[2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0],
    ),
    "fig6": dict(
        kind="cer", generator="sim1", generator_params={"n": 500, "epsilon": 0.0},
        k=3, algorithms=["kmeans", "kmedians-auto", "pam", "tkmeans"], restarts=10,
        replications=500,
    ),
    "fig7": dict(
        kind="cer", generator="sim1", generator_params={"n": 500, "epsilon": 0.05},
        k=3, algorithms=["kmeans", "kmedians-auto", "pam", "tkmeans"], restarts=10,
        replications=500,
    ),
    "fig8": dict(
        kind="cer", generator="sim1", generator_params={"n": 1000, "epsilon": 0.10},
        k=3, algorithms=["kmeans", "kmedians-auto", "pam", "tkmeans"], restarts=10,
        replications=500,
    ),
    "fig9": dict(
        kind="cer", generator="sim2",
        generator_params={"n": 500, "d": 50, "epsilon": 0.05},
        k=3, algorithms=["kmeans", "kmedians-auto", "pam", "tkmeans"], restarts=25,
        replications=100,
    ),
    "table1": dict(
        kind="sweep", generator="sim1", generator_params={"epsilon": 0.05},
        k=5, ks=[2, 4, 5], sizes=[250, 500, 2000],
        algorithms=["kmedians", "kmeans", "pam"], restarts=1, replications=1,
        c_grid=[1.0], measure_time=True,
    ),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, **overrides) -> ExperimentSpec:
    """Build a named preset spec, optionally overriding grid fields."""
    if name not in _PRESETS:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    base = dict(_PRESETS[name])
    base["name"] = name
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in ("seed", "replications", "restarts", "c_grid", "sizes", "ks", "measure_time"):
            raise ValueError(f"preset override {key!r} not supported")
        base[key] = val
    return ExperimentSpec(**base).validate()


def load_spec_file(path) -> ExperimentSpec:
    """Load an ExperimentSpec from a JSON file."""
    with open(path, "r") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: spec file must hold a JSON object")
    try:
        spec = ExperimentSpec(**doc)
    except TypeError as exc:
        raise ValueError(f"{path}: bad spec fields ({exc})") from exc
    return spec.validate()
