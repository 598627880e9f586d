"""Benchmark harness: graph loading, seeded experiment sweeps, CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .lattice import BoxConstraint
from .maximize import Algorithm, RunReport, run_algorithm
from .objectives import DEFAULT_P, RevenueObjective, WeightedGraph, generate_dr_table, random_graph
from .rng import check_seed, derive_seed

log = logging.getLogger(__name__)

COLUMNS = ["algorithm", "epsilon", "B", "trial", "seed", "objective", "oracle_calls", "wall_time_ms", "failed"]
EPS_ALGORITHMS = (Algorithm.FastDG, Algorithm.PolyDG)


class GraphParseError(ValueError):
    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


def load_graph(path) -> WeightedGraph:
    """Read a whitespace-separated edge list ``u v [w]`` (KONECT layout).

    Lines starting with ``%`` or ``#`` are comments. Ids are 0-based when the
    smallest id is 0 and 1-based otherwise. Repeated edges keep their largest
    weight; a missing weight is 1. Columns after the weight are ignored and
    self-loops are dropped.
    """
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise GraphParseError(path, 0, f"cannot read file: {exc}") from exc
    raw = []
    for no, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text[0] in "%#":
            continue
        parts = text.split()
        if len(parts) < 2:
            raise GraphParseError(path, no, f"expected 'u v [w]', got {text!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(path, no, f"non-integer endpoint in {text!r}") from None
        if u < 0 or v < 0:
            raise GraphParseError(path, no, f"negative vertex id in {text!r}")
        w = 1.0
        if len(parts) > 2:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphParseError(path, no, f"non-numeric weight {parts[2]!r}") from None
            if not w >= 0:
                raise GraphParseError(path, no, f"negative weight {parts[2]}")
        raw.append((u, v, w))
    if not raw:
        raise GraphParseError(path, len(lines), "no edges found")
    base = 0 if min(min(u, v) for u, v, _ in raw) == 0 else 1
    n = max(max(u, v) for u, v, _ in raw) + 1 - base
    loops = sum(1 for u, v, _ in raw if u == v)
    if loops:
        log.warning("%s: dropped %d self-loop(s)", path, loops)
    edges = tuple((u - base, v - base, w) for u, v, w in raw if u != v)
    return WeightedGraph(n, edges)


def bundled_graph_path(name: str = "social50") -> str:
    return str(resources.files("latticedg") / "data" / f"{name}.txt")


@dataclass
class ExperimentConfig:
    """One sweep. ``input`` is a path, ``bundled:<name>``,
    ``synthetic:gnp:<n>:<density>:<seed>`` or ``synthetic:table:<n>:<seed>``.
    """

    input: str
    algorithms: Sequence = ("SG", "DG", "FastDG")
    epsilons: Sequence = (0.5,)
    bound: int = 100
    p: float = DEFAULT_P
    trials: int = 1
    base_seed: int = 0
    output: Optional[str] = None
    format: str = "csv"
    jobs: int = 1
    shuffle: bool = False

    def __post_init__(self):
        self.algorithms = [Algorithm.parse(a) for a in self.algorithms]
        self.epsilons = [float(e) for e in self.epsilons]
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(not e > 0 for e in self.epsilons):
            raise ValueError("every epsilon must be positive")
        if int(self.bound) < 1:
            raise ValueError("bound must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if any(a in EPS_ALGORITHMS for a in self.algorithms) and not self.epsilons:
            raise ValueError("FastDG/PolyDG need at least one epsilon")
        check_seed(self.base_seed)


def build_objective(config: ExperimentConfig):
    """Objective and box for the configured input."""
    src = config.input
    if src.startswith("synthetic:"):
        kind, *args = src.split(":")[1:]
        if kind == "gnp":
            n, density, seed = int(args[0]), float(args[1]), int(args[2])
            graph = random_graph(n, np.random.default_rng(seed), density)
            return RevenueObjective(graph, config.p), BoxConstraint.uniform(n, config.bound)
        if kind == "table":
            n, seed = int(args[0]), int(args[1])
            box = BoxConstraint.uniform(n, config.bound)
            return generate_dr_table(box, np.random.default_rng(seed)), box
        raise ValueError(f"unknown synthetic instance {src!r}")
    path = bundled_graph_path(src.split(":", 1)[1]) if src.startswith("bundled:") else src
    graph = load_graph(path)
    return RevenueObjective(graph, config.p), BoxConstraint.uniform(graph.vertex_count, config.bound)


def _tasks(config: ExperimentConfig):
    for algo in config.algorithms:
        eps_list = config.epsilons if algo in EPS_ALGORITHMS else [None]
        for eps in eps_list:
            for trial in range(config.trials):
                yield algo, eps, trial


def _one_run(objective, box, algo: Algorithm, eps, trial: int, base_seed: int, bound: int, shuffle: bool):
    seed = derive_seed(base_seed, algo.value, eps, trial)
    kwargs = {}
    if shuffle:
        from .maximize import shuffled_order

        kwargs["order"] = shuffled_order(box.size, seed)
    if algo is Algorithm.DG:
        # the revenue objective is not DR-submodular everywhere on large boxes
        kwargs["strict"] = False
    report = run_algorithm(objective, box, algo, epsilon=eps, seed=seed, **kwargs)
    report.extra.update(trial=trial, B=bound)
    return report


def _sort_key(r: RunReport):
    order = list(Algorithm)
    return (order.index(r.algorithm), -1.0 if r.epsilon is None else r.epsilon, r.extra["trial"])


def run_experiment(config: ExperimentConfig, objective=None, box=None) -> list:
    """Run every (algorithm, epsilon, trial) once; deterministic given the config.

    ``objective``/``box`` override the configured input (library use).
    """
    if objective is None:
        objective, box = build_objective(config)
    elif box is None:
        raise ValueError("box is required with an explicit objective")
    args = [(objective, box, a, e, t, config.base_seed, int(config.bound), config.shuffle)
            for a, e, t in _tasks(config)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(pool.map(_one_run_star, args))
    else:
        reports = [_one_run(*a) for a in args]
    reports.sort(key=_sort_key)
    return reports


def _one_run_star(args):
    return _one_run(*args)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def report_rows(reports) -> list:
    rows = []
    for r in reports:
        rows.append({
            "algorithm": r.algorithm.value,
            "epsilon": None if r.epsilon is None else float(_fmt(r.epsilon)),
            "B": int(r.extra.get("B", int(np.max(r.solution)) if len(r.solution) else 0)),
            "trial": int(r.extra.get("trial", 0)),
            "seed": int(r.seed),
            "objective": float(_fmt(r.objective)),
            "oracle_calls": int(r.oracle_calls),
            "wall_time_ms": float(_fmt(r.wall_time * 1000.0)),
            "failed": bool(r.failed),
        })
    return rows


def render_report(reports, fmt: str = "csv") -> str:
    rows = report_rows(reports)
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        row = dict(row)
        row["epsilon"] = "" if row["epsilon"] is None else _fmt(row["epsilon"])
        for key in ("objective", "wall_time_ms"):
            row[key] = _fmt(row[key])
        row["failed"] = "true" if row["failed"] else "false"
        writer.writerow(row)
    return buf.getvalue()


def write_report(reports, path, fmt: str = "csv"):
    text = render_report(reports, fmt)
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_report(path, fmt: str = "csv") -> list:
    """Parse a written report back into row dicts (the JSON/CSV schema)."""
    with open(path) as fh:
        if fmt == "json":
            return json.load(fh)
        rows = []
        for row in csv.DictReader(fh):
            rows.append({
                "algorithm": row["algorithm"],
                "epsilon": float(row["epsilon"]) if row["epsilon"] else None,
                "B": int(row["B"]),
                "trial": int(row["trial"]),
                "seed": int(row["seed"]),
                "objective": float(row["objective"]),
                "oracle_calls": int(row["oracle_calls"]),
                "wall_time_ms": float(row["wall_time_ms"]),
                "failed": row["failed"] == "true",
            })
        return rows
