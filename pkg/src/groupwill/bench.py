"""Experiment harness: parameter sweeps over solvers with CSV output.

With timing disabled (the default) the CSV is byte-identical across runs for
a fixed spec and seed; enabling timing records solver-only wall time and
gives up that guarantee.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any

from .graph import SocialGraph, load_graph
from .solvers import SolverConfig, SolverRun, cbas, cbas_nd, solve
from .synth import synthetic_graph

CSV_HEADER = "axis,solver,rep,seed,willingness,time_ms,samples"

AXIS_FIELDS = {
    "k": "k",
    "T": "budget",
    "m": "starts",
    "rho": "rho",
    "w": "smoothing",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: an axis, its values, solvers to compare, repetitions."""

    axis: str
    values: tuple[Any, ...]
    solvers: tuple[str, ...] = ("dgreedy", "cbas", "cbas-nd")
    repetitions: int = 1
    seed: int = 0
    base: dict[str, Any] = field(default_factory=dict)
    graph_edges: str | None = None
    graph_scores: str | None = None
    synthetic: dict[str, Any] | None = None
    output: str | None = None
    timing: bool = False

    def __post_init__(self) -> None:
        if self.axis not in AXIS_FIELDS:
            raise ValueError(f"axis must be one of {sorted(AXIS_FIELDS)}")
        if not self.values:
            raise ValueError("axis values must be nonempty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if (self.graph_edges is None) == (self.synthetic is None):
            raise ValueError("give exactly one of graph_edges or synthetic")

    @classmethod
    def from_json(cls, path: str) -> "ExperimentSpec":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentSpec":
        return cls(
            axis=raw["axis"],
            values=tuple(raw["values"]),
            solvers=tuple(raw.get("solvers", ("dgreedy", "cbas", "cbas-nd"))),
            repetitions=int(raw.get("repetitions", 1)),
            seed=int(raw.get("seed", 0)),
            base=dict(raw.get("base", {})),
            graph_edges=raw.get("graph_edges"),
            graph_scores=raw.get("graph_scores"),
            synthetic=raw.get("synthetic"),
            output=raw.get("output"),
            timing=bool(raw.get("timing", False)),
        )


def _load_spec_graph(spec: ExperimentSpec) -> SocialGraph:
    if spec.graph_edges is not None:
        return load_graph(spec.graph_edges, spec.graph_scores)
    assert spec.synthetic is not None
    return synthetic_graph(**spec.synthetic)


def _config_for(spec: ExperimentSpec, value: Any, seed: int) -> SolverConfig:
    base = {"k": 10, "budget": 500}
    base.update(spec.base)
    base[AXIS_FIELDS[spec.axis]] = value
    base["seed"] = seed
    return SolverConfig(**base)


def _run_one(graph: SocialGraph, config: SolverConfig, algorithm: str,
             timing: bool) -> tuple[float, float, int]:
    config = replace(config, algorithm=algorithm)
    t0 = time.perf_counter() if timing else 0.0
    if algorithm == "cbas":
        run = cbas(graph, config, full_output=True)
        assert isinstance(run, SolverRun)
        value, samples = run.solution.willingness, run.samples_drawn
    elif algorithm in ("cbas-nd", "cbas-nd-g"):
        if algorithm == "cbas-nd-g":
            config = replace(config, distribution="gaussian")
        run = cbas_nd(graph, config, full_output=True)
        assert isinstance(run, SolverRun)
        value, samples = run.solution.willingness, run.samples_drawn
    else:
        sol = solve(graph, config)
        value = sol.willingness
        samples = config.budget if algorithm == "rgreedy" else 0
    elapsed_ms = (time.perf_counter() - t0) * 1000.0 if timing else 0.0
    return value, elapsed_ms, samples


def run_experiment(spec: ExperimentSpec) -> list[dict[str, Any]]:
    """Execute the sweep; returns rows and writes CSV when output is set.

    A solver failure is recorded as a row with empty willingness; the sweep
    continues.  Rows are sorted by (axis position, solver, rep) before any
    output so the CSV layout is stable.
    """
    graph = _load_spec_graph(spec)
    rows: list[dict[str, Any]] = []
    for pos, value in enumerate(spec.values):
        for algorithm in spec.solvers:
            for rep in range(spec.repetitions):
                seed = spec.seed + rep
                row: dict[str, Any] = {
                    "axis": value, "solver": algorithm, "rep": rep,
                    "seed": seed, "_pos": pos,
                }
                try:
                    config = _config_for(spec, value, seed)
                    w, ms, samples = _run_one(graph, config, algorithm, spec.timing)
                    row.update(willingness=w, time_ms=ms, samples=samples)
                except Exception as exc:  # noqa: BLE001 - recorded per row
                    row.update(willingness=None, time_ms=0.0, samples=0,
                               error=str(exc))
                rows.append(row)
    rows.sort(key=lambda r: (r["_pos"], r["solver"], r["rep"]))
    for row in rows:
        row.pop("_pos")
    if spec.output:
        write_csv(rows, spec.output)
    return rows


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        w = "" if r.get("willingness") is None else repr(float(r["willingness"]))
        ms = repr(float(r["time_ms"]))
        lines.append(f"{r['axis']},{r['solver']},{r['rep']},{r['seed']},"
                     f"{w},{ms},{r['samples']}")
    return "\n".join(lines) + "\n"


def write_csv(rows: list[dict[str, Any]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
