"""Experiment runner: batch solving, perf tables, driver ratios and tour audits."""

from __future__ import annotations

import csv
import dataclasses
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from . import __version__
from .core import CostReport, Instance, Tour, ValidationError, WtspError, cost_report, tsp_cost, weighted_cost
from .heuristics import FITNESS, MUTATIONS, RlsConfig, derive_seed, perf, rls
from .instances.generate import GeneratorSpec, format_d, generate_instance, stable_seed
from .instances.tsplib import read_instance, read_tour, write_tour
from .stats import pairwise_superiority

SCHEMA_VERSION = 1
ALGOS = ("rls", "approx", "exact")
InstanceRef = Union[GeneratorSpec, str, Path]

_ID_RE = re.compile(r"^(rue|netgen|tspgen)-(C[123])-d([0-9.]+)-n(\d+)")


class AuditMismatch(WtspError):
    """Recomputed costs disagree with the recorded ones."""


@dataclass(frozen=True)
class SolverConfig:
    """One algorithm column of an experiment."""

    algo: str = "rls"
    mutation: str = "inversion"
    fitness: str = "weighted"
    budget: int | None = None
    time_limit: float | None = None
    kmode: str = "heuristic"
    tsp_mode: str = "christofides"
    label: str | None = None

    def __post_init__(self) -> None:
        if self.algo not in ALGOS:
            raise ValidationError(f"algo must be one of {ALGOS}")
        if self.mutation not in MUTATIONS:
            raise ValidationError(f"mutation must be one of {MUTATIONS}")
        if self.fitness not in FITNESS:
            raise ValidationError(f"fitness must be one of {FITNESS}")
        if self.budget is not None and self.budget <= 0:
            raise ValidationError("budget must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValidationError("time limit must be positive")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.algo == "rls":
            suffix = "" if self.fitness == "weighted" else ",tsp"
            return f"rls[{self.mutation}{suffix}]"
        if self.algo == "approx":
            return f"approx[{self.kmode}]"
        return "exact"


@dataclass
class ExperimentSpec:
    instances: list[InstanceRef]
    algorithms: list[SolverConfig]
    runs: int = 30
    seed: int = 0
    out: str | Path = "results.csv"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValidationError("runs must be at least 1")
        if not self.instances or not self.algorithms:
            raise ValidationError("an experiment needs instances and algorithms")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValidationError(f"algorithm names must be unique, got {names}")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "ExperimentSpec":
        """Build from a JSON-like mapping (see the README for the layout)."""
        from .instances.generate import read_manifest

        base = Path(base_dir or ".")
        refs: list[InstanceRef] = []
        if "manifest" in data:
            refs += read_manifest(base / data["manifest"])
        refs += [str(base / p) for p in data.get("instances", [])]
        refs += [GeneratorSpec(**g) for g in data.get("generate", [])]
        algos = [SolverConfig(**a) for a in data.get("algorithms", [{}])]
        return cls(refs, algos, runs=int(data.get("runs", 30)), seed=int(data.get("seed", 0)),
                   out=base / data.get("out", "results.csv"), jobs=int(data.get("jobs", 1)))


@dataclass
class ResultRow:
    instance_id: str
    placement: str
    weight_class: str
    d: str
    n: int
    algorithm: str
    run: int
    seed: int
    fitness: str
    weighted_cost: float
    tsp_cost: float
    evaluations: int
    perf: float = math.nan
    tour_file: str = ""
    wall_time: float = 0.0


RESULT_FIELDS = tuple(f.name for f in dataclasses.fields(ResultRow))


def load_instance(ref: InstanceRef) -> Instance:
    if isinstance(ref, GeneratorSpec):
        return generate_instance(ref)
    path = Path(ref)
    if not path.is_file():
        raise ValidationError(f"cannot read instance {path}")
    inst = read_instance(path)
    return inst if inst.name else dataclasses.replace(inst, name=path.stem)


def instance_metadata(ref: InstanceRef, instance: Instance) -> dict:
    """Instance id plus placement/class/d/n (blank when not derivable from the name)."""
    if isinstance(ref, GeneratorSpec):
        return dict(instance_id=ref.instance_id, placement=ref.placement,
                    weight_class=ref.weight_class, d=format_d(ref.d), n=ref.n)
    m = _ID_RE.match(instance.name)
    if m:
        return dict(instance_id=instance.name, placement=m[1], weight_class=m[2], d=m[3], n=instance.n)
    return dict(instance_id=instance.name, placement="", weight_class="", d="", n=instance.n)


def run_seed(top_seed: int, instance_id: str, run: int) -> int:
    """Per-run seed from the top-level seed, the instance id and the run index."""
    return derive_seed(stable_seed("run", top_seed, instance_id), run)


def solve(instance: Instance, solver: SolverConfig, seed: int) -> tuple[Tour, int]:
    """Run one solver; returns the tour and the number of fitness evaluations."""
    if solver.algo == "rls":
        res = rls(instance, RlsConfig(solver.fitness, solver.mutation, solver.budget, seed,
                                      time_limit=solver.time_limit))
        return res.best_tour, res.evaluations_used
    if solver.algo == "approx":
        from .approx import SweepParams, approximate_bounded_weights

        tour = approximate_bounded_weights(instance, SweepParams(seed=seed), solver.kmode, solver.tsp_mode)
        return tour, 0
    from .exact import held_karp_wtsp

    return held_karp_wtsp(instance).tour, 0


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_")


def _run_cell(args) -> tuple[ResultRow, Tour]:
    ref, solver, run, top_seed = args
    inst = load_instance(ref)
    meta = instance_metadata(ref, inst)
    seed = run_seed(top_seed, meta["instance_id"], run)
    t0 = time.perf_counter()
    tour, evals = solve(inst, solver, seed)
    wall = time.perf_counter() - t0
    row = ResultRow(**meta, algorithm=solver.name, run=run, seed=seed, fitness=solver.fitness,
                    weighted_cost=weighted_cost(inst, tour), tsp_cost=tsp_cost(inst, tour),
                    evaluations=evals, wall_time=wall)
    return row, tour


def _map(fn, cells: list, jobs: int) -> list:
    if jobs <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells, chunksize=1))


def fill_perf(rows: list[ResultRow]) -> None:
    """Set ``perf`` against the best weighted cost per instance over all algorithms and runs."""
    best: dict[str, float] = {}
    for r in rows:
        best[r.instance_id] = min(best.get(r.instance_id, math.inf), r.weighted_cost)
    for r in rows:
        b = best[r.instance_id]
        r.perf = 0.0 if r.weighted_cost == b else perf(r.weighted_cost, b)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(path, rows: Sequence, fields: Sequence[str], comment: dict | None = None) -> None:
    """CSV with a versioned ``#`` header comment; floats written round-trippably."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        meta = dict(schema=SCHEMA_VERSION, tool=f"wtsp-{__version__}", **(comment or {}))
        fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for r in rows:
            writer.writerow([_fmt(getattr(r, f)) for f in fields])


def _records(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def read_results(path) -> list[ResultRow]:
    types = {f.name: f.type for f in dataclasses.fields(ResultRow)}
    conv = {"int": int, "float": float, "str": str}
    out = []
    for rec in _records(path):
        missing = set(RESULT_FIELDS) - set(rec)
        if missing:
            raise ValidationError(f"{path}: missing columns {sorted(missing)}")
        out.append(ResultRow(**{k: conv[types[k]](rec[k]) for k in RESULT_FIELDS}))
    return out


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Solve every (instance, algorithm, run) cell and write CSV plus tour files.

    Tours go to ``<out stem>_tours/`` next to the CSV.  Rows are ordered by
    instance, algorithm, run regardless of ``jobs``.
    """
    cells = [(ref, solver, run, spec.seed)
             for ref in spec.instances for solver in spec.algorithms for run in range(spec.runs)]
    # fail fast on unreadable inputs before spending compute
    for ref in spec.instances:
        if not isinstance(ref, GeneratorSpec) and not Path(ref).is_file():
            raise ValidationError(f"cannot read instance {ref}")
    results = _map(_run_cell, cells, spec.jobs)
    out = Path(spec.out)
    tour_dir = out.parent / f"{out.stem}_tours"
    tour_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for row, tour in results:
        fname = _safe(f"{row.instance_id}.{row.algorithm}.{row.run}") + ".tour"
        write_tour(tour, tour_dir / fname, name=row.instance_id)
        row.tour_file = f"{tour_dir.name}/{fname}"
        rows.append(row)
    fill_perf(rows)
    write_rows(out, rows, RESULT_FIELDS, dict(seed=spec.seed, runs=spec.runs))
    return rows


@dataclass
class PerfRow:
    weight_class: str
    d: str
    algorithm: str
    count: int
    mean: float
    std: float
    median: float
    superior_to: str = ""


PERF_FIELDS = tuple(f.name for f in dataclasses.fields(PerfRow))


def compute_perf_table(rows: Iterable[ResultRow], alpha: float = 0.05) -> list[PerfRow]:
    """Mean, std, median of perf per (class, d, algorithm) plus superiority markers.

    ``superior_to`` lists, separated by ``;``, the algorithms this one beats
    in a one-sided Mann-Whitney test after Bonferroni adjustment.
    """
    cells: dict[tuple[str, str], dict[str, list[float]]] = {}
    for r in rows:
        cells.setdefault((r.weight_class, r.d), {}).setdefault(r.algorithm, []).append(r.perf)
    out = []
    for (cls, d), groups in sorted(cells.items()):
        if len(groups) < 2:
            raise ValidationError(f"class {cls} d={d}: need at least two algorithms")
        wins: dict[str, list[str]] = {a: [] for a in groups}
        for comp in pairwise_superiority(groups, alpha):
            if comp.significant:
                wins[comp.better].append(comp.worse)
        for algo in sorted(groups):
            v = np.asarray(groups[algo])
            std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
            out.append(PerfRow(cls, d, algo, len(v), float(v.mean()), std, float(np.median(v)),
                               ";".join(sorted(wins[algo]))))
    return out


@dataclass
class RatioRow:
    instance_id: str
    placement: str
    weight_class: str
    d: str
    n: int
    run: int
    seed: int
    cost_tsp_driver: float
    cost_weighted_driver: float
    ratio: float


RATIO_FIELDS = tuple(f.name for f in dataclasses.fields(RatioRow))


def _ratio_cell(args) -> RatioRow:
    ref, solver, run, top_seed = args
    inst = load_instance(ref)
    meta = instance_metadata(ref, inst)
    seed = run_seed(top_seed, meta["instance_id"], run)
    if solver.algo == "exact":
        from .exact import exact_tsp, held_karp_wtsp

        t_tsp, t_w = exact_tsp(inst).tour, held_karp_wtsp(inst).tour
    else:
        # both drivers share the seed, so run i is paired with run i
        t_tsp = rls(inst, RlsConfig("tsp", solver.mutation, solver.budget, seed,
                                    time_limit=solver.time_limit)).best_tour
        t_w = rls(inst, RlsConfig("weighted", solver.mutation, solver.budget, seed,
                                  time_limit=solver.time_limit)).best_tour
    c_tsp, c_w = weighted_cost(inst, t_tsp), weighted_cost(inst, t_w)
    if c_w <= 0:
        raise ValidationError(f"{meta['instance_id']}: zero weighted cost, ratio undefined")
    return RatioRow(**meta, run=run, seed=seed, cost_tsp_driver=c_tsp, cost_weighted_driver=c_w,
                    ratio=c_tsp / c_w)


def driver_ratio_protocol(instances: Sequence[InstanceRef], solver: SolverConfig | None = None,
                          runs: int = 10, seed: int = 0, jobs: int = 1) -> list[RatioRow]:
    """Weighted cost of the TSP-driven tour over that of the weighted-driven tour.

    With ``solver.algo == "exact"`` the two tours are the exact TSP optimum and
    the exact weighted optimum, so every ratio is at least 1.
    """
    solver = solver or SolverConfig("rls", "inversion")
    if solver.algo not in ("rls", "exact"):
        raise ValidationError("driver ratios need algo 'rls' or 'exact'")
    if runs < 1:
        raise ValidationError("runs must be at least 1")
    cells = [(ref, solver, run, seed) for ref in instances for run in range(runs)]
    return _map(_ratio_cell, cells, jobs)


@dataclass
class RatioSummary:
    placement: str
    weight_class: str
    d: str
    n: int
    count: int
    median: float
    q1: float
    q3: float
    max: float


SUMMARY_FIELDS = tuple(f.name for f in dataclasses.fields(RatioSummary))


def summarize_ratios(rows: Iterable[RatioRow]) -> list[RatioSummary]:
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        groups.setdefault((r.placement, r.weight_class, r.d, r.n), []).append(r.ratio)
    out = []
    for key, vals in sorted(groups.items()):
        v = np.asarray(vals)
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        out.append(RatioSummary(*key, len(v), float(med), float(q1), float(q3), float(v.max())))
    return out


def audit_tour(instance: Instance, tour_path, expected: dict | None = None, tol: float = 1e-6) -> CostReport:
    """Recompute costs of a persisted tour; raise ``AuditMismatch`` if they disagree.

    ``expected`` maps ``weighted`` / ``tsp`` / ``latency`` to recorded values.
    Tolerance is absolute, scaled by ``max(1, |recorded|)``.
    """
    tour = read_tour(tour_path)
    if len(tour) != instance.n:
        raise ValidationError(f"tour has {len(tour)} cities, instance has {instance.n}")
    if tour[0] != instance.start:
        raise AuditMismatch(f"tour starts at city {tour[0] + 1}, expected {instance.start + 1}")
    report = cost_report(instance, tour)
    bad = []
    for key, rec in (expected or {}).items():
        got = getattr(report, key)
        if abs(got - rec) > tol * max(1.0, abs(rec)):
            bad.append(f"{key}: recorded {rec!r}, recomputed {got!r}")
    if bad:
        raise AuditMismatch("; ".join(bad))
    return report


def audit_results(results_csv, instances: dict[str, Instance], tol: float = 1e-6) -> int:
    """Audit the rows of a results CSV whose instance id is in ``instances``.

    Returns the number of rows checked.
    """
    path = Path(results_csv)
    count = 0
    for row in read_results(path):
        inst = instances.get(row.instance_id)
        if inst is None:
            continue
        audit_tour(inst, path.parent / row.tour_file,
                   {"weighted": row.weighted_cost, "tsp": row.tsp_cost}, tol)
        count += 1
    return count
