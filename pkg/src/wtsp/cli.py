"""Command line interface: ``wtsp <subcommand> ...``.

Exit codes: 0 success, 2 validation error, 3 audit mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .core import WtspError, cost_report
from .heuristics import FITNESS, MUTATIONS, RlsConfig, rls
from .instances.generate import (
    CLASSES,
    PLACEMENTS,
    SUITE_REPLICATIONS,
    SUITE_SIZES,
    TSPGEN_ROUNDS,
    GeneratorSpec,
    generate_instance,
    read_manifest,
    suite_specs,
    write_manifest,
)
from .instances.tsplib import read_instance, write_instance, write_tour

log = logging.getLogger("wtsp")

EXIT_OK, EXIT_VALIDATION, EXIT_AUDIT = 0, 2, 3


def _emit(args, header: list[str], rows: list[list]) -> None:
    """Write a small CSV table to ``--out`` or stdout."""
    import csv

    fh = open(args.out, "w", newline="") if getattr(args, "out", None) else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _report_rows(instance, tour, extra: dict) -> tuple[list[str], list[list]]:
    rep = cost_report(instance, tour)
    header = list(extra) + ["weighted_cost", "tsp_cost", "latency", "tour"]
    row = list(extra.values()) + [rep.weighted, rep.tsp, rep.latency, " ".join(str(c + 1) for c in tour)]
    return header, [row]


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.n, args.placement, args.weight_class, args.d, args.placement_seed, args.weight_seed)
    inst = generate_instance(spec, tspgen_rounds=args.tspgen_rounds)
    write_instance(inst, args.out)
    log.info("wrote %s", args.out)
    return EXIT_OK


def cmd_generate_suite(args) -> int:
    specs = list(suite_specs(args.sizes, args.placements, args.replications))
    if args.limit is not None:
        specs = specs[: args.limit]
    count = write_manifest(args.manifest, specs)
    log.info("manifest %s: %d instances", args.manifest, count)
    if args.materialize:
        out = Path(args.materialize)
        out.mkdir(parents=True, exist_ok=True)
        for spec in specs:
            write_instance(generate_instance(spec), out / f"{spec.instance_id}.wtsp")
    return EXIT_OK


def _maybe_write_tour(args, tour, name: str) -> None:
    if args.tour_out:
        write_tour(tour, args.tour_out, name=name)


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    res = rls(inst, RlsConfig(args.fitness, args.mutation, args.budget, args.seed,
                              time_limit=args.time_limit))
    _maybe_write_tour(args, res.best_tour, inst.name)
    header, rows = _report_rows(inst, res.best_tour, {
        "instance": inst.name, "algorithm": f"rls[{args.mutation}]", "fitness": args.fitness,
        "seed": args.seed, "evaluations": res.evaluations_used})
    _emit(args, header, rows)
    return EXIT_OK


def cmd_approx(args) -> int:
    from .approx import SweepParams, approximate_bounded_weights

    inst = read_instance(args.instance)
    params = SweepParams(c=args.c, b_mode=args.b_mode, m=args.m, seed=args.seed, selector=args.selector)
    tour = approximate_bounded_weights(inst, params, args.kmode, args.tsp_mode)
    _maybe_write_tour(args, tour, inst.name)
    header, rows = _report_rows(inst, tour, {"instance": inst.name, "algorithm": f"approx[{args.kmode}]",
                                             "seed": args.seed})
    _emit(args, header, rows)
    return EXIT_OK


def cmd_exact(args) -> int:
    from . import exact

    inst = read_instance(args.instance)
    fn = {"held-karp": exact.held_karp_wtsp, "brute-force": exact.brute_force_wtsp,
          "tsp": exact.exact_tsp, "mlp": exact.exact_mlp}[args.method]
    res = fn(inst)
    _maybe_write_tour(args, res.tour, inst.name)
    header, rows = _report_rows(inst, res.tour, {"instance": inst.name, "method": args.method,
                                                 "objective": res.cost})
    _emit(args, header, rows)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .harness import ExperimentSpec, run_experiment

    cfg = Path(args.config)
    data = json.loads(cfg.read_text())
    for key in ("seed", "jobs", "out"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.budget is not None:
        for algo in data.setdefault("algorithms", [{}]):
            algo["budget"] = args.budget
    spec = ExperimentSpec.from_dict(data, base_dir=cfg.parent)
    rows = run_experiment(spec)
    log.info("%d rows written to %s", len(rows), spec.out)
    return EXIT_OK


def _refs(args) -> list:
    refs: list = []
    if args.manifest:
        refs += read_manifest(args.manifest)
    refs += list(args.instances)
    if not refs:
        raise WtspError("no instances given")
    return refs


def cmd_ratio(args) -> int:
    from .harness import (RATIO_FIELDS, SUMMARY_FIELDS, SolverConfig, driver_ratio_protocol, summarize_ratios,
                          write_rows)

    solver = SolverConfig("exact" if args.oracle else "rls", args.mutation, budget=args.budget,
                          time_limit=args.time_limit)
    rows = driver_ratio_protocol(_refs(args), solver, args.runs, args.seed, args.jobs)
    write_rows(args.out, rows, RATIO_FIELDS, dict(seed=args.seed, runs=args.runs))
    if args.summary_out:
        write_rows(args.summary_out, summarize_ratios(rows), SUMMARY_FIELDS, dict(seed=args.seed))
    return EXIT_OK


def cmd_stats(args) -> int:
    from .harness import PERF_FIELDS, compute_perf_table, read_results, write_rows

    table = compute_perf_table(read_results(args.results), args.alpha)
    if args.out:
        write_rows(args.out, table, PERF_FIELDS)
    else:
        _emit(args, list(PERF_FIELDS), [[getattr(r, f) for f in PERF_FIELDS] for r in table])
    return EXIT_OK


def cmd_audit(args) -> int:
    from .harness import AuditMismatch, audit_results, audit_tour

    inst = read_instance(args.instance)
    try:
        if args.results:
            count = audit_results(args.results, {inst.name: inst}, args.tol)
            if count == 0:
                raise WtspError(f"no rows for instance {inst.name!r} in {args.results}")
            print(f"audited {count} rows: ok")
            return EXIT_OK
        if not args.tour:
            raise WtspError("audit needs a tour file or --results")
        expected = {k: v for k, v in (("weighted", args.weighted), ("tsp", args.tsp),
                                      ("latency", args.latency)) if v is not None}
        rep = audit_tour(inst, args.tour, expected, args.tol)
    except AuditMismatch as exc:
        print(f"audit mismatch: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    print(f"weighted={rep.weighted!r} tsp={rep.tsp!r} latency={rep.latency!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wtsp", description="Node weight dependent TSP solvers and experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=["csv"], default="csv", help="output format")
        return sp

    g = add("generate", cmd_generate, "generate one instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--placement", choices=PLACEMENTS, default="rue")
    g.add_argument("--class", dest="weight_class", choices=CLASSES, default="C2")
    g.add_argument("--d", type=float, default=5)
    g.add_argument("--placement-seed", type=int, default=0)
    g.add_argument("--weight-seed", type=int, default=0)
    g.add_argument("--tspgen-rounds", type=int, default=TSPGEN_ROUNDS)
    g.add_argument("--out", required=True)

    gs = add("generate-suite", cmd_generate_suite, "write the benchmark suite manifest")
    gs.add_argument("--manifest", required=True)
    gs.add_argument("--sizes", type=int, nargs="+", default=list(SUITE_SIZES))
    gs.add_argument("--placements", nargs="+", choices=PLACEMENTS, default=list(PLACEMENTS))
    gs.add_argument("--replications", type=int, default=SUITE_REPLICATIONS)
    gs.add_argument("--limit", type=int)
    gs.add_argument("--materialize", metavar="DIR", help="also write instance files to DIR")

    s = add("solve", cmd_solve, "randomized local search on one instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=["rls"], default="rls")
    s.add_argument("--mutation", choices=MUTATIONS, default="inversion")
    s.add_argument("--fitness", choices=FITNESS, default="weighted")
    s.add_argument("--budget", type=int, help="fitness evaluations (default 1000*n)")
    s.add_argument("--time-limit", type=float, help="seconds; alternative stopping rule")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tour-out")
    s.add_argument("--out")

    a = add("approx", cmd_approx, "concatenation approximation (metric, integer weights)")
    a.add_argument("instance")
    a.add_argument("--kmode", choices=["exact", "heuristic"], default="heuristic")
    a.add_argument("--tsp-mode", choices=["christofides", "double_tree"], default="christofides")
    a.add_argument("--b-mode", choices=["grid", "random", "fixed"], default="grid")
    a.add_argument("--m", type=int, default=64)
    a.add_argument("--c", type=float, default=3.59)
    a.add_argument("--selector", choices=["sweep", "shortest_path"], default="sweep")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--tour-out")
    a.add_argument("--out")

    e = add("exact", cmd_exact, "exact solvers for small instances")
    e.add_argument("instance")
    e.add_argument("--method", choices=["held-karp", "brute-force", "tsp", "mlp"], default="held-karp")
    e.add_argument("--tour-out")
    e.add_argument("--out")

    x = add("experiment", cmd_experiment, "run an experiment described by a JSON file")
    x.add_argument("--config", required=True)
    x.add_argument("--seed", type=int)
    x.add_argument("--jobs", type=int)
    x.add_argument("--budget", type=int)
    x.add_argument("--out")

    r = add("ratio", cmd_ratio, "fitness-driver ratio protocol")
    r.add_argument("instances", nargs="*")
    r.add_argument("--manifest")
    r.add_argument("--runs", type=int, default=10)
    r.add_argument("--mutation", choices=MUTATIONS, default="inversion")
    r.add_argument("--budget", type=int)
    r.add_argument("--time-limit", type=float)
    r.add_argument("--oracle", action="store_true", help="exact solvers instead of local search")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--out", required=True)
    r.add_argument("--summary-out")

    st = add("stats", cmd_stats, "perf table with pairwise rank tests")
    st.add_argument("results")
    st.add_argument("--alpha", type=float, default=0.05)
    st.add_argument("--out")

    au = add("audit", cmd_audit, "recompute costs of persisted tours")
    au.add_argument("instance")
    au.add_argument("tour", nargs="?")
    au.add_argument("--results", help="results CSV; audits every row of this instance")
    au.add_argument("--weighted", type=float)
    au.add_argument("--tsp", type=float)
    au.add_argument("--latency", type=float)
    au.add_argument("--tol", type=float, default=1e-6)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (WtspError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
