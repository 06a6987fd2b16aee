"""Command-line front door.

Four subcommands: cluster runs one technique on one log and writes the
solution plus its evaluation, evaluate re-scores an existing solution,
gen-constraints draws a constraint sample from a reference partition,
and benchmark executes a sweep config. All randomness flows from the
--seed flag, so a rerun with identical inputs and flags reproduces
identical output files; the --jobs flag only adds workers and never
changes results. Exit codes: 0 success, 2 bad input, 1 internal error.

Set TRACECLUSTER_LOG_LEVEL=DEBUG (or INFO, ...) for diagnostics.
"""

import argparse
import json
import logging
import os
import sys
import traceback

from ._version import __version__
from .ahc import constrained_cluster
from .benchmark import (
    generate_log,
    parse_method,
    read_sweep_config,
    run_experiment,
    write_results_csv,
    write_summary_json,
)
from .condritrac import CondritracConfig, condritrac, write_assignment_trace
from .constraints import (
    empty_variant_constraints,
    extend,
    generate_constraints,
    lift,
    read_constraints_tsv,
    validate,
    write_constraints_tsv,
)
from .errors import TraceClusterError
from .evaluation import evaluate_solution, write_report_json
from .log_model import ColumnMapping, group, parse_csv, parse_xes
from .solution import (
    read_trace_csv,
    write_solution_json,
    write_trace_csv,
    write_variant_csv,
)

log = logging.getLogger("tracecluster")


def _add_log_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("log", help="event log file (.xes, or CSV with a header row)")
    p.add_argument("--trace-column", default="trace_id",
                   help="CSV column holding the trace id")
    p.add_argument("--activity-column", default="activity",
                   help="CSV column holding the activity label")
    p.add_argument("--timestamp-column", default="timestamp",
                   help="CSV column holding the timestamp")
    p.add_argument("--timestamp-format", default="%Y-%m-%d %H:%M:%S",
                   help="strptime format for CSV timestamps")


def _load_log(args):
    if args.log.lower().endswith(".xes"):
        return parse_xes(args.log)
    mapping = ColumnMapping(
        trace_id=args.trace_column,
        activity=args.activity_column,
        timestamp=args.timestamp_column,
    )
    return parse_csv(args.log, mapping, timestamp_format=args.timestamp_format)


def _out_path(directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


def cmd_cluster(args) -> int:
    event_log = _load_log(args)
    g = group(event_log)
    log.info("loaded %d traces, %d variants", g.size, g.supp)
    cs = None
    if args.constraints:
        cs = read_constraints_tsv(args.constraints)
        validate(cs, event_log)
        vcs = lift(extend(cs), g)
    else:
        vcs = empty_variant_constraints(g)
    method, kgram_k = parse_method(args.method)
    trace = None
    if method == "condritrac":
        config = CondritracConfig(
            k=args.k, cvt=args.cvt, tvt=args.tvt,
            dependency_threshold=args.dependency_threshold,
            separate_boolean=args.separate, seed=args.seed,
        )
        solution, trace = condritrac(g, vcs, config)
    else:
        solution = constrained_cluster(
            g, method, vcs, args.k,
            kgram_k=kgram_k, metric=args.metric, jobs=args.jobs,
        )
    truth = None
    if args.ground_truth:
        truth = read_trace_csv(args.ground_truth, g, method="ground-truth")
    report = evaluate_solution(
        solution,
        dependency_threshold=args.dependency_threshold,
        ground_truth=truth,
        constraint_sets={"given": cs} if cs is not None else None,
    )
    write_trace_csv(solution, _out_path(args.out, "solution.csv"))
    write_variant_csv(solution, _out_path(args.out, "solution_variants.csv"))
    write_solution_json(solution, _out_path(args.out, "solution.json"))
    doc = report.to_json_dict()
    doc["run_config"] = _resolved_run_config(args, method, kgram_k)
    _write_json(_out_path(args.out, "report.json"), doc)
    if trace is not None:
        write_assignment_trace(_out_path(args.out, "assignment_trace.json"), trace)
    print(
        f"{solution.method}: k={solution.n_clusters}, "
        f"weighted f1 = {report.f1.value:.4f}, wrote {args.out}/solution.csv"
    )
    return 0


def _resolved_run_config(args, method: str, kgram_k: int) -> dict:
    cfg = {
        "log": args.log,
        "method": method,
        "k": args.k,
        "seed": args.seed,
        "dependency_threshold": args.dependency_threshold,
        "constraints": args.constraints,
        "ground_truth": args.ground_truth,
    }
    if method == "kgram":
        cfg["kgram_k"] = kgram_k
    if method == "condritrac":
        cfg.update(cvt=args.cvt, tvt=args.tvt, separate_boolean=args.separate)
    else:
        cfg["metric"] = args.metric
    return cfg


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_evaluate(args) -> int:
    event_log = _load_log(args)
    g = group(event_log)
    solution = read_trace_csv(args.solution, g)
    cs = None
    if args.constraints:
        cs = read_constraints_tsv(args.constraints)
        validate(cs, event_log)
    truth = None
    if args.ground_truth:
        truth = read_trace_csv(args.ground_truth, g, method="ground-truth")
    baseline = None
    if args.baseline:
        baseline = read_trace_csv(args.baseline, g, method="baseline")
    report = evaluate_solution(
        solution,
        dependency_threshold=args.dependency_threshold,
        ground_truth=truth,
        constraint_sets={"given": cs} if cs is not None else None,
        baseline=baseline,
    )
    write_report_json(_out_path(args.out, "report.json"), report)
    extras = []
    if report.jaccard_to_truth is not None:
        extras.append(f"jaccard = {report.jaccard_to_truth:.4f}")
    if cs is not None:
        rep = report.violations["given"]
        extras.append(f"violations ML {rep.ml_pct:.1f}% / CL {rep.cl_pct:.1f}%")
    tail = (", " + ", ".join(extras)) if extras else ""
    print(f"weighted f1 = {report.f1.value:.4f}{tail}, wrote {args.out}/report.json")
    return 0


def cmd_gen_constraints(args) -> int:
    event_log = _load_log(args)
    g = group(event_log)
    truth = read_trace_csv(args.ground_truth, g, method="ground-truth")
    cs = generate_constraints(truth, args.percentage, args.seed)
    write_constraints_tsv(cs, args.out)
    print(
        f"{len(cs.must_links)} must-links and {len(cs.cannot_links)} "
        f"cannot-links written to {args.out}"
    )
    return 0


def cmd_benchmark(args) -> int:
    cfg = read_sweep_config(args.config)
    event_log, truth = generate_log(cfg.log_spec)
    log.info(
        "benchmark log: %d traces, %d variants, %d planted clusters",
        truth.grouped.size, truth.grouped.supp, cfg.log_spec.k_true,
    )
    rows, summary = run_experiment(event_log, truth, cfg, jobs=args.jobs)
    write_results_csv(_out_path(args.out, "results.csv"), rows)
    write_summary_json(_out_path(args.out, "summary.json"), summary)
    failed = len(summary["errors"])
    print(
        f"{len(rows)} result rows, {failed} failed cells, "
        f"wrote {args.out}/results.csv"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracecluster",
        description="Constraint-aware trace clustering for process event logs.",
    )
    parser.add_argument("--version", action="version",
                        version=f"tracecluster {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster one log and write the solution")
    _add_log_arguments(p)
    p.add_argument("--method", required=True,
                   help="ged, kgram:N (or e.g. 3gram), mra, or condritrac")
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    p.add_argument("--constraints",
                   help="constraint TSV (lines: ML or CL, tab, id, tab, id)")
    p.add_argument("--ground-truth",
                   help="trace-level reference partition CSV for Jaccard")
    p.add_argument("--metric", default="euclidean",
                   choices=("euclidean", "manhattan"),
                   help="vector distance for kgram and mra")
    p.add_argument("--cvt", type=float, default=0.0,
                   help="cluster metric floor (condritrac)")
    p.add_argument("--tvt", type=float, default=0.0,
                   help="trace-group metric floor (condritrac)")
    p.add_argument("--separate", action="store_true",
                   help="park unassignable groups in an extra cluster")
    p.add_argument("--dependency-threshold", type=float, default=0.9,
                   help="arc acceptance threshold for model discovery")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker count; results do not depend on it")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score an existing solution CSV")
    _add_log_arguments(p)
    p.add_argument("--solution", required=True, help="trace-level solution CSV")
    p.add_argument("--constraints", help="constraint TSV to check violations")
    p.add_argument("--ground-truth", help="reference partition CSV for Jaccard")
    p.add_argument("--baseline",
                   help="second solution CSV for relative improvement")
    p.add_argument("--dependency-threshold", type=float, default=0.9)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-constraints",
                       help="sample constraints from a reference partition")
    _add_log_arguments(p)
    p.add_argument("--ground-truth", required=True,
                   help="trace-level reference partition CSV")
    p.add_argument("--percentage", type=float, required=True,
                   help="constraint count as percent of the variant count")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", default="constraints.tsv", help="output TSV path")
    p.set_defaults(func=cmd_gen_constraints)

    p = sub.add_parser("benchmark", help="run a synthetic sweep config")
    p.add_argument("--config", required=True, help="sweep config JSON")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel sweep cells; results do not depend on it")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("TRACECLUSTER_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceClusterError, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - last-resort diagnostics
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
