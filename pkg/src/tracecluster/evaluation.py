"""Quality and justifiability metrics for clustering solutions.

A solution is scored by how well each cluster's own discovered model
explains the cluster (weighted-average f1), how close the partition is
to a reference partition (Jaccard index over instance pairs), and how
many of the given raw constraints it violates. Violations of
unconstrained solutions double as an informativeness measure: raw
constraints that unconstrained clustering already satisfies carry
little extra information.
"""

import csv
import json
from dataclasses import dataclass, field

from ._version import __version__
from .constraints import ConstraintSet
from .discovery import DirectlyFollowsStats, discover, f1
from .errors import DomainMismatchError, UnknownTraceIdError
from .solution import ClusteringSolution


@dataclass(frozen=True)
class ClusterScore:
    cluster: int
    traces: int
    variants: int
    recall: float
    precision: float
    f1: float

    def to_json_dict(self) -> dict:
        return {
            "cluster": self.cluster, "traces": self.traces,
            "variants": self.variants, "recall": self.recall,
            "precision": self.precision, "f1": self.f1,
        }


@dataclass(frozen=True)
class F1Report:
    """Weighted-average f1 with its per-cluster breakdown."""

    value: float
    weight_unit: str  # "traces" or "variants"
    clusters: tuple[ClusterScore, ...]


def _cluster_stats(sol: ClusteringSolution, c: int) -> DirectlyFollowsStats:
    stats = DirectlyFollowsStats()
    for v in sol.members(c):
        var = sol.grouped.variants[v]
        stats.add_sequence(var.sequence, var.multiplicity)
    return stats


def weighted_f1(
    sol: ClusteringSolution,
    dependency_threshold: float = 0.9,
    weight_unit: str = "traces",
) -> F1Report:
    """Score each cluster against its own discovered model and average.

    Weights are cluster sizes in traces by default; "variants" weighs
    every variant once regardless of multiplicity.
    """
    if weight_unit not in ("traces", "variants"):
        raise ValueError(f"unknown weight unit {weight_unit!r}")
    scores = []
    total_w = 0
    acc = 0.0
    for c in range(sol.n_clusters):
        members = sol.members(c)
        stats = _cluster_stats(sol, c)
        model = discover(stats, dependency_threshold)
        conf = f1(model, stats)
        score = ClusterScore(
            cluster=c, traces=stats.weight, variants=len(members),
            recall=conf.recall, precision=conf.precision, f1=conf.f1,
        )
        scores.append(score)
        w = score.traces if weight_unit == "traces" else score.variants
        total_w += w
        acc += w * score.f1
    return F1Report(
        value=acc / total_w, weight_unit=weight_unit, clusters=tuple(scores),
    )


@dataclass(frozen=True)
class RelativeImprovement:
    ratio: float
    band: str  # "better", "equal" or "worse" for the first argument

    def to_json_dict(self) -> dict:
        return {"ratio": self.ratio, "band": self.band}


def relative_improvement(ek: float, tc: float) -> RelativeImprovement:
    """Ratio of two weighted f1 scores, first relative to second."""
    if tc <= 0:
        raise ZeroDivisionError(
            f"relative improvement needs a positive reference score, got {tc}"
        )
    ratio = ek / tc
    band = "better" if ratio > 1 else ("worse" if ratio < 1 else "equal")
    return RelativeImprovement(ratio=ratio, band=band)


def _pairs(w: int) -> int:
    return w * (w - 1) // 2


def jaccard_index(
    a: ClusteringSolution, b: ClusteringSolution, unit: str = "variant"
) -> float:
    """Pair-counting overlap of two partitions of the same log.

    n11 counts instance pairs co-clustered in both solutions, n10 and
    n01 pairs co-clustered in exactly one. The unit is "variant"
    (each distinct sequence once) or "trace" (multiplicity-weighted).
    Two all-singleton partitions have no pairs anywhere and are
    identical, hence 1.0.
    """
    if unit not in ("variant", "trace"):
        raise ValueError(f"unknown comparison unit {unit!r}")
    av, bv = a.grouped.variants, b.grouped.variants
    if len(av) != len(bv) or any(
        x.sequence != y.sequence or x.multiplicity != y.multiplicity
        for x, y in zip(av, bv)
    ):
        raise DomainMismatchError("solutions cluster different grouped logs")
    cells: dict[tuple[int, int], int] = {}
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for v in range(len(av)):
        w = 1 if unit == "variant" else av[v].multiplicity
        key = (a.assignment[v], b.assignment[v])
        cells[key] = cells.get(key, 0) + w
        rows[key[0]] = rows.get(key[0], 0) + w
        cols[key[1]] = cols.get(key[1], 0) + w
    n11 = sum(_pairs(w) for w in cells.values())
    n10 = sum(_pairs(w) for w in rows.values()) - n11
    n01 = sum(_pairs(w) for w in cols.values()) - n11
    denom = n11 + n10 + n01
    return 1.0 if denom == 0 else n11 / denom


@dataclass(frozen=True)
class ViolationReport:
    """Share of raw constraints a solution breaks, in percent.

    Raw pairs are judged directly: a must-link is violated when its two
    traces sit in different clusters, a cannot-link when they share one.
    Transitive extensions are deliberately not consulted.
    """

    ml_total: int
    cl_total: int
    ml_violated: int
    cl_violated: int

    @property
    def ml_pct(self) -> float:
        return 100.0 * self.ml_violated / self.ml_total if self.ml_total else 0.0

    @property
    def cl_pct(self) -> float:
        return 100.0 * self.cl_violated / self.cl_total if self.cl_total else 0.0

    def to_json_dict(self) -> dict:
        return {
            "ml_total": self.ml_total, "cl_total": self.cl_total,
            "ml_violated": self.ml_violated, "cl_violated": self.cl_violated,
            "ml_pct": self.ml_pct, "cl_pct": self.cl_pct,
        }


def violation_percentages(
    sol: ClusteringSolution, cs: ConstraintSet
) -> ViolationReport:
    of = sol.trace_assignment()

    def cluster(tid: str) -> int:
        if tid not in of:
            raise UnknownTraceIdError(f"trace id {tid!r} not in solution")
        return of[tid]

    ml_violated = sum(
        1 for x, y in cs.must_links if cluster(x) != cluster(y)
    )
    cl_violated = sum(
        1 for x, y in cs.cannot_links if cluster(x) == cluster(y)
    )
    return ViolationReport(
        ml_total=len(cs.must_links), cl_total=len(cs.cannot_links),
        ml_violated=ml_violated, cl_violated=cl_violated,
    )


def informativeness_report(
    solutions: list[ClusteringSolution],
    constraint_sets: dict[str, ConstraintSet],
) -> list[dict]:
    """Cross-tabulate violation percentages: solution x constraint set.

    Meant for unconstrained solutions: high violation percentages mean
    the constraints carry information the solutions missed. One row per
    (solution, set), in input order with sets sorted by name.
    """
    rows = []
    for i, sol in enumerate(solutions):
        for name in sorted(constraint_sets):
            rep = violation_percentages(sol, constraint_sets[name])
            rows.append({
                "solution": i,
                "method": sol.method,
                "constraint_set": name,
                "ml_pct": rep.ml_pct,
                "cl_pct": rep.cl_pct,
                "ml_total": rep.ml_total,
                "cl_total": rep.cl_total,
            })
    return rows


@dataclass(frozen=True)
class EvaluationReport:
    """Everything the evaluate command reports for one solution."""

    method: str
    params: dict
    n_clusters: int
    dependency_threshold: float
    f1: F1Report
    jaccard_to_truth: float | None = None
    jaccard_unit: str = "variant"
    improvement_over_baseline: RelativeImprovement | None = None
    baseline_method: str | None = None
    violations: dict[str, ViolationReport] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "tool_version": f"tracecluster {__version__}",
            "method": self.method,
            "params": self.params,
            "n_clusters": self.n_clusters,
            "dependency_threshold": self.dependency_threshold,
            "weighted_f1": self.f1.value,
            "weight_unit": self.f1.weight_unit,
            "clusters": [c.to_json_dict() for c in self.f1.clusters],
            "jaccard_to_truth": self.jaccard_to_truth,
            "jaccard_unit": self.jaccard_unit,
            "improvement_over_baseline": (
                None if self.improvement_over_baseline is None
                else self.improvement_over_baseline.to_json_dict()
            ),
            "baseline_method": self.baseline_method,
            "violations": {
                name: rep.to_json_dict()
                for name, rep in sorted(self.violations.items())
            },
        }


def evaluate_solution(
    sol: ClusteringSolution,
    dependency_threshold: float = 0.9,
    ground_truth: ClusteringSolution | None = None,
    constraint_sets: dict[str, ConstraintSet] | None = None,
    baseline: ClusteringSolution | None = None,
    jaccard_unit: str = "variant",
    weight_unit: str = "traces",
) -> EvaluationReport:
    rep = weighted_f1(sol, dependency_threshold, weight_unit)
    jac = None
    if ground_truth is not None:
        jac = jaccard_index(sol, ground_truth, unit=jaccard_unit)
    improvement = None
    baseline_method = None
    if baseline is not None:
        base = weighted_f1(baseline, dependency_threshold, weight_unit)
        improvement = relative_improvement(rep.value, base.value)
        baseline_method = baseline.method
    violations = {}
    if constraint_sets:
        for name, cs in constraint_sets.items():
            violations[name] = violation_percentages(sol, cs)
    return EvaluationReport(
        method=sol.method,
        params=dict(sol.params),
        n_clusters=sol.n_clusters,
        dependency_threshold=dependency_threshold,
        f1=rep,
        jaccard_to_truth=jac,
        jaccard_unit=jaccard_unit,
        improvement_over_baseline=improvement,
        baseline_method=baseline_method,
        violations=violations,
    )


def write_report_json(path: str, report: EvaluationReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


REPORT_CSV_COLUMNS = [
    "method", "n_clusters", "weighted_f1", "jaccard_to_truth",
    "improvement_ratio", "ml_violated_pct", "cl_violated_pct",
]


def report_csv_row(report: EvaluationReport) -> list[str]:
    """Flatten a report to one plot-friendly CSV row.

    Violation columns show the first constraint set by name; blank
    when nothing applies.
    """
    ml = cl = ""
    if report.violations:
        first = sorted(report.violations)[0]
        ml = repr(report.violations[first].ml_pct)
        cl = repr(report.violations[first].cl_pct)
    return [
        report.method,
        str(report.n_clusters),
        repr(report.f1.value),
        "" if report.jaccard_to_truth is None else repr(report.jaccard_to_truth),
        "" if report.improvement_over_baseline is None
        else repr(report.improvement_over_baseline.ratio),
        ml,
        cl,
    ]


def write_report_csv(path: str, reports: list[EvaluationReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_COLUMNS)
        for rep in reports:
            writer.writerow(report_csv_row(rep))
