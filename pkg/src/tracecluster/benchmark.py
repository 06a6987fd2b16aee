"""Synthetic ground-truth logs and the experiment sweep around them.

A synthetic log plants k clusters, each sampled from its own skeleton
(backbone sequence with optional skips, stutters and random noise), so
the generating cluster of every trace is known. The sweep then runs
each technique unconstrained and at several constraint percentages and
emits a long-format result table (technique, percentage, k, seed,
metric, value) plus an aggregate summary.

Timing rows (metric wall_time_s) are the only non-deterministic part
of the table; everything else is a pure function of the inputs, and
the summary never aggregates timings.
"""

import csv
import json
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .ahc import constrained_cluster
from .condritrac import CondritracConfig, condritrac
from .constraints import (
    ConstraintSet,
    empty_variant_constraints,
    extend,
    generate_constraints,
    lift,
)
from .errors import InvalidSpecError, TraceClusterError
from .evaluation import jaccard_index, violation_percentages, weighted_f1
from .log_model import Event, EventLog, GroupedEventLog, Trace, group
from .solution import ClusteringSolution

_BASE_TIME = datetime(2024, 1, 1, 8, 0, 0, tzinfo=timezone.utc)
_COLLISION_RETRIES = 8


@dataclass(frozen=True)
class ClusterSkeleton:
    """Generator for one planted cluster.

    backbone is the canonical activity sequence. Interior steps may be
    skipped with branch_prob and any step may stutter once with
    loop_prob. extra_activities widen the insertion-noise alphabet.
    """

    backbone: tuple[str, ...]
    branch_prob: float = 0.0
    loop_prob: float = 0.0
    extra_activities: tuple[str, ...] = ()

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.backbone + self.extra_activities))


@dataclass(frozen=True)
class SyntheticLogSpec:
    skeletons: tuple[ClusterSkeleton, ...]
    traces_per_cluster: int
    noise_rate: float = 0.0
    seed: int = 0

    @property
    def k_true(self) -> int:
        return len(self.skeletons)

    def __post_init__(self):
        if self.k_true < 2:
            raise InvalidSpecError("a planted log needs at least 2 clusters")
        if self.traces_per_cluster < 1:
            raise InvalidSpecError("traces_per_cluster must be positive")
        backbones = [s.backbone for s in self.skeletons]
        if len(set(backbones)) != len(backbones):
            raise InvalidSpecError("cluster backbones must be distinct")
        for s in self.skeletons:
            if not s.backbone:
                raise InvalidSpecError("empty backbone")
            for p in (s.branch_prob, s.loop_prob):
                if not 0.0 <= p <= 1.0:
                    raise InvalidSpecError(f"probability {p} outside [0, 1]")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise InvalidSpecError(f"noise rate {self.noise_rate} outside [0, 1]")


def _sample_sequence(skel: ClusterSkeleton, noise_rate: float,
                     rng: random.Random) -> list[str]:
    seq: list[str] = []
    last = len(skel.backbone) - 1
    for i, a in enumerate(skel.backbone):
        if 0 < i < last and rng.random() < skel.branch_prob:
            continue
        seq.append(a)
        if rng.random() < skel.loop_prob:
            seq.append(a)
    if noise_rate:
        if len(seq) > 2 and rng.random() < noise_rate:
            del seq[rng.randrange(len(seq))]
        if rng.random() < noise_rate:
            seq.insert(rng.randrange(len(seq) + 1), rng.choice(skel.alphabet))
    return seq


def generate_log(spec: SyntheticLogSpec) -> tuple[EventLog, ClusteringSolution]:
    """Sample the planted log and its ground-truth partition.

    Variant ownership is unambiguous: a sampled sequence that another
    cluster already produced is redrawn, and after a few futile redraws
    it gets a cluster-private marker activity appended, so the variant
    partition of the grouped log is exact.
    """
    rng = random.Random(spec.seed)
    owner: dict[tuple[str, ...], int] = {}
    traces: list[Trace] = []
    for ci, skel in enumerate(spec.skeletons):
        for j in range(spec.traces_per_cluster):
            seq = tuple(_sample_sequence(skel, spec.noise_rate, rng))
            tries = 0
            while owner.get(seq, ci) != ci and tries < _COLLISION_RETRIES:
                seq = tuple(_sample_sequence(skel, spec.noise_rate, rng))
                tries += 1
            if owner.get(seq, ci) != ci:
                seq = seq + (f"x{ci}",)
            owner[seq] = ci
            tid = f"c{ci}_t{j}"
            events = tuple(
                Event(tid, a, _BASE_TIME + timedelta(minutes=pos))
                for pos, a in enumerate(seq)
            )
            traces.append(Trace(tid, events))
    log = EventLog(traces)
    g = group(log)
    assignment = tuple(owner[v.sequence] for v in g.variants)
    truth = ClusteringSolution(
        grouped=g, assignment=assignment, n_clusters=spec.k_true,
        method="ground-truth", params={"seed": spec.seed},
    )
    return log, truth


# -- sweep ----------------------------------------------------------------------

RESULT_COLUMNS = ["technique", "percentage", "k", "seed", "metric", "value"]


def parse_method(text: str) -> tuple[str, int]:
    """Technique selector -> (method, kgram size).

    Accepts ged, mra, condritrac, Ngram (any digit prefix) and kgram:N.
    The size is meaningful only for kgram methods and defaults to 3.
    """
    t = text.strip().lower()
    if t in ("ged", "mra", "condritrac"):
        return t, 3
    if t.endswith("gram") and t[:-4].isdigit():
        return "kgram", int(t[:-4])
    if t.startswith("kgram:"):
        size = t.split(":", 1)[1]
        if size.isdigit() and int(size) >= 1:
            return "kgram", int(size)
    if t == "kgram":
        return "kgram", 3
    raise InvalidSpecError(
        f"unknown technique {text!r}; expected ged, mra, condritrac, "
        "kgram:N or e.g. 3gram"
    )


@dataclass(frozen=True)
class SweepConfig:
    log_spec: SyntheticLogSpec
    techniques: tuple[str, ...] = ("ged", "3gram", "mra", "condritrac")
    percentages: tuple[int, ...] = (1, 5, 10)
    ks: tuple[int, ...] = ()  # empty means: use the planted k
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    dependency_threshold: float = 0.9
    kgram_metric: str = "euclidean"
    cvt: float = 0.0
    tvt: float = 0.0
    separate_boolean: bool = False

    def resolved_ks(self) -> tuple[int, ...]:
        return self.ks if self.ks else (self.log_spec.k_true,)

    def to_json_dict(self) -> dict:
        return {
            "log_spec": {
                "skeletons": [
                    {
                        "backbone": list(s.backbone),
                        "branch_prob": s.branch_prob,
                        "loop_prob": s.loop_prob,
                        "extra_activities": list(s.extra_activities),
                    }
                    for s in self.log_spec.skeletons
                ],
                "traces_per_cluster": self.log_spec.traces_per_cluster,
                "noise_rate": self.log_spec.noise_rate,
                "seed": self.log_spec.seed,
            },
            "techniques": list(self.techniques),
            "percentages": list(self.percentages),
            "ks": list(self.resolved_ks()),
            "seeds": list(self.seeds),
            "dependency_threshold": self.dependency_threshold,
            "kgram_metric": self.kgram_metric,
            "cvt": self.cvt,
            "tvt": self.tvt,
            "separate_boolean": self.separate_boolean,
        }


def read_sweep_config(path: str) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        spec_raw = raw["log_spec"]
        skeletons = tuple(
            ClusterSkeleton(
                backbone=tuple(s["backbone"]),
                branch_prob=float(s.get("branch_prob", 0.0)),
                loop_prob=float(s.get("loop_prob", 0.0)),
                extra_activities=tuple(s.get("extra_activities", ())),
            )
            for s in spec_raw["skeletons"]
        )
        log_spec = SyntheticLogSpec(
            skeletons=skeletons,
            traces_per_cluster=int(spec_raw["traces_per_cluster"]),
            noise_rate=float(spec_raw.get("noise_rate", 0.0)),
            seed=int(spec_raw.get("seed", 0)),
        )
        return SweepConfig(
            log_spec=log_spec,
            techniques=tuple(raw.get("techniques", ("ged", "3gram", "mra", "condritrac"))),
            percentages=tuple(int(p) for p in raw.get("percentages", (1, 5, 10))),
            ks=tuple(int(k) for k in raw.get("ks", ())),
            seeds=tuple(int(s) for s in raw.get("seeds", (1, 2, 3, 4, 5))),
            dependency_threshold=float(raw.get("dependency_threshold", 0.9)),
            kgram_metric=str(raw.get("kgram_metric", "euclidean")),
            cvt=float(raw.get("cvt", 0.0)),
            tvt=float(raw.get("tvt", 0.0)),
            separate_boolean=bool(raw.get("separate_boolean", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"bad sweep config {path}: {exc}") from exc


def _technique_solution(
    g: GroupedEventLog,
    technique: str,
    vcs,
    k: int,
    seed: int,
    cfg: SweepConfig,
) -> ClusteringSolution:
    method, kgram_k = parse_method(technique)
    if method == "condritrac":
        config = CondritracConfig(
            k=k, cvt=cfg.cvt, tvt=cfg.tvt,
            dependency_threshold=cfg.dependency_threshold,
            separate_boolean=cfg.separate_boolean, seed=seed,
        )
        solution, _ = condritrac(g, vcs, config)
        return solution
    return constrained_cluster(
        g, method, vcs, k, kgram_k=kgram_k, metric=cfg.kgram_metric,
    )


def _run_cell(args) -> tuple[list[list], str | None]:
    """One sweep cell; returns its rows and an error message if it failed.

    percentage 0 encodes the unconstrained baseline, which reports its
    violations against every generated constraint set instead of the
    (absent) given one.
    """
    g, truth, technique, percentage, k, seed, sets, cfg = args
    base = [technique, percentage, k, seed]
    try:
        if percentage:
            cs = sets[percentage]
            vcs = lift(extend(cs), g)
        else:
            cs = None
            vcs = empty_variant_constraints(g)
        started = time.perf_counter()
        solution = _technique_solution(g, technique, vcs, k, seed, cfg)
        elapsed = time.perf_counter() - started
        rows = [
            base + ["weighted_f1", weighted_f1(solution, cfg.dependency_threshold).value],
            base + ["jaccard", jaccard_index(solution, truth)],
            base + ["n_clusters", float(solution.n_clusters)],
        ]
        if cs is not None:
            rep = violation_percentages(solution, cs)
            rows.append(base + ["ml_violated_pct", rep.ml_pct])
            rows.append(base + ["cl_violated_pct", rep.cl_pct])
        else:
            for pct in sorted(sets):
                rep = violation_percentages(solution, sets[pct])
                rows.append(base + [f"ml_violated_pct_vs_p{pct}", rep.ml_pct])
                rows.append(base + [f"cl_violated_pct_vs_p{pct}", rep.cl_pct])
        rows.append(base + ["wall_time_s", elapsed])
        return rows, None
    except (TraceClusterError, ValueError, ZeroDivisionError) as exc:
        return [base + ["error", 1.0]], f"{type(exc).__name__}: {exc}"


def run_experiment(
    log: EventLog,
    truth: ClusteringSolution,
    cfg: SweepConfig,
    jobs: int = 1,
) -> tuple[list[list], dict]:
    """Full sweep. Returns (rows, summary), rows in deterministic order.

    Unconstrained baselines run once per (technique, k, seed); each
    seed draws its own nested constraint sets from the ground truth.
    """
    g = truth.grouped
    sets_by_seed: dict[int, dict[int, ConstraintSet]] = {
        seed: {
            pct: generate_constraints(truth, pct, seed)
            for pct in cfg.percentages
        }
        for seed in cfg.seeds
    }
    cells = []
    for technique in cfg.techniques:
        for k in cfg.resolved_ks():
            for seed in cfg.seeds:
                for pct in (0, *cfg.percentages):
                    cells.append((
                        g, truth, technique, pct, k, seed,
                        sets_by_seed[seed], cfg,
                    ))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        outcomes = [_run_cell(c) for c in cells]

    rows: list[list] = []
    errors: list[dict] = []
    for cell, (cell_rows, err) in zip(cells, outcomes):
        rows.extend(cell_rows)
        if err is not None:
            errors.append({
                "technique": cell[2], "percentage": cell[3],
                "k": cell[4], "seed": cell[5], "error": err,
            })
    summary = _summarize(rows, errors, cfg)
    return rows, summary


def _summarize(rows: list[list], errors: list[dict], cfg: SweepConfig) -> dict:
    groups: dict[tuple[str, int, int, str], list[float]] = {}
    for technique, pct, k, _seed, metric, value in rows:
        if metric in ("wall_time_s", "error"):
            continue
        groups.setdefault((technique, pct, k, metric), []).append(value)
    table: dict[str, dict] = {}
    for (technique, pct, k, metric), values in sorted(groups.items()):
        key = f"{technique}|p{pct}|k{k}"
        table.setdefault(key, {})[f"median_{metric}"] = statistics.median(values)
        table[key][f"cells_{metric}"] = len(values)
    return {
        "config": cfg.to_json_dict(),
        "rows": len(rows),
        "errors": errors,
        "aggregates": table,
    }


def write_results_csv(path: str, rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for technique, pct, k, seed, metric, value in rows:
            writer.writerow([technique, pct, k, seed, metric, repr(value)])


def write_summary_json(path: str, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
