"""Model-driven constrained trace clustering.

Clusters are grown around cannot-link seeds so that each seed variant
lands in its own cluster, then every remaining variant (together with
its must-link group) is placed where the discovered directly-follows
model fits best. Placement is judged by two f1 scores against the model
of the candidate cluster plus the group:

  tmv  the group's own traces replayed against that model
  cvm  the whole candidate cluster replayed against that model

(cluster metric value is shortened cmv below). A group is eligible for
a cluster when tmv >= tvt and cmv >= cvt and no cannot-link connects
the group to the cluster; among eligible clusters the highest cmv wins,
ties broken by tmv and then by the lowest cluster index. Groups with no
eligible cluster are parked and resolved in a final pass that scores
them against the models frozen at the end of the main pass, either into
a separate leftover cluster or into the best non-conflicting cluster.

Every decision is recorded in an AssignmentTrace so a run can be
audited variant by variant.
"""

import json
import random
from dataclasses import dataclass, field

from .constraints import VariantConstraintSet, k_bounded_max_clique
from .discovery import DirectlyFollowsStats, discover, f1
from .errors import InfeasibleKError, KOutOfRangeError, UnsatisfiableConstraintsError
from .log_model import GroupedEventLog
from .solution import ClusteringSolution


@dataclass(frozen=True)
class CondritracConfig:
    """Tuning knobs for one clustering run.

    cvt and tvt are the eligibility floors for cmv and tmv. seed only
    matters when fewer cannot-link seeds exist than k, in which case the
    missing clusters are seeded by draws from the sorted unplaced pool.
    """

    k: int
    cvt: float = 0.0
    tvt: float = 0.0
    dependency_threshold: float = 0.9
    separate_boolean: bool = False
    seed: int = 0


@dataclass(frozen=True)
class Evaluation:
    """Score of one candidate cluster for one group, or why it was skipped."""

    cluster: int
    skipped: bool
    reason: str | None
    tmv: float | None
    cmv: float | None
    eligible: bool | None

    def to_json_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "skipped": self.skipped,
            "reason": self.reason,
            "tmv": self.tmv,
            "cmv": self.cmv,
            "eligible": self.eligible,
        }


@dataclass
class AssignmentRecord:
    """Audit entry for one variant.

    The variant's must-link group travels as one unit; evaluations are
    stored on the group's anchor (the variant whose turn triggered the
    decision) and stay empty on the other members. A variant that fell
    through the main pass keeps those failed evaluations, gains
    resolution_evaluations from the final pass, and reports phase 3.
    """

    variant: int
    anchor: int
    cont: tuple[int, ...]
    phase: int
    seed_kind: str | None
    evaluations: tuple[Evaluation, ...]
    resolution_evaluations: tuple[Evaluation, ...] = ()
    assigned: int | None = None
    unassignable: bool = False

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "anchor": self.anchor,
            "cont": list(self.cont),
            "phase": self.phase,
            "seed_kind": self.seed_kind,
            "evaluations": [e.to_json_dict() for e in self.evaluations],
            "resolution_evaluations": [
                e.to_json_dict() for e in self.resolution_evaluations
            ],
            "assigned": self.assigned,
            "unassignable": self.unassignable,
        }


@dataclass(frozen=True)
class AssignmentTrace:
    """Complete audit of one run: one record per variant, in variant order."""

    config: CondritracConfig
    grouped: GroupedEventLog = field(repr=False)
    records: tuple[AssignmentRecord, ...]
    final_assignment: tuple[int, ...]
    n_clusters: int

    def to_json_dict(self) -> dict:
        return {
            "config": {
                "k": self.config.k,
                "cvt": self.config.cvt,
                "tvt": self.config.tvt,
                "separate_boolean": self.config.separate_boolean,
                "seed": self.config.seed,
                "dependency_threshold": self.config.dependency_threshold,
            },
            "variants": [list(v.sequence) for v in self.grouped.variants],
            "multiplicities": [v.multiplicity for v in self.grouped.variants],
            "records": [r.to_json_dict() for r in self.records],
            "final_assignment": list(self.final_assignment),
            "n_clusters": self.n_clusters,
        }


def write_assignment_trace(path: str, trace: AssignmentTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(trace.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _variant_stats(g: GroupedEventLog, group) -> DirectlyFollowsStats:
    stats = DirectlyFollowsStats()
    for v in group:
        var = g.variants[v]
        stats.add_sequence(var.sequence, var.multiplicity)
    return stats


class _State:
    """Mutable cluster bookkeeping shared by the three phases."""

    def __init__(self, g: GroupedEventLog, vcs: VariantConstraintSet):
        self.g = g
        self.vcs = vcs
        self.clusters: list[list[int]] = []
        self.stats: list[DirectlyFollowsStats] = []
        self.cluster_of: dict[int, int] = {}
        self.remaining: set[int] = set(range(len(g.variants)))
        self.records: dict[int, AssignmentRecord] = {}

    def open_cluster(self, group: list[int]) -> int:
        idx = len(self.clusters)
        self.clusters.append(list(group))
        self.stats.append(_variant_stats(self.g, group))
        for v in group:
            self.cluster_of[v] = idx
        self.remaining -= set(group)
        return idx

    def place(self, group: list[int], cluster: int,
              group_stats: DirectlyFollowsStats) -> None:
        self.clusters[cluster].extend(group)
        self.stats[cluster] = self.stats[cluster].plus(group_stats)
        for v in group:
            self.cluster_of[v] = cluster

    def cl_conflict(self, group, cluster: int) -> bool:
        for v in group:
            for nbr in self.vcs.cl_neighbors(v):
                if self.cluster_of.get(nbr) == cluster:
                    return True
        return False


def _seed_clusters(state: _State, config: CondritracConfig) -> None:
    clique = k_bounded_max_clique(state.vcs, config.k)
    for seed_variant in sorted(clique):
        group = sorted(state.vcs.connected(seed_variant))
        idx = state.open_cluster(group)
        for v in group:
            state.records[v] = AssignmentRecord(
                variant=v, anchor=seed_variant, cont=tuple(group),
                phase=1, seed_kind="clique", evaluations=(), assigned=idx,
            )
    rng = random.Random(config.seed)
    while len(state.clusters) < config.k:
        if not state.remaining:
            raise InfeasibleKError(
                f"cannot seed {config.k} clusters: only "
                f"{len(state.clusters)} groups of variants available"
            )
        pick = rng.choice(sorted(state.remaining))
        group = sorted(state.vcs.connected(pick))
        idx = state.open_cluster(group)
        for v in group:
            state.records[v] = AssignmentRecord(
                variant=v, anchor=pick, cont=tuple(group),
                phase=1, seed_kind="random", evaluations=(), assigned=idx,
            )


def _score(state: _State, config: CondritracConfig, group: list[int],
           group_stats: DirectlyFollowsStats, fixed_models=None):
    """Evaluate every cluster for one group.

    With fixed_models the frozen models score tmv and cmv and there is
    no eligibility floor (final pass); otherwise a model is discovered
    from each candidate union (main pass). Returns the evaluation list
    and the winning cluster index, or None when nothing is eligible.
    """
    evaluations: list[Evaluation] = []
    best: tuple[float, float, int] | None = None
    for c in range(len(state.clusters)):
        if state.cl_conflict(group, c):
            evaluations.append(Evaluation(
                cluster=c, skipped=True, reason="cannot-link",
                tmv=None, cmv=None, eligible=None,
            ))
            continue
        candidate = state.stats[c].plus(group_stats)
        if fixed_models is None:
            model = discover(candidate, config.dependency_threshold)
        else:
            model = fixed_models[c]
        tmv = f1(model, group_stats).f1
        cmv = f1(model, candidate).f1
        if fixed_models is None:
            eligible = tmv >= config.tvt and cmv >= config.cvt
        else:
            eligible = None
        evaluations.append(Evaluation(
            cluster=c, skipped=False, reason=None,
            tmv=tmv, cmv=cmv, eligible=eligible,
        ))
        if eligible is False:
            continue
        if best is None or cmv > best[0] or (cmv == best[0] and tmv > best[1]):
            best = (cmv, tmv, c)
    return evaluations, (None if best is None else best[2])


def _assign_remaining(state: _State, config: CondritracConfig):
    """Main pass. Returns the fall-through groups in processing order."""
    order = sorted(
        state.remaining,
        key=lambda v: (-state.g.variants[v].multiplicity, v),
    )
    unassigned: list[tuple[int, list[int]]] = []
    for anchor in order:
        if anchor not in state.remaining:
            continue  # already placed with an earlier must-link anchor
        group = sorted(state.vcs.connected(anchor))
        group_stats = _variant_stats(state.g, group)
        evaluations, chosen = _score(state, config, group, group_stats)
        if chosen is None:
            unassignable = True
            unassigned.append((anchor, group))
        else:
            unassignable = False
            state.place(group, chosen, group_stats)
        state.remaining -= set(group)
        for v in group:
            state.records[v] = AssignmentRecord(
                variant=v, anchor=anchor, cont=tuple(group), phase=2,
                seed_kind=None,
                evaluations=tuple(evaluations) if v == anchor else (),
                assigned=chosen, unassignable=unassignable,
            )
    return unassigned


def _resolve(state: _State, config: CondritracConfig, unassigned) -> int:
    """Final pass over fall-through groups. Returns the cluster count."""
    if not unassigned:
        return len(state.clusters)
    if config.separate_boolean:
        extra = len(state.clusters)
        for anchor, group in unassigned:
            for v in group:
                rec = state.records[v]
                rec.phase = 3
                rec.assigned = extra
        return extra + 1
    fixed_models = [
        discover(state.stats[c], config.dependency_threshold)
        for c in range(len(state.clusters))
    ]
    for anchor, group in unassigned:
        group_stats = _variant_stats(state.g, group)
        evaluations, chosen = _score(
            state, config, group, group_stats, fixed_models=fixed_models,
        )
        if chosen is None:
            raise UnsatisfiableConstraintsError(
                f"variant group {group} is cannot-linked to every cluster; "
                "rerun with separate_boolean=True or fewer constraints"
            )
        state.place(group, chosen, group_stats)
        for v in group:
            rec = state.records[v]
            rec.phase = 3
            rec.resolution_evaluations = tuple(evaluations) if v == anchor else ()
            rec.assigned = chosen
    return len(state.clusters)


def condritrac(
    g: GroupedEventLog,
    vcs: VariantConstraintSet,
    config: CondritracConfig,
) -> tuple[ClusteringSolution, AssignmentTrace]:
    """Run the three phases and return the solution with its audit trace."""
    n = len(g.variants)
    if config.k < 1:
        raise KOutOfRangeError(f"k must be at least 1, got {config.k}")
    if config.k > n:
        raise InfeasibleKError(f"k={config.k} exceeds the {n} variant groups")
    if vcs.n_variants != n:
        raise ValueError(
            f"constraints cover {vcs.n_variants} variants, log has {n}"
        )
    state = _State(g, vcs)
    _seed_clusters(state, config)
    unassigned = _assign_remaining(state, config)
    n_clusters = _resolve(state, config, unassigned)

    assignment = [0] * n
    for v, rec in state.records.items():
        assignment[v] = rec.assigned
    records = tuple(state.records[v] for v in sorted(state.records))
    trace = AssignmentTrace(
        config=config,
        grouped=g,
        records=records,
        final_assignment=tuple(assignment),
        n_clusters=n_clusters,
    )
    method = "DriTraC" if vcs.is_empty else "ConDriTraC"
    solution = ClusteringSolution(
        grouped=g,
        assignment=tuple(assignment),
        n_clusters=n_clusters,
        method=method,
        params={
            "k": config.k,
            "cvt": config.cvt,
            "tvt": config.tvt,
            "dependency_threshold": config.dependency_threshold,
            "separate_boolean": config.separate_boolean,
            "seed": config.seed,
        },
    )
    return solution, trace
