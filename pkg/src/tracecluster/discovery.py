"""Directly-follows model discovery and conformance scoring.

The discovered model is a directed graph over activities: an arc a->b is
kept when its frequency-based dependency strength clears a threshold,
and every activity additionally keeps its most frequent outgoing arc so
the graph stays connected. Start and end activities are the observed
first and last activities. Recall replays directly-follows steps
(including virtual start and end steps) against the model; precision
compares observed continuations per activity with what the model permits.

Scores from this lightweight pipeline are comparable between clusterings
of the same log, not with numbers produced by other discovery stacks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EmptyLogError

Sublog = Iterable[tuple[Sequence[str], int]]


class DirectlyFollowsStats:
    """Multiplicity-weighted directly-follows counts of a sublog.

    Conformance only ever needs these aggregates, so clusters can be
    scored by merging per-variant stats instead of replaying events.
    """

    __slots__ = ("pairs", "starts", "ends", "activities", "steps", "weight")

    def __init__(self):
        self.pairs: dict[tuple[str, str], int] = {}
        self.starts: dict[str, int] = {}
        self.ends: dict[str, int] = {}
        self.activities: dict[str, int] = {}
        self.steps = 0   # df steps plus one virtual start and end step per trace
        self.weight = 0  # number of traces

    @classmethod
    def from_sublog(cls, sublog: Sublog) -> "DirectlyFollowsStats":
        stats = cls()
        for seq, mult in sublog:
            stats.add_sequence(tuple(seq), mult)
        return stats

    def add_sequence(self, seq: tuple[str, ...], mult: int) -> None:
        if not seq or mult <= 0:
            return
        self.weight += mult
        self.steps += mult * (len(seq) + 1)
        self.starts[seq[0]] = self.starts.get(seq[0], 0) + mult
        self.ends[seq[-1]] = self.ends.get(seq[-1], 0) + mult
        for a in seq:
            self.activities[a] = self.activities.get(a, 0) + mult
        for a, b in zip(seq, seq[1:]):
            self.pairs[(a, b)] = self.pairs.get((a, b), 0) + mult

    def plus(self, other: "DirectlyFollowsStats") -> "DirectlyFollowsStats":
        """New stats holding the union of both multisets."""
        out = DirectlyFollowsStats()
        for mine, theirs, target in (
            (self.pairs, other.pairs, "pairs"),
            (self.starts, other.starts, "starts"),
            (self.ends, other.ends, "ends"),
            (self.activities, other.activities, "activities"),
        ):
            merged = dict(mine)
            for k, v in theirs.items():
                merged[k] = merged.get(k, 0) + v
            setattr(out, target, merged)
        out.steps = self.steps + other.steps
        out.weight = self.weight + other.weight
        return out


def _as_stats(sublog) -> DirectlyFollowsStats:
    if isinstance(sublog, DirectlyFollowsStats):
        return sublog
    return DirectlyFollowsStats.from_sublog(sublog)


@dataclass(frozen=True)
class ProcessModel:
    activities: frozenset[str]
    arcs: Mapping[tuple[str, str], int]  # kept arc -> observed frequency
    start_activities: frozenset[str]
    end_activities: frozenset[str]
    dependency_threshold: float

    def successors(self, a: str) -> set[str]:
        return {b for (x, b) in self.arcs if x == a}


@dataclass(frozen=True)
class ConformanceResult:
    recall: float
    precision: float
    f1: float


def discover(sublog, dependency_threshold: float = 0.9) -> ProcessModel:
    """Frequency-filtered directly-follows model of a sublog.

    An observed arc a->b is kept when its dependency strength
    max(0, (f(ab) - f(ba)) / (f(ab) + f(ba) + 1)) reaches the threshold;
    negative strength means the opposite direction dominates. A threshold
    of zero therefore keeps every observed arc. Independently, each
    activity keeps its single most frequent outgoing arc (ties on
    frequency go to the lexicographically smallest target).
    """
    stats = _as_stats(sublog)
    if stats.weight == 0:
        raise EmptyLogError("cannot discover a model from an empty sublog")
    kept: dict[tuple[str, str], int] = {}
    best_out: dict[str, tuple[str, int]] = {}
    for (a, b), f in stats.pairs.items():
        rev = stats.pairs.get((b, a), 0)
        strength = max(0.0, (f - rev) / (f + rev + 1))
        if strength >= dependency_threshold:
            kept[(a, b)] = f
        cur = best_out.get(a)
        if cur is None or f > cur[1] or (f == cur[1] and b < cur[0]):
            best_out[a] = (b, f)
    for a, (b, f) in best_out.items():
        kept.setdefault((a, b), f)
    return ProcessModel(
        activities=frozenset(stats.activities),
        arcs=kept,
        start_activities=frozenset(stats.starts),
        end_activities=frozenset(stats.ends),
        dependency_threshold=dependency_threshold,
    )


def replay_recall(model: ProcessModel, sublog) -> float:
    """Fraction of directly-follows steps the model permits.

    Every trace contributes len+1 steps: a virtual start step, its df
    pairs, and a virtual end step; traces weigh by multiplicity.
    """
    stats = _as_stats(sublog)
    if stats.steps == 0:
        raise EmptyLogError("cannot replay an empty sublog")
    ok = 0
    for (a, b), f in stats.pairs.items():
        if (a, b) in model.arcs:
            ok += f
    for a, f in stats.starts.items():
        if a in model.start_activities:
            ok += f
    for a, f in stats.ends.items():
        if a in model.end_activities:
            ok += f
    return ok / stats.steps


def escaping_precision(model: ProcessModel, sublog) -> float:
    """How much of the permitted behaviour the sublog actually uses.

    Per activity the ratio of observed continuations to model-permitted
    continuations (clamped to 1) is averaged, weighted by activity
    frequency. Activities the model does not know, and activities the
    model gives no outgoing arc, stay out of the average.
    """
    stats = _as_stats(sublog)
    if stats.weight == 0:
        raise EmptyLogError("cannot score an empty sublog")
    permitted: dict[str, set[str]] = {}
    for a, b in model.arcs:
        permitted.setdefault(a, set()).add(b)
    observed: dict[str, set[str]] = {}
    for a, b in stats.pairs:
        observed.setdefault(a, set()).add(b)
    num = Fraction(0)
    den = 0
    for a, w in stats.activities.items():
        if a not in model.activities:
            continue
        perm = permitted.get(a)
        if not perm:
            continue
        ratio = min(Fraction(1), Fraction(len(observed.get(a, ())), len(perm)))
        num += w * ratio
        den += w
    if den == 0:
        return 0.0
    return float(num / den)


def f1(model: ProcessModel, sublog) -> ConformanceResult:
    stats = _as_stats(sublog)
    r = replay_recall(model, stats)
    p = escaping_precision(model, stats)
    score = 0.0 if p + r == 0 else 2.0 * p * r / (p + r)
    return ConformanceResult(recall=r, precision=p, f1=score)


# -- export -----------------------------------------------------------------------

def model_to_json_dict(model: ProcessModel) -> dict:
    return {
        "activities": sorted(model.activities),
        "arcs": [
            {"from": a, "to": b, "frequency": f}
            for (a, b), f in sorted(model.arcs.items())
        ],
        "start_activities": sorted(model.start_activities),
        "end_activities": sorted(model.end_activities),
        "dependency_threshold": model.dependency_threshold,
    }


def write_model_json(model: ProcessModel, path: str) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_model_dot(model: ProcessModel, path: str) -> None:
    """Graphviz digraph; start activities get a double border, ends go grey."""
    lines = ["digraph model {", "  rankdir=LR;"]
    for a in sorted(model.activities):
        attrs = []
        if a in model.start_activities:
            attrs.append("peripheries=2")
        if a in model.end_activities:
            attrs.append('style=filled fillcolor="lightgrey"')
        lines.append(f'  "{a}" [{" ".join(attrs)}];' if attrs else f'  "{a}";')
    for (a, b), f in sorted(model.arcs.items()):
        lines.append(f'  "{a}" -> "{b}" [label="{f}"];')
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def sublog_of_variants(g, indices: Iterable[int]) -> list[tuple[tuple[str, ...], int]]:
    """Materialise (sequence, multiplicity) pairs for chosen variants."""
    return [(g.variants[i].sequence, g.variants[i].multiplicity) for i in indices]
