"""Clustering solutions: variant-level partitions of a grouped log.

A solution assigns every variant to exactly one cluster; the trace-level
view is induced through variant membership. Files: a trace-level CSV
(trace_id,cluster), a variant-level CSV (variant_index,cluster) and a
JSON document that carries both plus method metadata.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Mapping

from .errors import EmptyClusterError, KOutOfRangeError, UnknownTraceIdError
from .log_model import GroupedEventLog


@dataclass(frozen=True)
class ClusteringSolution:
    grouped: GroupedEventLog
    assignment: tuple[int, ...]
    n_clusters: int
    method: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.assignment) != self.grouped.supp:
            raise ValueError(
                f"assignment covers {len(self.assignment)} variants, "
                f"log has {self.grouped.supp}"
            )
        if self.n_clusters < 1:
            raise KOutOfRangeError(f"n_clusters={self.n_clusters}")
        seen = set(self.assignment)
        for c in self.assignment:
            if not 0 <= c < self.n_clusters:
                raise ValueError(f"cluster index {c} outside [0, {self.n_clusters})")
        for c in range(self.n_clusters):
            if c not in seen:
                raise EmptyClusterError(f"cluster {c} has no members")

    def members(self, c: int) -> list[int]:
        """Variant indices assigned to cluster c."""
        return [i for i, a in enumerate(self.assignment) if a == c]

    def trace_assignment(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v, c in zip(self.grouped.variants, self.assignment):
            for tid in v.trace_ids:
                out[tid] = c
        return out

    def cluster_of_trace(self, trace_id: str) -> int:
        mapping = self.trace_assignment()
        if trace_id not in mapping:
            raise UnknownTraceIdError(f"trace id {trace_id!r} not in solution")
        return mapping[trace_id]


def write_trace_csv(sol: ClusteringSolution, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trace_id", "cluster"])
        for v, c in zip(sol.grouped.variants, sol.assignment):
            for tid in v.trace_ids:
                writer.writerow([tid, c])


def write_variant_csv(sol: ClusteringSolution, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant_index", "cluster"])
        for i, c in enumerate(sol.assignment):
            writer.writerow([i, c])


def write_solution_json(sol: ClusteringSolution, path: str) -> None:
    doc = {
        "method": sol.method,
        "n_clusters": sol.n_clusters,
        "params": dict(sol.params),
        "variant_assignment": list(sol.assignment),
        "trace_assignment": sol.trace_assignment(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_trace_csv(path: str, grouped: GroupedEventLog,
                   method: str = "external") -> ClusteringSolution:
    """Load a trace-level solution CSV against a grouped log.

    Every trace of the log must be covered and all traces of one variant
    must agree on their cluster; cluster labels are relabelled to a dense
    0..k-1 range in order of first appearance by variant index.
    """
    raw: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"trace_id", "cluster"} <= set(reader.fieldnames):
            raise UnknownTraceIdError(f"{path}: expected header trace_id,cluster")
        for row in reader:
            raw[row["trace_id"]] = row["cluster"]
    labels: list[str] = []
    for v in grouped.variants:
        got = set()
        for tid in v.trace_ids:
            if tid not in raw:
                raise UnknownTraceIdError(f"{path}: no cluster for trace {tid!r}")
            got.add(raw[tid])
        if len(got) != 1:
            raise ValueError(
                f"{path}: traces of one variant land in clusters {sorted(got)}"
            )
        labels.append(got.pop())
    dense: dict[str, int] = {}
    assignment = []
    for lab in labels:
        if lab not in dense:
            dense[lab] = len(dense)
        assignment.append(dense[lab])
    return ClusteringSolution(
        grouped=grouped,
        assignment=tuple(assignment),
        n_clusters=len(dense),
        method=method,
    )
