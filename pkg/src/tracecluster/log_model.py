"""Event log model: events, traces, logs and their grouped (variant) form.

A log is an ordered collection of traces; a trace is a timestamp-ordered
sequence of events. Grouping collapses traces with identical activity
sequences into variants, which is the unit all clustering code works on.
Multiplicities are kept so trace-level weighting stays available.
"""

from __future__ import annotations

import csv
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterator, Mapping

from .errors import (
    EmptyLogError,
    MalformedXmlError,
    MissingColumnError,
    MissingConceptNameError,
    MissingTimestampError,
    UnparseableTimestampError,
)

_XES_CASTS = {
    "string": str,
    "int": int,
    "float": float,
    "boolean": lambda v: v.lower() == "true",
    "id": str,
}


def _to_utc(ts: datetime) -> datetime:
    """Normalise to an aware UTC datetime; naive input is taken as UTC."""
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Event:
    trace_id: str
    activity: str
    timestamp: datetime
    attributes: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.trace_id:
            raise ValueError("event with empty trace id")
        if not self.activity:
            raise ValueError(f"empty activity label in trace {self.trace_id!r}")


@dataclass(frozen=True)
class Trace:
    trace_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.trace_id!r} has no events")
        for ev in self.events:
            if ev.trace_id != self.trace_id:
                raise ValueError(
                    f"event of trace {ev.trace_id!r} inside trace {self.trace_id!r}"
                )
        stamps = [ev.timestamp for ev in self.events]
        if any(a > b for a, b in zip(stamps, stamps[1:])):
            raise ValueError(f"trace {self.trace_id!r} is not timestamp ordered")

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(ev.activity for ev in self.events)

    def __len__(self) -> int:
        return len(self.events)


class EventLog:
    """Insertion-ordered collection of traces with unique ids."""

    def __init__(self, traces: Iterator[Trace] | list[Trace]):
        self._traces: dict[str, Trace] = {}
        for tr in traces:
            if tr.trace_id in self._traces:
                raise ValueError(f"duplicate trace id {tr.trace_id!r}")
            self._traces[tr.trace_id] = tr
        if not self._traces:
            raise EmptyLogError("log contains no traces")

    def __len__(self) -> int:
        return len(self._traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self._traces.values())

    def __contains__(self, trace_id: str) -> bool:
        return trace_id in self._traces

    def __getitem__(self, trace_id: str) -> Trace:
        return self._traces[trace_id]

    def trace_ids(self) -> list[str]:
        return list(self._traces)

    def activity_types(self) -> set[str]:
        return {ev.activity for tr in self for ev in tr.events}


@dataclass(frozen=True)
class Variant:
    """Distinct activity sequence plus the traces that exhibit it."""

    sequence: tuple[str, ...]
    trace_ids: tuple[str, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.trace_ids)


@dataclass(frozen=True)
class GroupedEventLog:
    """Multiset view of a log: one entry per distinct activity sequence.

    Variants appear in order of first occurrence in the source log, which
    fixes the variant indexing used everywhere downstream.
    """

    variants: tuple[Variant, ...]
    source: EventLog

    @property
    def supp(self) -> int:
        """Number of distinct variants."""
        return len(self.variants)

    @property
    def size(self) -> int:
        """Number of underlying traces."""
        return sum(v.multiplicity for v in self.variants)

    def variant_of(self) -> dict[str, int]:
        """Map trace id to its variant index."""
        out: dict[str, int] = {}
        for i, v in enumerate(self.variants):
            for tid in v.trace_ids:
                out[tid] = i
        return out


def group(log: EventLog) -> GroupedEventLog:
    by_seq: dict[tuple[str, ...], list[str]] = {}
    for tr in log:
        by_seq.setdefault(tr.activities, []).append(tr.trace_id)
    variants = tuple(
        Variant(sequence=seq, trace_ids=tuple(tids)) for seq, tids in by_seq.items()
    )
    return GroupedEventLog(variants=variants, source=log)


# -- CSV ----------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnMapping:
    trace_id: str = "trace_id"
    activity: str = "activity"
    timestamp: str = "timestamp"


def parse_csv(
    path: str,
    mapping: ColumnMapping = ColumnMapping(),
    timestamp_format: str = "%Y-%m-%d %H:%M:%S",
    strip_labels: bool = True,
) -> EventLog:
    """Read an event log from a CSV file.

    The file must be UTF-8 with a header row; quoting follows the usual
    CSV conventions. Events of a trace are ordered by timestamp, ties
    keep their input row order. Traces appear in order of their first row.

    Parameters
    ----------
    mapping:
        Names of the trace id, activity and timestamp columns.
    timestamp_format:
        strptime-style pattern for the timestamp column. Parsed values
        are normalised to UTC; naive timestamps are taken as UTC.
    strip_labels:
        Strip surrounding whitespace from activity labels and trace ids.
        Labels are case sensitive either way.
    """
    rows: dict[str, list[tuple[datetime, int, str]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (mapping.trace_id, mapping.activity, mapping.timestamp):
            if col not in header:
                raise MissingColumnError(
                    f"{path}: column {col!r} not in header {header}"
                )
        for lineno, row in enumerate(reader, start=2):
            tid = row[mapping.trace_id] or ""
            act = row[mapping.activity] or ""
            if strip_labels:
                tid = tid.strip()
                act = act.strip()
            raw_ts = (row[mapping.timestamp] or "").strip()
            try:
                ts = datetime.strptime(raw_ts, timestamp_format)
            except ValueError:
                raise UnparseableTimestampError(lineno, raw_ts, timestamp_format)
            rows.setdefault(tid, []).append((_to_utc(ts), lineno, act))
    if not rows:
        raise EmptyLogError(f"{path}: no event rows")
    traces = []
    for tid, events in rows.items():
        events.sort(key=lambda e: (e[0], e[1]))
        traces.append(
            Trace(
                trace_id=tid,
                events=tuple(
                    Event(trace_id=tid, activity=act, timestamp=ts)
                    for ts, _, act in events
                ),
            )
        )
    return EventLog(traces)


def write_csv(
    log: EventLog,
    path: str,
    mapping: ColumnMapping = ColumnMapping(),
    timestamp_format: str = "%Y-%m-%d %H:%M:%S",
) -> None:
    """Write a log back to CSV; inverse of parse_csv for the mapped columns."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([mapping.trace_id, mapping.activity, mapping.timestamp])
        for tr in log:
            for ev in tr.events:
                writer.writerow(
                    [tr.trace_id, ev.activity, ev.timestamp.strftime(timestamp_format)]
                )


# -- XES ----------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xes_timestamp(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    return _to_utc(datetime.fromisoformat(value))


def _event_attributes(elem) -> dict[str, object]:
    attrs: dict[str, object] = {}
    for child in elem:
        kind = _local(child.tag)
        key = child.get("key")
        value = child.get("value")
        if key is None or value is None:
            continue
        if kind == "date":
            try:
                attrs[key] = _parse_xes_timestamp(value)
            except ValueError:
                attrs[key] = value
        elif kind in _XES_CASTS:
            try:
                attrs[key] = _XES_CASTS[kind](value)
            except ValueError:
                attrs[key] = value
    return attrs


def parse_xes(path: str) -> EventLog:
    """Read the minimal XES subset: concept:name and time:timestamp.

    Trace and event concept:name are required, as is the event timestamp.
    Any further simple-typed event attributes are preserved verbatim in
    Event.attributes. Nested containers and extensions are ignored.
    """
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"{path}: {exc}") from exc
    root = tree.getroot()
    traces: list[Trace] = []
    for t_index, trace_elem in enumerate(root):
        if _local(trace_elem.tag) != "trace":
            continue
        t_attrs = _event_attributes(trace_elem)
        tid = t_attrs.get("concept:name")
        if not isinstance(tid, str) or not tid:
            raise MissingConceptNameError(f"trace #{t_index} in {path}")
        events: list[tuple[datetime, int, Event]] = []
        for e_index, ev_elem in enumerate(trace_elem):
            if _local(ev_elem.tag) != "event":
                continue
            attrs = _event_attributes(ev_elem)
            act = attrs.pop("concept:name", None)
            if not isinstance(act, str) or not act:
                raise MissingConceptNameError(
                    f"event #{e_index} of trace {tid!r} in {path}"
                )
            ts = attrs.pop("time:timestamp", None)
            if not isinstance(ts, datetime):
                raise MissingTimestampError(
                    f"event #{e_index} of trace {tid!r} in {path}"
                )
            events.append(
                (ts, e_index, Event(trace_id=tid, activity=act, timestamp=ts,
                                    attributes=attrs))
            )
        if not events:
            continue
        events.sort(key=lambda e: (e[0], e[1]))
        traces.append(Trace(trace_id=tid, events=tuple(ev for _, _, ev in events)))
    if not traces:
        raise EmptyLogError(f"{path}: no non-empty traces")
    return EventLog(traces)


# -- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class LogStatistics:
    trace_count: int
    variant_count: int
    activity_type_count: int
    avg_trace_length: float
    min_trace_length: int
    max_trace_length: int
    avg_activity_types_per_trace: float

    def as_dict(self) -> dict[str, float]:
        return {
            "trace_count": self.trace_count,
            "variant_count": self.variant_count,
            "activity_type_count": self.activity_type_count,
            "avg_trace_length": self.avg_trace_length,
            "min_trace_length": self.min_trace_length,
            "max_trace_length": self.max_trace_length,
            "avg_activity_types_per_trace": self.avg_activity_types_per_trace,
        }


def log_statistics(g: GroupedEventLog) -> LogStatistics:
    """Descriptive statistics over the underlying traces.

    Averages weight each trace once, so a variant with multiplicity m
    contributes m times.
    """
    lengths: list[int] = []
    type_counts: list[int] = []
    activities: set[str] = set()
    for v in g.variants:
        activities.update(v.sequence)
        lengths.extend([len(v.sequence)] * v.multiplicity)
        type_counts.extend([len(set(v.sequence))] * v.multiplicity)
    return LogStatistics(
        trace_count=g.size,
        variant_count=g.supp,
        activity_type_count=len(activities),
        avg_trace_length=sum(lengths) / len(lengths),
        min_trace_length=min(lengths),
        max_trace_length=max(lengths),
        avg_activity_types_per_trace=sum(type_counts) / len(type_counts),
    )
