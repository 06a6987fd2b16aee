import os
from datetime import datetime, timedelta, timezone

import pytest

from tracecluster.log_model import Event, EventLog, Trace, group

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

_T0 = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)


def make_trace(tid: str, activities, start=_T0, step_minutes=1) -> Trace:
    events = tuple(
        Event(tid, a, start + timedelta(minutes=i * step_minutes))
        for i, a in enumerate(activities)
    )
    return Trace(tid, events)


def make_log(sequences) -> EventLog:
    """Log from [(sequence, multiplicity), ...]; trace ids are vItJ."""
    traces = []
    for vi, (seq, mult) in enumerate(sequences):
        for j in range(mult):
            traces.append(make_trace(f"v{vi}t{j}", seq))
    return EventLog(traces)


@pytest.fixture
def data_dir() -> str:
    return DATA_DIR


@pytest.fixture
def small_log() -> EventLog:
    return make_log([
        (("a", "b", "c"), 3),
        (("a", "c", "b"), 2),
        (("a", "b", "b", "c"), 1),
        (("d", "e"), 2),
    ])


@pytest.fixture
def small_grouped(small_log):
    return group(small_log)
