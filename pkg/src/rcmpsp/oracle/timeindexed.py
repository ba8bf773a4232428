"""Slot-level view of a schedule: started s, working w, completed y, selected x."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np

from ..solver.schedule import Schedule, Slot


@dataclass
class TimeIndexedSchedule:
    horizon: int
    x: Dict[int, int]
    s: Dict[int, np.ndarray]
    w: Dict[int, np.ndarray]
    y: Dict[int, np.ndarray]

    @property
    def ids(self):
        return sorted(self.x)


def to_time_indexed(sched: Schedule, horizon: int, ids: Optional[Iterable[int]] = None) -> TimeIndexedSchedule:
    """Slots 0..T; s marks the start slot, y the end slot, w covers [start, end)."""
    ids = sorted(sched.slots) if ids is None else sorted(ids)
    n = horizon + 1
    x, s, w, y = {}, {}, {}, {}
    for j in ids:
        slot = sched.slots[j]
        s[j] = np.zeros(n, dtype=np.int64)
        w[j] = np.zeros(n, dtype=np.int64)
        y[j] = np.zeros(n, dtype=np.int64)
        x[j] = int(bool(slot.present))
        if not slot.present:
            continue
        if not (0 <= slot.start <= horizon and 0 <= slot.end <= horizon):
            raise ValueError(f"activity {j} lies outside the horizon [0, {horizon}]")
        if slot.end < slot.start:
            raise ValueError(f"activity {j} ends before it starts")
        s[j][slot.start] = 1
        y[j][slot.end] = 1
        w[j][slot.start:slot.end] = 1
    return TimeIndexedSchedule(horizon, x, s, w, y)


def from_time_indexed(ti: TimeIndexedSchedule) -> Schedule:
    """Inverse of :func:`to_time_indexed` for well-formed rows."""
    slots = {}
    for j in ti.ids:
        if not ti.x[j]:
            slots[j] = Slot(False)
            continue
        starts = np.flatnonzero(ti.s[j])
        ends = np.flatnonzero(ti.y[j])
        slots[j] = Slot(True, int(starts[0]) if len(starts) else None,
                        int(ends[0]) if len(ends) else None)
    return Schedule(slots)
