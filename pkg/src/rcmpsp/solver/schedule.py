"""Schedules, derived metrics, objective values and the schedule file format."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from ..instance import Instance
from .config import Objective, SolverConfig

FORMAT_TAG = "rcmpsp-schedule/1"


@dataclass(frozen=True)
class Slot:
    present: bool
    start: Optional[int] = None
    end: Optional[int] = None

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Claims:
    """Values of the auxiliary decision variables B, S and u_r as reported by a solver."""

    B: Optional[int] = None
    S: Optional[int] = None
    peaks: Optional[Dict[int, int]] = None


@dataclass(frozen=True)
class Schedule:
    slots: Dict[int, Slot]
    claims: Optional[Claims] = None

    def present_ids(self) -> List[int]:
        return sorted(j for j, s in self.slots.items() if s.present)

    def __getitem__(self, j: int) -> Slot:
        return self.slots[j]


@dataclass(frozen=True)
class Metrics:
    makespan: Optional[int]
    buffers: Dict[int, int]
    B: int
    S: int
    peaks: Dict[int, int]
    profiles: Dict[int, List[Tuple[int, int]]]  # resource -> [(time, level)] step points


def usage_profiles(inst: Instance, sched: Schedule) -> Dict[int, List[Tuple[int, int]]]:
    """Step function of renewable usage: level holds from each time until the next point."""
    events: Dict[int, Dict[int, int]] = {r: {} for r in inst.renewable_ids}
    acts = inst.network.activities
    for j, s in sched.slots.items():
        if not s.present or j not in acts or s.end <= s.start:
            continue
        for r, q in acts[j].demands.items():
            if q and r in events:
                ev = events[r]
                ev[s.start] = ev.get(s.start, 0) + q
                ev[s.end] = ev.get(s.end, 0) - q
    out = {}
    for r, ev in events.items():
        level = 0
        steps = []
        for t in sorted(ev):
            level += ev[t]
            steps.append((t, level))
        out[r] = steps
    return out


def compute_metrics(inst: Instance, sched: Schedule, flexible_only: bool = False) -> Metrics:
    net = inst.network
    buffers = {}
    for j, s in sched.slots.items():
        a = net.activities.get(j)
        if a is None or not s.present:
            continue
        if flexible_only and not a.is_flexible:
            continue
        buffers[j] = s.length - a.min_duration
    profiles = usage_profiles(inst, sched)
    peaks = {r: max((lvl for _, lvl in steps), default=0) for r, steps in profiles.items()}
    sink = sched.slots.get(net.sink_id)
    makespan = sink.end if sink is not None and sink.present else None
    B = max(buffers.values(), default=0)
    S = min(buffers.values(), default=0)
    return Metrics(makespan, buffers, B, S, peaks, profiles)


def evaluate_objective(inst: Instance, sched: Schedule, cfg: SolverConfig) -> Fraction:
    obj = Objective(cfg.objective)
    m = compute_metrics(inst, sched, cfg.flexible_only)
    if obj == Objective.MAKESPAN:
        if m.makespan is None:
            raise ValueError("sink is not scheduled")
        return Fraction(m.makespan)
    if obj == Objective.TIME_BALANCE:
        return Fraction(m.B - m.S)
    balanced = inst.balanced_ids
    if not balanced:
        raise ValueError("resource balance needs a non-empty balanced set")
    caps = inst.capacities
    return max(Fraction(m.peaks.get(r, 0), caps[r]) for r in balanced)


def with_claims(inst: Instance, sched: Schedule, flexible_only: bool = False) -> Schedule:
    m = compute_metrics(inst, sched, flexible_only)
    peaks = {r: m.peaks.get(r, 0) for r in inst.balanced_ids}
    return Schedule(sched.slots, Claims(m.B, m.S, peaks))


def schedule_to_dict(sched: Schedule, instance_name: str = "") -> dict:
    out = {
        "format": FORMAT_TAG,
        "instance": instance_name,
        "activities": [
            {"id": j, "present": s.present, "start": s.start, "end": s.end}
            for j, s in sorted(sched.slots.items())
        ],
    }
    if sched.claims is not None:
        c = sched.claims
        out["claims"] = {"B": c.B, "S": c.S,
                         "peaks": None if c.peaks is None else {str(r): u for r, u in sorted(c.peaks.items())}}
    return out


def schedule_from_dict(data: Mapping) -> Schedule:
    if data.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported schedule format {data.get('format')!r}")
    slots = {int(e["id"]): Slot(e["present"], e.get("start"), e.get("end")) for e in data["activities"]}
    claims = None
    if data.get("claims") is not None:
        c = data["claims"]
        peaks = c.get("peaks")
        claims = Claims(c.get("B"), c.get("S"),
                        None if peaks is None else {int(r): u for r, u in peaks.items()})
    return Schedule(slots, claims)


def save_schedule(sched: Schedule, path: Union[str, Path], instance_name: str = "") -> Path:
    path = Path(path)
    path.write_text(json.dumps(schedule_to_dict(sched, instance_name), sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")
    return path


def load_schedule(path: Union[str, Path]) -> Tuple[Schedule, str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return schedule_from_dict(data), data.get("instance", "")
