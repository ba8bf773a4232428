"""Schedule validation against the mixed-integer model semantics.

Checks run in three stages and stop at the first stage that reports anything:
variable domains, then the start/end/working bookkeeping, then the model
constraints proper. Each violation carries the tag of the constraint it breaks.
Time-flexible instances use the ``Eq.N`` family; the plain alternative-chain
classes use the ``c.N`` family plus ``Eq.31`` for fixed durations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..instance import Instance
from ..network import Kind, to_cp_network
from ..solver.config import Objective, SolverConfig
from ..solver.schedule import Schedule, Slot, usage_profiles
from .timeindexed import TimeIndexedSchedule, from_time_indexed

ACTF_TAGS = (
    "Eq.2", "Eq.3", "Eq.4", "Eq.5", "Eq.6", "Eq.7", "Eq.8", "Eq.9", "Eq.10", "Eq.11",
    "Eq.12", "Eq.13", "Eq.14", "Eq.15", "Eq.16", "Eq.17", "Eq.18",
    "Eq.20", "Eq.21", "Eq.22", "Eq.24", "Eq.25", "Eq.26", "Eq.27",
    "Eq.45b", "Eq.45c", "Eq.46",
)
AC_TAGS = ("c.2", "c.3", "c.4", "c.5", "c.6", "c.7", "c.8", "c.9", "c.10", "c.11", "Eq.31", "Eq.46")
STRUCTURE_TAG = "format"


@dataclass(frozen=True)
class Violation:
    tag: str
    ids: Tuple[int, ...] = ()
    slot: Optional[int] = None
    message: str = ""

    def __str__(self) -> str:
        where = f" ids={list(self.ids)}" if self.ids else ""
        when = f" t={self.slot}" if self.slot is not None else ""
        return f"{self.tag}:{where}{when} {self.message}".rstrip()

    def to_dict(self) -> dict:
        return {"tag": self.tag, "ids": list(self.ids), "slot": self.slot, "message": self.message}


def _is_int(v) -> bool:
    return isinstance(v, Integral) and not isinstance(v, bool)


def prune(inst: Instance, sched: Schedule) -> Schedule:
    """Drop selected activities that no selected predecessor leads to (post-processing for AC models)."""
    net = inst.network
    slots = dict(sched.slots)
    changed = True
    while changed:
        changed = False
        for j, s in slots.items():
            if j not in net.activities or not s.present or j == net.source_id:
                continue
            preds = net.predecessors[j]
            if preds and not any(slots.get(p, Slot(False)).present for p in preds):
                slots[j] = Slot(False)
                changed = True
    return Schedule(slots, sched.claims)


def validate_schedule(inst: Instance, sched: Union[Schedule, TimeIndexedSchedule],
                      cfg: Optional[SolverConfig] = None, prune_extra: bool = False) -> List[Violation]:
    cfg = cfg or SolverConfig()
    actf = inst.problem_class.time_flexible
    T = inst.horizon
    net = inst.network

    if isinstance(sched, TimeIndexedSchedule):
        found = _check_time_indexed(inst, sched, actf)
        if found:
            return found
        sched = from_time_indexed(sched)

    meta_ids = set(to_cp_network(net).meta_set)
    found = []
    missing = sorted(set(net.activities) - set(sched.slots))
    unknown = sorted(set(sched.slots) - set(net.activities) - meta_ids)
    if missing:
        found.append(Violation(STRUCTURE_TAG, tuple(missing), message="activities missing from schedule"))
    if unknown:
        found.append(Violation(STRUCTURE_TAG, tuple(unknown), message="ids unknown to the instance"))
    if found:
        return found

    slots = {j: s for j, s in sched.slots.items() if j in net.activities}
    found = _check_domains(slots, T, actf)
    if found:
        return found
    sched = Schedule(slots, sched.claims)
    if prune_extra and not actf:
        sched = prune(inst, sched)
    if actf:
        return _check_actf(inst, sched, cfg)
    return _check_ac(inst, sched)


def _check_time_indexed(inst: Instance, ti: TimeIndexedSchedule, actf: bool) -> List[Violation]:
    tag_x, tag_v = ("Eq.17", "Eq.18") if actf else ("c.9", "c.10")
    start_tag, end_tag, work_tag = ("Eq.3", "Eq.4", "Eq.12") if actf else ("c.3", "c.3", "Eq.31")
    out = []
    for j in ti.ids:
        if ti.x[j] not in (0, 1):
            out.append(Violation(tag_x, (j,), message=f"x={ti.x[j]} is not binary"))
        for name, row in (("s", ti.s[j]), ("w", ti.w[j]), ("y", ti.y[j])):
            bad = np.flatnonzero((row != 0) & (row != 1))
            if len(bad):
                out.append(Violation(tag_v, (j,), int(bad[0]), f"{name} is not binary"))
    if out:
        return out
    for j in ti.ids:
        if int(ti.s[j].sum()) != ti.x[j]:
            out.append(Violation(start_tag, (j,), message="activity must start exactly once iff selected"))
        if int(ti.y[j].sum()) != ti.x[j]:
            out.append(Violation(end_tag, (j,), message="activity must end exactly once iff selected"))
    if out:
        return out
    for j in ti.ids:
        expect = np.cumsum(ti.s[j] - ti.y[j])
        bad = np.flatnonzero(expect != ti.w[j])
        if len(bad):
            out.append(Violation(work_tag, (j,), int(bad[0]), "working slots disagree with start/end"))
    return out


def _check_domains(slots: Dict[int, Slot], T: int, actf: bool) -> List[Violation]:
    tag_x, tag_v = ("Eq.17", "Eq.18") if actf else ("c.9", "c.10")
    out = []
    for j, s in sorted(slots.items()):
        if not (s.present is True or s.present is False or s.present in (0, 1)) or isinstance(s.present, float):
            out.append(Violation(tag_x, (j,), message=f"presence {s.present!r} is not binary"))
            continue
        for v in (s.start, s.end):
            if v is not None and not _is_int(v):
                out.append(Violation(tag_v, (j,), message=f"time {v!r} is not an integer slot"))
    if out:
        return out
    start_tag, end_tag = ("Eq.3", "Eq.4") if actf else ("c.3", "c.3")
    for j, s in sorted(slots.items()):
        if bool(s.present) != (s.start is not None):
            out.append(Violation(start_tag, (j,), message="start given iff selected"))
        if bool(s.present) != (s.end is not None):
            out.append(Violation(end_tag, (j,), message="end given iff selected"))
    if out:
        return out
    for j, s in sorted(slots.items()):
        if s.present and not (0 <= s.start <= T and 0 <= s.end <= T):
            out.append(Violation("Eq.46", (j,), message=f"interval [{s.start}, {s.end}) leaves [0, {T}]"))
    if out:
        return out
    for j, s in sorted(slots.items()):
        if s.present and s.end < s.start:
            out.append(Violation("Eq.12" if actf else "Eq.31", (j,), s.start, "end before start"))
    return out


def _present(sched: Schedule, j: int) -> bool:
    return bool(sched.slots[j].present)


def _orphans(inst: Instance, sched: Schedule) -> List[int]:
    net = inst.network
    return [j for j in net.activities
            if j != net.source_id and _present(sched, j)
            and not any(_present(sched, p) for p in net.predecessors[j])]


def _selection_checks(inst: Instance, sched: Schedule, or_tag: str, and_tag: str) -> List[Violation]:
    net = inst.network
    out = []
    for i, act in net.activities.items():
        xi = _present(sched, i)
        if act.kind == Kind.OR:
            heads = [r[0] for r in net.relations.get(i, ())] or list(net.successors[i])
            chosen = sum(_present(sched, h) for h in heads)
            if chosen != int(xi):
                out.append(Violation(or_tag, (i,), message=f"{chosen} successor relations selected, expected {int(xi)}"))
        elif act.kind in (Kind.AND, Kind.SOURCE) and xi:
            for j in net.successors[i]:
                if not _present(sched, j):
                    out.append(Violation(and_tag, (i, j), message="AND successor not selected"))
    return out


def _check_actf(inst: Instance, sched: Schedule, cfg: SolverConfig) -> List[Violation]:
    net = inst.network
    T = inst.horizon
    src, sink = net.source_id, net.sink_id
    S = sched.slots
    out: List[Violation] = []

    if not S[src].present or S[src].start != 0:
        out.append(Violation("Eq.2", (src,), message="source must start at slot 0"))
    out += _selection_checks(inst, sched, "Eq.5", "Eq.6")

    for j in sorted(net.delivery_set):
        present_preds = [i for i in net.predecessors[j] if S[i].present]
        if len(present_preds) != int(bool(S[j].present)):
            out.append(Violation("Eq.7", (j, *present_preds), message="delivery needs exactly one selected predecessor"))
    for j in _orphans(inst, sched):
        out.append(Violation("Eq.7", (j,), message="selected activity outside the chosen chain"))

    for i, j in sorted(net.arcs):
        if i == src or j == sink or not (S[i].present and S[j].present):
            continue
        if S[i].end != S[j].start:
            kind_j = net.activities[j].kind
            tag = "Eq.10" if kind_j == Kind.OUT else "Eq.8" if net.activities[i].kind == Kind.OR else "Eq.9"
            out.append(Violation(tag, (i, j), S[j].start, f"end {S[i].end} != start {S[j].start}"))

    if not S[sink].present:
        out.append(Violation("Eq.11", (sink,), message="sink must be selected"))
    else:
        for j in sorted(net.delivery_set):
            if S[j].present and S[j].end > S[sink].start:
                out.append(Violation("Eq.11", (j, sink), S[j].end, "delivery ends after the sink starts"))

    for j, act in net.activities.items():
        if not S[j].present:
            continue
        length = S[j].end - S[j].start
        if length < act.min_duration:
            out.append(Violation("Eq.13", (j,), S[j].start, f"length {length} < a={act.min_duration}"))
        if length > act.max_duration:
            out.append(Violation("Eq.14", (j,), S[j].start, f"length {length} > b={act.max_duration}"))

    tag = cfg.scenario.tag
    for j in sorted(net.delivery_set):
        d = net.activities[j].due_date
        lo, hi = cfg.scenario.window(d, T)
        if not S[j].present:
            out.append(Violation(tag, (j,), message="delivery not scheduled"))
        elif not lo <= S[j].end <= hi:
            out.append(Violation(tag, (j,), S[j].end, f"end {S[j].end} outside [{lo}, {hi}] for due date {d}"))

    out += _capacity_checks(inst, sched, cfg)
    if cfg.objective == Objective.TIME_BALANCE and sched.claims is not None:
        out += _time_balance_checks(inst, sched, cfg)
    return out


def _capacity_checks(inst: Instance, sched: Schedule, cfg: SolverConfig) -> List[Violation]:
    out = []
    caps = inst.capacities
    balanced = set(inst.balanced_ids)
    rb = cfg.objective == Objective.RESOURCE_BALANCE
    claims = sched.claims.peaks if (rb and sched.claims is not None) else None
    for r, steps in usage_profiles(inst, sched).items():
        peak, when = max(((lvl, t) for t, lvl in steps), default=(0, None))
        if not rb:
            if peak > caps[r]:
                out.append(Violation("Eq.16", (r,), when, f"usage {peak} > capacity {caps[r]}"))
        elif r not in balanced:
            if peak > caps[r]:
                out.append(Violation("Eq.26", (r,), when, f"usage {peak} > capacity {caps[r]}"))
        elif claims is None or r not in claims:
            if peak > caps[r]:
                out.append(Violation("Eq.25", (r,), when, f"peak {peak} > capacity {caps[r]}"))
        else:
            u = claims[r]
            # a negative claim is a domain error; comparing usage against it adds nothing
            if u < 0:
                out.append(Violation("Eq.27", (r,), message=f"claimed peak {u} < 0"))
            elif peak > u:
                out.append(Violation("Eq.24", (r,), when, f"usage {peak} exceeds claimed peak {u}"))
            if u > caps[r]:
                out.append(Violation("Eq.25", (r,), message=f"claimed peak {u} > capacity {caps[r]}"))
    return out


def _time_balance_checks(inst: Instance, sched: Schedule, cfg: SolverConfig) -> List[Violation]:
    c = sched.claims
    out = []
    if c.B is None or c.S is None:
        return out
    M = cfg.big_M if cfg.big_M is not None else inst.horizon
    for j, act in inst.network.activities.items():
        if cfg.flexible_only and not act.is_flexible:
            continue
        s = sched.slots[j]
        x = int(bool(s.present))
        work = (s.end - s.start) if x else 0
        if work + (1 - x) * M - x * act.min_duration < c.S:
            out.append(Violation("Eq.20", (j,), message=f"buffer below claimed smallest buffer S={c.S}"))
        if work - x * act.min_duration > c.B:
            out.append(Violation("Eq.21", (j,), message=f"buffer above claimed largest buffer B={c.B}"))
    if c.B < 0 or c.S < 0:
        out.append(Violation("Eq.22", (), message=f"B={c.B}, S={c.S} must be non-negative"))
    return out


def _check_ac(inst: Instance, sched: Schedule) -> List[Violation]:
    net = inst.network
    src = net.source_id
    S = sched.slots
    out: List[Violation] = []
    if not S[src].present or S[src].start != 0:
        out.append(Violation("c.2", (src,), message="project must start with the source at slot 0"))
    out += _selection_checks(inst, sched, "c.4", "c.5")
    for j in _orphans(inst, sched):
        out.append(Violation("c.11", (j,), message="selected activity outside the chosen alternatives"))
    for i, j in sorted(net.arcs):
        if S[i].present and S[j].present and S[i].end > S[j].start:
            out.append(Violation("c.6", (i, j), S[j].start, f"end {S[i].end} > start {S[j].start}"))
    for j, act in net.activities.items():
        if S[j].present and S[j].end - S[j].start != act.min_duration:
            out.append(Violation("Eq.31", (j,), S[j].start, f"length must equal {act.min_duration}"))
    caps = inst.capacities
    for r, steps in usage_profiles(inst, sched).items():
        peak, when = max(((lvl, t) for t, lvl in steps), default=(0, None))
        if peak > caps[r]:
            out.append(Violation("c.7", (r,), when, f"usage {peak} > capacity {caps[r]}"))
    for r in inst.nonrenewable_ids:
        total = sum(net.activities[j].demands.get(r, 0) for j in net.activities if S[j].present)
        if total > caps[r]:
            out.append(Violation("c.8", (r,), message=f"consumption {total} > budget {caps[r]}"))
    return out


def tags_of(violations: List[Violation]) -> set:
    return {v.tag for v in violations}
