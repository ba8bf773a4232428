"""Depth-first branch and bound over :class:`SearchState`."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ..instance import Instance
from .config import Objective, SolverConfig, Status
from .schedule import Schedule, evaluate_objective, with_claims
from .state import ABSENT, PRESENT, UNDECIDED, Cut, Inconsistent, Model, SearchState

# decision kinds
PRES, START_EQ, START_GE, LEN_EQ, LEN_GE = "pres", "start=", "start>=", "len=", "len>="

Decision = Tuple[str, int, int]
LOT_MAJOR = True


class InvalidIncumbent(RuntimeError):
    """The search produced a schedule the validator rejects; always a solver bug."""


@dataclass
class SolveStats:
    nodes: int = 0
    fails: int = 0
    wall_time: float = 0.0
    root_bound: Optional[Fraction] = None
    incumbents: List[Tuple[float, Fraction]] = field(default_factory=list)


@dataclass
class SolveResult:
    status: Status
    schedule: Optional[Schedule]
    objective: Optional[Fraction]
    bound: Optional[Fraction]
    stats: SolveStats
    solver: str = "bb"


def lower_bound(state: SearchState, cfg: Optional[SolverConfig] = None) -> Fraction:
    """Objective value no completion of ``state`` can beat."""
    m = state.model
    obj = (cfg or m.cfg).objective
    pres = state.pres
    if obj == Objective.MAKESPAN:
        return Fraction(state.emin[m.sink])
    if obj == Objective.TIME_BALANCE:
        pool = [v for v in m.real if pres[v] == PRESENT and (m.flexible[v] or not m.cfg.flexible_only)]
        if not pool:
            return Fraction(0)
        hi = max(state.lmin[v] - m.a[v] for v in pool)
        lo = min(state.lmax[v] - m.a[v] for v in pool)
        return Fraction(max(0, hi - lo))
    best = Fraction(0)
    for ri in m.balanced:
        cap = m.caps[ri]
        peak = 0
        area = 0
        first, last = None, None
        prof = np.zeros(m.T + 1, dtype=np.int64)
        for v, q in m.users[ri]:
            if pres[v] != PRESENT or state.lmin[v] == 0:
                continue
            peak = max(peak, q)
            area += q * state.lmin[v]
            first = state.smin[v] if first is None else min(first, state.smin[v])
            last = state.emax[v] if last is None else max(last, state.emax[v])
            if state.smax[v] < state.emin[v]:
                prof[state.smax[v]:state.emin[v]] += q
        if area:
            peak = max(peak, int(prof.max()), -(-area // max(1, last - first)))
        best = max(best, Fraction(peak, cap))
    return best


def decisions(state: SearchState) -> List[Decision]:
    """Ordered binary split of ``state``: route choices, other presences, starts, lengths, metas."""
    m = state.model
    pres, smin, smax, lmin, lmax = state.pres, state.smin, state.smax, state.lmin, state.lmax
    ids = m.ids
    pick = None
    for mv, cands in m.alts:
        if pres[mv] != PRESENT:
            continue
        und = [a for a in cands if pres[a] == UNDECIDED]
        if und:
            key = (smin[mv], ids[mv])
            if pick is None or key < pick[0]:
                pick = (key, und[0])
    if pick is not None:
        return [(PRES, pick[1], PRESENT), (PRES, pick[1], ABSENT)]
    und = [v for v in range(m.n) if pres[v] == UNDECIDED]
    if und:
        v = min(und, key=lambda k: (smin[k], ids[k]))
        return [(PRES, v, PRESENT), (PRES, v, ABSENT)]
    # buffers are the time-balance objective itself, so settle them before starts
    lengths_first = m.cfg.objective == Objective.TIME_BALANCE or m.cfg.scenario.kind != "A"
    for group in (m.real, m.metas):
        open_s = [v for v in group if pres[v] == PRESENT and smin[v] < smax[v]]
        open_l = [v for v in group if pres[v] == PRESENT and lmin[v] < lmax[v]]
        if LOT_MAJOR and group is m.real and (open_s or open_l):
            lot = min(m.lot_rank[v] for v in open_s + open_l)
            open_s = [v for v in open_s if m.lot_rank[v] == lot]
            open_l = [v for v in open_l if m.lot_rank[v] == lot]
        if open_l and (lengths_first or not open_s):
            v = min(open_l, key=lambda k: (smin[k], ids[k]))
            return [(LEN_EQ, v, lmin[v]), (LEN_GE, v, lmin[v] + 1)]
        if open_s:
            v = min(open_s, key=lambda k: (smin[k], ids[k]))
            return [(START_EQ, v, smin[v]), (START_GE, v, smin[v] + 1)]
    raise ValueError("state is fully fixed")


def _apply(state: SearchState, dec: Decision) -> None:
    kind, v, x = dec
    if kind == PRES:
        state.set_presence(v, x)
    elif kind == START_EQ:
        state.ub_s(v, x)
    elif kind == START_GE:
        state.lb_s(v, x)
    elif kind == LEN_EQ:
        state.ub_l(v, x)
    else:
        state.lb_l(v, x)


def branch(state: SearchState, cfg: Optional[SolverConfig] = None) -> List[SearchState]:
    """Children of ``state`` in search order, not yet propagated."""
    out = []
    for dec in decisions(state):
        child = state.copy()
        _apply(child, dec)
        out.append(child)
    return out


def _child(state: SearchState, dec: Decision, cut: Optional[Cut]) -> Optional[SearchState]:
    child = state.copy()
    try:
        _apply(child, dec)
    except Inconsistent:
        return None
    return child if child.propagate([dec[1]], cut) else None


def _extract(state: SearchState, inst: Instance, cfg: SolverConfig) -> Schedule:
    full = state.to_schedule()
    slots = {j: s for j, s in full.slots.items() if j in inst.network.activities}
    return with_claims(inst, Schedule(slots), cfg.flexible_only)


def solve(inst: Instance, cfg: Optional[SolverConfig] = None) -> SolveResult:
    cfg = (cfg or SolverConfig()).resolved(inst)
    t0 = time.perf_counter()
    stats = SolveStats()
    model = Model(inst, cfg)
    root = model.root()

    def done(status, sched, value, bound):
        stats.wall_time = time.perf_counter() - t0
        return SolveResult(status, sched, value, bound, stats)

    if not root.propagate():
        stats.fails += 1
        return done(Status.INFEASIBLE, None, None, None)
    root_lb = lower_bound(root)
    stats.root_bound = root_lb

    best: Optional[Schedule] = None
    best_val: Optional[Fraction] = None
    cut: Optional[Cut] = None
    # entries: (bound inherited from the parent, parent state, decision); decision None = ready state
    stack: List[Tuple[Fraction, SearchState, Optional[Decision]]] = [(root_lb, root, None)]
    limited = False
    while stack:
        if (time.perf_counter() - t0 > cfg.time_limit
                or (cfg.node_limit is not None and stats.nodes >= cfg.node_limit)):
            limited = True
            break
        parent_lb, st, dec = stack.pop()
        if best_val is not None and parent_lb >= best_val:
            continue
        stats.nodes += 1
        if dec is not None:
            st = _child(st, dec, cut)
            if st is None:
                stats.fails += 1
                continue
        lb = max(parent_lb, lower_bound(st))
        if best_val is not None and lb >= best_val:
            continue
        if st.is_fixed():
            sched = _extract(st, inst, cfg)
            if cfg.validate_incumbents:
                from ..oracle.validator import validate_schedule

                bad = validate_schedule(inst, sched, cfg)
                if bad:
                    raise InvalidIncumbent("; ".join(str(v) for v in bad[:5]))
            value = evaluate_objective(inst, sched, cfg)
            if best_val is None or value < best_val:
                best, best_val = sched, value
                cut = Cut(cfg.objective, value)
                stats.incumbents.append((time.perf_counter() - t0, value))
                if best_val <= root_lb:
                    break
            continue
        for d in reversed(decisions(st)):
            stack.append((lb, st, d))

    if limited and stack:
        open_lb = min(entry[0] for entry in stack)
        bound = open_lb if best_val is None else min(best_val, open_lb)
        bound = max(root_lb, bound)
        if best is None:
            return done(Status.TIME_LIMIT, None, None, bound)
        if bound >= best_val:
            return done(Status.OPTIMAL, best, best_val, best_val)
        return done(Status.FEASIBLE, best, best_val, bound)
    if best is None:
        return done(Status.INFEASIBLE, None, None, None)
    return done(Status.OPTIMAL, best, best_val, best_val)
