"""Exhaustive reference solver for desk-sized instances.

Shares no search code with the branch and bound. Selections are enumerated by
forward closure over the original network (an OR node keeps one relation head,
every other present node keeps all successors), timings by plain enumeration.

Time-flexible instances: every lot is a chain without idle time, so a lot is
fully described by its selection, its lengths and the end of its delivery.
All such lot candidates are listed, reduced to distinct (resource usage,
objective contribution) signatures and combined lot by lot under the resource
profiles. Space estimate: the product over lots of the number of distinct
candidates, each at most ``|routes| * prod(b - a + 1) * |delivery window|``.

Classes without time flexibility: selections are enumerated globally and
start times activity by activity in precedence order, pruned by the incumbent
makespan. Only meant for a handful of activities.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ..instance import Instance
from ..network import Kind, Network
from ..solver.config import Objective, SolverConfig, Status
from ..solver.schedule import Schedule, Slot, evaluate_objective, with_claims
from ..solver.search import SolveResult, SolveStats
from .validator import validate_schedule


class OracleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_candidates: int = 200_000  # per lot, before deduplication
    max_space: int = 10 ** 12  # product of distinct candidates over lots
    max_nodes: int = 5_000_000
    max_selections: int = 10_000


Interval = Tuple[int, int, int]  # (activity, start, end)


def _closure_selections(net: Network, roots: Sequence[int], scope: FrozenSet[int],
                        limit: int) -> List[FrozenSet[int]]:
    order = [n for n in net.topological_order if n in scope]
    out: List[FrozenSet[int]] = []

    def rec(k: int, present: frozenset):
        while k < len(order):
            n = order[k]
            k += 1
            if n not in present:
                continue
            succ = [j for j in net.successors[n] if j in scope]
            if net.activities[n].kind == Kind.OR and succ:
                heads = [r[0] for r in net.relations[n]] if n in net.relations else succ
                for h in heads:
                    rec(k, present | {h})
                return
            present = present | set(succ)
        out.append(present)
        if len(out) > limit:
            raise OracleLimitExceeded(f"more than {limit} selections")

    rec(0, frozenset(roots))
    return sorted(set(out), key=sorted)


def _usage(inst: Instance, intervals: Sequence[Interval]) -> Tuple[Tuple[int, int, int, int], ...]:
    acts = inst.network.activities
    ren = set(inst.renewable_ids)
    out = []
    for j, s, e in intervals:
        if e > s:
            for r, q in acts[j].demands.items():
                if q > 0 and r in ren:
                    out.append((r, s, e, q))
    return tuple(sorted(out))


@dataclass(frozen=True)
class _Candidate:
    end: int
    intervals: Tuple[Interval, ...]
    usage: Tuple[Tuple[int, int, int, int], ...]
    buf_hi: int
    buf_lo: int


def _lot_candidates(inst: Instance, cfg: SolverConfig, lot: int, limits: OracleLimits) -> List[_Candidate]:
    net = inst.network
    acts = net.activities
    members = frozenset(net.lot_members(lot))
    roots = [j for j in members if any(p not in members for p in net.predecessors[j])]
    delivery = net.delivery_of(lot)
    lo_end, hi_end = cfg.scenario.window(acts[delivery].due_date, inst.horizon)
    hi_end = min(hi_end, inst.horizon)
    seen: Dict[tuple, _Candidate] = {}
    raw = 0
    for sel in _closure_selections(net, roots, members, limits.max_selections):
        if delivery not in sel:
            continue
        chain = [n for n in net.topological_order if n in sel]
        ranges = [range(acts[n].min_duration, acts[n].max_duration + 1) for n in chain]
        for lengths in itertools.product(*ranges):
            rel: Dict[int, Tuple[int, int]] = {}
            ok = True
            for n, ln in zip(chain, lengths):
                ends = {rel[p][1] for p in net.predecessors[n] if p in rel}
                if len(ends) > 1:
                    ok = False
                    break
                s = ends.pop() if ends else 0
                rel[n] = (s, s + ln)
            if not ok:
                continue
            span = rel[delivery][1]
            first = min(s for s, _ in rel.values())
            bufs = [ln - acts[n].min_duration for n, ln in zip(chain, lengths)
                    if not cfg.flexible_only or acts[n].is_flexible]
            for end in range(max(lo_end, span - first), hi_end + 1):
                raw += 1
                if raw > limits.max_candidates:
                    raise OracleLimitExceeded(f"lot {lot}: more than {limits.max_candidates} candidates")
                shift = end - span
                ivs = tuple((n, s + shift, e + shift) for n, (s, e) in sorted(rel.items()))
                usage = _usage(inst, ivs)
                hi = max(bufs, default=None)
                lo = min(bufs, default=None)
                if cfg.objective == Objective.MAKESPAN:
                    key = (usage, end)
                elif cfg.objective == Objective.TIME_BALANCE:
                    key = (usage, hi, lo)
                else:
                    key = (usage,)
                if key not in seen:
                    seen[key] = _Candidate(end, ivs, usage, hi, lo)
    return sorted(seen.values(), key=lambda c: (c.end, c.intervals))


def estimate_space(inst: Instance, cfg: Optional[SolverConfig] = None,
                   limits: Optional[OracleLimits] = None) -> int:
    """Product over lots of distinct lot candidates (time-flexible classes only)."""
    cfg = (cfg or SolverConfig()).resolved(inst)
    limits = limits or OracleLimits()
    space = 1
    for lot in sorted(inst.network.lots):
        space *= len(_lot_candidates(inst, cfg, lot, limits))
    return space


class _Profile:
    def __init__(self, inst: Instance):
        self.rows = {r: k for k, r in enumerate(inst.renewable_ids)}
        self.caps = np.array([inst.capacities[r] for r in inst.renewable_ids], dtype=np.int64)
        self.level = np.zeros((len(self.rows), inst.horizon + 1), dtype=np.int64)

    def fits(self, usage) -> bool:
        return all(int(self.level[self.rows[r], s:e].max()) + q <= self.caps[self.rows[r]]
                   for r, s, e, q in usage)

    def add(self, usage, sign: int = 1) -> None:
        for r, s, e, q in usage:
            self.level[self.rows[r], s:e] += sign * q

    def peak_ratio(self, balanced: Sequence[int], caps: Dict[int, int]) -> Fraction:
        return max(Fraction(int(self.level[self.rows[r]].max()), caps[r]) for r in balanced)


def _schedule_from(inst: Instance, intervals: Sequence[Interval], sink_start: int) -> Schedule:
    net = inst.network
    slots = {j: Slot(False) for j in net.activities}
    for j, s, e in intervals:
        slots[j] = Slot(True, s, e)
    slots[net.source_id] = Slot(True, 0, 0)
    slots[net.sink_id] = Slot(True, sink_start, sink_start + net.activities[net.sink_id].min_duration)
    return Schedule(slots)


def _solve_actf(inst: Instance, cfg: SolverConfig, limits: OracleLimits, stats: SolveStats):
    lots = sorted(inst.network.lots)
    cands = {l: _lot_candidates(inst, cfg, l, limits) for l in lots}
    if any(not c for c in cands.values()):
        return None, None
    space = 1
    for c in cands.values():
        space *= len(c)
    if space > limits.max_space:
        raise OracleLimitExceeded(f"search space {space} above {limits.max_space}")
    order = sorted(lots, key=lambda l: (len(cands[l]), l))
    obj = cfg.objective
    caps = inst.capacities
    balanced = list(inst.balanced_ids)
    literal_tb = obj == Objective.TIME_BALANCE and not cfg.flexible_only

    def own(c: _Candidate) -> Fraction:
        """Objective of the lot alone; the full value is never smaller."""
        if obj == Objective.MAKESPAN:
            return Fraction(c.end)
        if obj == Objective.TIME_BALANCE:
            if c.buf_hi is None:
                return Fraction(0)
            return Fraction(c.buf_hi if literal_tb else c.buf_hi - c.buf_lo)
        peak = Fraction(0)
        for r in balanced:
            ev: Dict[int, int] = {}
            for rr, s, e, q in c.usage:
                if rr == r:
                    ev[s] = ev.get(s, 0) + q
                    ev[e] = ev.get(e, 0) - q
            level = top = 0
            for t in sorted(ev):
                level += ev[t]
                top = max(top, level)
            peak = max(peak, Fraction(top, caps[r]))
        return peak

    scored = {l: sorted(((own(c), c) for c in cands[l]), key=lambda p: (p[0], p[1].end, p[1].intervals))
              for l in lots}
    floor = max(scored[l][0][0] for l in lots)
    # rest[k]: no completion of the first k lots can beat the best lone value of a later lot
    rest = [Fraction(0)] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        rest[k] = max(rest[k + 1], scored[order[k]][0][0])
    prof = _Profile(inst)
    best: List = [None, None]  # value, chosen candidates
    chosen: List[_Candidate] = []

    def value_of(partial: List[_Candidate]) -> Fraction:
        if obj == Objective.MAKESPAN:
            return Fraction(max(c.end for c in partial))
        if obj == Objective.TIME_BALANCE:
            his = [c.buf_hi for c in partial if c.buf_hi is not None]
            los = [c.buf_lo for c in partial if c.buf_lo is not None]
            if literal_tb:  # source and sink carry buffer 0
                his.append(0)
                los.append(0)
            return Fraction(max(his) - min(los)) if his else Fraction(0)
        return prof.peak_ratio(balanced, caps)

    def rec(k: int) -> bool:
        stats.nodes += 1
        if stats.nodes > limits.max_nodes:
            raise OracleLimitExceeded(f"more than {limits.max_nodes} nodes")
        if k == len(order):
            val = value_of(chosen)
            if best[0] is None or val < best[0]:
                best[0], best[1] = val, list(chosen)
            return best[0] <= floor
        for lone, c in scored[order[k]]:
            if best[0] is not None and max(lone, rest[k + 1]) >= best[0]:
                break
            # rejected candidates count too, so the node budget bounds the total work
            stats.nodes += 1
            if stats.nodes > limits.max_nodes:
                raise OracleLimitExceeded(f"more than {limits.max_nodes} nodes")
            if not prof.fits(c.usage):
                continue
            prof.add(c.usage)
            chosen.append(c)
            # every objective is monotone in the set of chosen lots
            if best[0] is None or value_of(chosen) < best[0]:
                if rec(k + 1):
                    return True
            chosen.pop()
            prof.add(c.usage, -1)
        return False

    rec(0)
    if best[0] is None:
        return None, None
    ivs = [iv for c in best[1] for iv in c.intervals]
    return _schedule_from(inst, ivs, max(c.end for c in best[1])), best[0]


def _solve_ac(inst: Instance, cfg: SolverConfig, limits: OracleLimits, stats: SolveStats):
    net = inst.network
    acts = net.activities
    T = inst.horizon
    ren = set(inst.renewable_ids)
    nonren = [r for r in inst.nonrenewable_ids]
    caps = inst.capacities
    sels = _closure_selections(net, [net.source_id], frozenset(acts), limits.max_selections)
    prof = _Profile(inst)
    best: List = [None, None]
    for sel in sels:
        if net.sink_id not in sel:
            continue
        if any(sum(acts[j].demands.get(r, 0) for j in sel) > caps[r] for r in nonren):
            continue
        order = [n for n in net.topological_order if n in sel]
        placed: Dict[int, Tuple[int, int]] = {}

        def rec(k: int):
            stats.nodes += 1
            if stats.nodes > limits.max_nodes:
                raise OracleLimitExceeded(f"more than {limits.max_nodes} nodes")
            n = order[k]
            est = max((placed[p][1] for p in net.predecessors[n] if p in placed), default=0)
            a = acts[n]
            if n == net.sink_id:
                if best[0] is None or est < best[0]:
                    best[0] = est
                    best[1] = dict(placed)
                    best[1][n] = (est, est + a.min_duration)
                return
            if n == net.source_id:
                placed[n] = (0, 0)
                rec(k + 1)
                del placed[n]
                return
            for ln in range(a.min_duration, a.max_duration + 1):
                usage = [(r, q) for r, q in a.demands.items() if q > 0 and r in ren]
                for s in range(est, T - ln + 1):
                    if best[0] is not None and s + ln >= best[0]:
                        break
                    u = tuple((r, s, s + ln, q) for r, q in usage) if ln else ()
                    if not prof.fits(u):
                        continue
                    prof.add(u)
                    placed[n] = (s, s + ln)
                    rec(k + 1)
                    del placed[n]
                    prof.add(u, -1)

        rec(0)
    if best[0] is None:
        return None, None
    slots = {j: Slot(False) for j in acts}
    for j, (s, e) in best[1].items():
        slots[j] = Slot(True, s, e)
    return Schedule(slots), Fraction(best[0])


def brute_force_solve(inst: Instance, cfg: Optional[SolverConfig] = None,
                      limits: Optional[OracleLimits] = None) -> SolveResult:
    """Provably optimal result by exhaustive enumeration, or INFEASIBLE."""
    cfg = (cfg or SolverConfig()).resolved(inst)
    limits = limits or OracleLimits()
    t0 = time.perf_counter()
    stats = SolveStats()
    if inst.problem_class.time_flexible:
        sched, value = _solve_actf(inst, cfg, limits, stats)
    else:
        sched, value = _solve_ac(inst, cfg, limits, stats)
    stats.wall_time = time.perf_counter() - t0
    if sched is None:
        return SolveResult(Status.INFEASIBLE, None, None, None, stats, solver="oracle")
    sched = with_claims(inst, sched, cfg.flexible_only)
    bad = validate_schedule(inst, sched, cfg)
    if bad:
        raise AssertionError("oracle schedule rejected: " + "; ".join(map(str, bad[:5])))
    if evaluate_objective(inst, sched, cfg) != value:
        raise AssertionError("oracle objective bookkeeping disagrees with evaluate_objective")
    return SolveResult(Status.OPTIMAL, sched, value, value, stats, solver="oracle")
