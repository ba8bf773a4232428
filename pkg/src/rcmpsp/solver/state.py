"""Interval domains over the CP network and their propagation.

Every activity of the CP network (meta activities included) owns a presence
flag (-1 undecided, 0 absent, 1 present) and bounds on start, end and length.
Constraints are precedence arcs, alternatives, spans, per-resource timetables
and non-renewable budgets. :meth:`SearchState.propagate` runs them to a
fixpoint; domains of undecided activities that run empty make the activity
absent, those of present activities make the state fail.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..instance import Instance
from ..network import Kind, to_cp_network
from .config import Objective, SolverConfig
from .schedule import Schedule, Slot

UNDECIDED, ABSENT, PRESENT = -1, 0, 1
ARC, ALT, SPAN = 0, 1, 2


class Inconsistent(Exception):
    pass


@dataclass(frozen=True)
class Cut:
    """Strict improvement requirement derived from the incumbent objective value."""

    objective: Objective
    value: Fraction


class Model:
    """Static data compiled from an instance and a configuration."""

    def __init__(self, inst: Instance, cfg: SolverConfig):
        cfg = cfg.resolved(inst)
        self.inst = inst
        self.cfg = cfg
        cp = to_cp_network(inst.network)
        self.cp = cp
        self.ids: List[int] = sorted(cp.activities)
        self.index: Dict[int, int] = {j: k for k, j in enumerate(self.ids)}
        idx = self.index
        n = self.n = len(self.ids)
        T = self.T = inst.horizon
        actf = inst.problem_class.time_flexible
        acts = cp.activities

        self.is_meta = [acts[j].is_meta for j in self.ids]
        self.a = [0 if self.is_meta[k] else acts[j].min_duration for k, j in enumerate(self.ids)]
        self.b = [T if self.is_meta[k] else acts[j].max_duration for k, j in enumerate(self.ids)]
        self.flexible = [not self.is_meta[k] and self.b[k] > self.a[k] for k in range(n)]
        self.real = [k for k in range(n) if not self.is_meta[k]]
        # lots ranked by due date; activities outside lots (source, sink) come last
        net = inst.network
        lot_due = {l: (acts[net.delivery_of(l)].due_date or 0, l) for l in net.lots if net.delivery_of(l) is not None}
        ranked = sorted(lot_due, key=lot_due.get)
        rank_of = {l: r for r, l in enumerate(ranked)}
        self.lot_rank = [rank_of.get(acts[j].lot, len(ranked)) if not self.is_meta[k] else len(ranked)
                         for k, j in enumerate(self.ids)]
        self.metas = [k for k in range(n) if self.is_meta[k]]
        self.source = idx[cp.source_id]
        self.sink = idx[cp.sink_id]

        caps = inst.capacities
        self.ren = list(inst.renewable_ids)
        self.caps = [caps[r] for r in self.ren]
        ridx = {r: k for k, r in enumerate(self.ren)}
        self.balanced = [ridx[r] for r in inst.balanced_ids]
        self.users: List[List[Tuple[int, int]]] = [[] for _ in self.ren]
        self.nonren = list(inst.nonrenewable_ids) if not actf else []
        self.nr_caps = [caps[r] for r in self.nonren]
        self.nr_users: List[List[Tuple[int, int]]] = [[] for _ in self.nonren]
        nidx = {r: k for k, r in enumerate(self.nonren)}
        for k, j in enumerate(self.ids):
            for r, q in acts[j].demands.items():
                if q <= 0:
                    continue
                if r in ridx:
                    self.users[ridx[r]].append((k, q))
                elif r in nidx:
                    self.nr_users[nidx[r]].append((k, q))

        self.deliveries = [idx[j] for j in sorted(inst.network.delivery_set)] if actf else []
        self.windows = {}
        for k in self.deliveries:
            self.windows[k] = cfg.scenario.window(acts[self.ids[k]].due_date, T)

        cons: List[tuple] = []
        src_id, sink_id = cp.source_id, cp.sink_id
        for i, j in sorted(cp.cp_adjacency):
            tight = actf and i != src_id and j != sink_id
            cons.append((ARC, idx[i], idx[j], tight, True, True))
        for mv, ends in cp.alt_ends.items():
            for e in sorted(ends):
                tight = actf and e != sink_id
                cons.append((ARC, idx[mv], idx[e], tight, True, (mv, e) in cp.alt_end_iff))
        for mv, starts in cp.alt_starts.items():
            cons.append((ALT, idx[mv], tuple(idx[a] for a in starts)))
        for sv, members in cp.span_sets.items():
            cons.append((SPAN, idx[sv], idx[cp.span_head[sv]],
                         tuple(idx[t] for t in sorted(cp.span_terminals[sv]))))
        self.cons = cons
        watch: List[List[int]] = [[] for _ in range(n)]
        for c, con in enumerate(cons):
            if con[0] == ARC:
                vs = (con[1], con[2])
            elif con[0] == ALT:
                vs = (con[1], *con[2])
            else:
                vs = (con[1], con[2], *con[3])
            for v in vs:
                watch[v].append(c)
        self.watch = watch
        self.alts = [(con[1], con[2]) for con in cons if con[0] == ALT]

    def root(self) -> "SearchState":
        n, T = self.n, self.T
        st = SearchState(self, [UNDECIDED] * n, [0] * n, [T] * n, [0] * n, [T] * n,
                         list(self.a), list(self.b))
        for k in (self.source, self.sink, *self.deliveries):
            st.pres[k] = PRESENT
        st.smax[self.source] = 0
        for k, (lo, hi) in self.windows.items():
            st.emin[k] = max(st.emin[k], lo)
            st.emax[k] = min(st.emax[k], hi)
        return st


class SearchState:
    __slots__ = ("model", "pres", "smin", "smax", "emin", "emax", "lmin", "lmax", "_ch")

    def __init__(self, model, pres, smin, smax, emin, emax, lmin, lmax):
        self.model = model
        self.pres = pres
        self.smin, self.smax = smin, smax
        self.emin, self.emax = emin, emax
        self.lmin, self.lmax = lmin, lmax
        self._ch = set()

    def copy(self) -> "SearchState":
        return SearchState(self.model, self.pres[:], self.smin[:], self.smax[:], self.emin[:],
                           self.emax[:], self.lmin[:], self.lmax[:])

    def snapshot(self) -> tuple:
        return (tuple(self.pres), tuple(self.smin), tuple(self.smax), tuple(self.emin),
                tuple(self.emax), tuple(self.lmin), tuple(self.lmax))

    # ------------------------------------------------------------ updates

    def set_presence(self, v: int, p: int) -> None:
        cur = self.pres[v]
        if cur == p:
            return
        if cur != UNDECIDED:
            raise Inconsistent
        self.pres[v] = p
        self._ch.add(v)

    def lb_s(self, v, x):
        if x > self.smin[v]:
            self.smin[v] = x
            self._ch.add(v)

    def ub_s(self, v, x):
        if x < self.smax[v]:
            self.smax[v] = x
            self._ch.add(v)

    def lb_e(self, v, x):
        if x > self.emin[v]:
            self.emin[v] = x
            self._ch.add(v)

    def ub_e(self, v, x):
        if x < self.emax[v]:
            self.emax[v] = x
            self._ch.add(v)

    def lb_l(self, v, x):
        if x > self.lmin[v]:
            self.lmin[v] = x
            self._ch.add(v)

    def ub_l(self, v, x):
        if x < self.lmax[v]:
            self.lmax[v] = x
            self._ch.add(v)

    def _normalize(self, v: int) -> None:
        if self.pres[v] == ABSENT:
            return
        s0, s1, e0, e1 = self.smin[v], self.smax[v], self.emin[v], self.emax[v]
        l0, l1 = self.lmin[v], self.lmax[v]
        while True:
            old = (s0, s1, e0, e1, l0, l1)
            s0 = max(s0, e0 - l1)
            s1 = min(s1, e1 - l0)
            e0 = max(e0, s0 + l0)
            e1 = min(e1, s1 + l1)
            l0 = max(l0, e0 - s1)
            l1 = min(l1, e1 - s0)
            if s0 > s1 or e0 > e1 or l0 > l1:
                if self.pres[v] == PRESENT:
                    raise Inconsistent
                self.pres[v] = ABSENT
                self._ch.add(v)
                return
            if (s0, s1, e0, e1, l0, l1) == old:
                break
        self.smin[v], self.smax[v], self.emin[v], self.emax[v] = s0, s1, e0, e1
        self.lmin[v], self.lmax[v] = l0, l1

    def _flush(self) -> set:
        changed = self._ch
        self._ch = set()
        for v in changed:
            self._normalize(v)
        # normalization may only add absences of already-changed variables
        if self._ch:
            changed |= self._ch
            self._ch = set()
        return changed

    # ------------------------------------------------------------ constraints

    def _arc(self, i, j, tight, ij, ji):
        pres = self.pres
        if ij:
            if pres[i] == PRESENT:
                self.set_presence(j, PRESENT)
            if pres[j] == ABSENT:
                self.set_presence(i, ABSENT)
        if ji:
            if pres[j] == PRESENT:
                self.set_presence(i, PRESENT)
            if pres[i] == ABSENT:
                self.set_presence(j, ABSENT)
        pi, pj = pres[i], pres[j]
        if pi == ABSENT or pj == ABSENT:
            return
        if ji or pi == PRESENT:
            self.lb_s(j, self.emin[i])
            if tight:
                self.ub_s(j, self.emax[i])
        if ij or pj == PRESENT:
            self.ub_e(i, self.smax[j])
            if tight:
                self.lb_e(i, self.smin[j])

    def _alt(self, mv, cands):
        pres = self.pres
        chosen = [a for a in cands if pres[a] == PRESENT]
        if len(chosen) > 1:
            raise Inconsistent
        if chosen:
            self.set_presence(mv, PRESENT)
            for a in cands:
                if a != chosen[0]:
                    self.set_presence(a, ABSENT)
        if pres[mv] == ABSENT:
            for a in cands:
                self.set_presence(a, ABSENT)
            return
        live = [a for a in cands if pres[a] != ABSENT]
        if not live:
            self.set_presence(mv, ABSENT)
            return
        if pres[mv] == PRESENT and len(live) == 1:
            self.set_presence(live[0], PRESENT)
        smin, smax, emin, emax = self.smin, self.smax, self.emin, self.emax
        self.lb_s(mv, min(smin[a] for a in live))
        self.ub_s(mv, max(smax[a] for a in live))
        self.lb_e(mv, min(emin[a] for a in live))
        self.ub_e(mv, max(emax[a] for a in live))
        for a in live:
            self.lb_s(a, smin[mv])
            self.ub_s(a, smax[mv])
            self.lb_e(a, emin[mv])
            self.ub_e(a, emax[mv])

    def _span(self, sv, head, terms):
        pres = self.pres
        if pres[sv] != UNDECIDED:
            self.set_presence(head, pres[sv])
        if pres[head] != UNDECIDED:
            self.set_presence(sv, pres[head])
        if pres[sv] == ABSENT:
            return
        self.lb_s(sv, self.smin[head])
        self.ub_s(sv, self.smax[head])
        self.lb_s(head, self.smin[sv])
        self.ub_s(head, self.smax[sv])
        live = [t for t in terms if pres[t] != ABSENT]
        if not live:
            self.set_presence(sv, ABSENT)
            return
        emin, emax = self.emin, self.emax
        self.ub_e(sv, max(emax[t] for t in live))
        done = [emin[t] for t in live if pres[t] == PRESENT]
        if done:
            self.lb_e(sv, max(done))
        for t in live:
            self.ub_e(t, emax[sv])
        if pres[sv] == PRESENT and len(live) == 1:
            self.set_presence(live[0], PRESENT)
            self.lb_e(live[0], emin[sv])

    def _timetable(self, caps: Sequence[int]) -> None:
        m = self.model
        pres, smin, smax, emin, emax, lmin = self.pres, self.smin, self.smax, self.emin, self.emax, self.lmin
        size = m.T + 1
        for ri, users in enumerate(m.users):
            if not users:
                continue
            cap = caps[ri]
            prof = np.zeros(size, dtype=np.int64)
            for v, q in users:
                if pres[v] == PRESENT and smax[v] < emin[v]:
                    prof[smax[v]:emin[v]] += q
            if users and int(prof.max()) > cap:
                raise Inconsistent
            for v, q in users:
                if pres[v] == ABSENT or (pres[v] == PRESENT and smin[v] == smax[v] and emin[v] == emax[v]):
                    continue  # fixed intervals are already part of the profile
                length = lmin[v]
                if length == 0:
                    continue
                if q > cap:
                    self.set_presence(v, ABSENT)
                    continue
                lo, last_start = smin[v], emax[v] - length
                if last_start < lo:
                    continue  # interval consistency will handle it
                seg = prof[lo:last_start + length]
                if pres[v] == PRESENT and smax[v] < emin[v]:
                    seg = seg.copy()
                    seg[smax[v] - lo:emin[v] - lo] -= q
                bad = seg > cap - q
                if not bad.any():
                    continue
                cs = np.concatenate(([0], np.cumsum(bad)))
                ok = np.flatnonzero(cs[length:] == cs[:-length])
                if len(ok) == 0 or lo + int(ok[0]) > smax[v]:
                    self.set_presence(v, ABSENT)
                    continue
                self.lb_s(v, lo + int(ok[0]))
                self.ub_e(v, lo + int(ok[-1]) + length)

    def _budgets(self) -> None:
        m = self.model
        for ri, users in enumerate(m.nr_users):
            cap = m.nr_caps[ri]
            used = sum(q for v, q in users if self.pres[v] == PRESENT)
            if used > cap:
                raise Inconsistent
            for v, q in users:
                if self.pres[v] == UNDECIDED and used + q > cap:
                    self.set_presence(v, ABSENT)

    def _apply_cut(self, cut: Optional[Cut]) -> List[int]:
        m = self.model
        caps = list(m.caps)
        if cut is None:
            return caps
        if cut.objective == Objective.MAKESPAN:
            self.ub_e(m.sink, math.ceil(cut.value) - 1)
        elif cut.objective == Objective.TIME_BALANCE:
            if not m.cfg.flexible_only:
                limit = math.ceil(cut.value) - 1
                for v in m.real:
                    if self.pres[v] != ABSENT:
                        self.ub_l(v, m.a[v] + limit)
        else:
            for ri in m.balanced:
                caps[ri] = min(caps[ri], math.ceil(cut.value * m.caps[ri]) - 1)
                if caps[ri] < 0:
                    raise Inconsistent
        return caps

    # ------------------------------------------------------------ fixpoint

    def propagate(self, touched: Optional[Sequence[int]] = None, cut: Optional[Cut] = None) -> bool:
        """Run all constraints to a fixpoint; False if the state has no solution."""
        try:
            self._propagate(touched, cut)
            return True
        except Inconsistent:
            return False

    def _propagate(self, touched, cut) -> None:
        m = self.model
        cons, watch = m.cons, m.watch
        queue = deque()
        inq = bytearray(len(cons))

        def push(vs):
            for v in vs:
                for c in watch[v]:
                    if not inq[c]:
                        inq[c] = 1
                        queue.append(c)

        caps = self._apply_cut(cut)
        if touched is None:
            self._ch.update(range(m.n))
        else:
            self._ch.update(touched)
        push(self._flush())
        if touched is None:
            for c in range(len(cons)):
                if not inq[c]:
                    inq[c] = 1
                    queue.append(c)
        while True:
            while queue:
                c = queue.popleft()
                inq[c] = 0
                con = cons[c]
                if con[0] == ARC:
                    self._arc(con[1], con[2], con[3], con[4], con[5])
                elif con[0] == ALT:
                    self._alt(con[1], con[2])
                else:
                    self._span(con[1], con[2], con[3])
                push(self._flush())
            self._timetable(caps)
            self._budgets()
            changed = self._flush()
            if not changed:
                break
            push(changed)

    # ------------------------------------------------------------ queries

    def undecided(self) -> List[int]:
        return [v for v, p in enumerate(self.pres) if p == UNDECIDED]

    def is_fixed(self) -> bool:
        for v, p in enumerate(self.pres):
            if p == UNDECIDED:
                return False
            if p == PRESENT and (self.smin[v] != self.smax[v] or self.lmin[v] != self.lmax[v]):
                return False
        return True

    def to_schedule(self) -> Schedule:
        m = self.model
        slots = {}
        for v, j in enumerate(m.ids):
            if self.pres[v] == PRESENT:
                slots[j] = Slot(True, self.smin[v], self.emin[v])
            else:
                slots[j] = Slot(False)
        return Schedule(slots)


def propagate(state: SearchState, cut: Optional[Cut] = None) -> bool:
    return state.propagate(None, cut)
