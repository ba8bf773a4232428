"""Activity-on-node networks with AND/OR/OUT flexibility and their CP form.

A :class:`Network` is the plain precedence graph: activities, arcs, and for
every OR activity an explicit list of successor relations. Each relation is a
tuple of member ids whose first element is the direct successor (the head).
:func:`to_cp_network` rewrites the graph into the interval form used by the
solver, with alternative and span meta activities.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

Arc = Tuple[int, int]
Route = Tuple[int, ...]


class Kind(str, Enum):
    AND = "AND"
    OR = "OR"
    OUT = "OUT"
    SOURCE = "SOURCE"
    SINK = "SINK"
    META_ALT = "META_ALT"
    META_SPAN = "META_SPAN"


DUMMY_KINDS = frozenset({Kind.SOURCE, Kind.SINK, Kind.META_ALT, Kind.META_SPAN})
META_KINDS = frozenset({Kind.META_ALT, Kind.META_SPAN})


@dataclass(frozen=True)
class Activity:
    id: int
    kind: Kind
    min_duration: int = 0
    max_duration: int = 0
    demands: Mapping[int, int] = field(default_factory=dict)
    due_date: Optional[int] = None
    lot: Optional[int] = None
    label: str = ""

    @property
    def is_dummy(self) -> bool:
        return self.kind in DUMMY_KINDS

    @property
    def is_meta(self) -> bool:
        return self.kind in META_KINDS

    @property
    def is_flexible(self) -> bool:
        return self.max_duration > self.min_duration


@dataclass(frozen=True)
class Diagnostic:
    code: str
    ids: Tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.ids:
            return self.code
        return f"{self.code}: {', '.join(map(str, self.ids))}"


@dataclass(frozen=True)
class Network:
    activities: Dict[int, Activity]
    arcs: FrozenSet[Arc]
    relations: Dict[int, Tuple[Route, ...]] = field(default_factory=dict)

    @classmethod
    def build(cls, activities: Iterable[Activity], arcs: Iterable[Arc],
              relations: Optional[Mapping[int, Iterable[Iterable[int]]]] = None) -> "Network":
        acts = {a.id: a for a in sorted(activities, key=lambda a: a.id)}
        rels = {int(k): tuple(tuple(r) for r in v) for k, v in sorted((relations or {}).items())}
        return cls(acts, frozenset((int(i), int(j)) for i, j in arcs), rels)

    @cached_property
    def successors(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, List[int]] = defaultdict(list)
        for i, j in self.arcs:
            out[i].append(j)
        return {i: tuple(sorted(out.get(i, ()))) for i in self.activities}

    @cached_property
    def predecessors(self) -> Dict[int, Tuple[int, ...]]:
        inc: Dict[int, List[int]] = defaultdict(list)
        for i, j in self.arcs:
            inc[j].append(i)
        return {j: tuple(sorted(inc.get(j, ()))) for j in self.activities}

    def _ids_of(self, kind: Kind) -> List[int]:
        return [a.id for a in self.activities.values() if a.kind == kind]

    @property
    def source_id(self) -> int:
        return self._ids_of(Kind.SOURCE)[0]

    @property
    def sink_id(self) -> int:
        return self._ids_of(Kind.SINK)[0]

    @cached_property
    def delivery_set(self) -> FrozenSet[int]:
        return frozenset(self._ids_of(Kind.OUT))

    @cached_property
    def lots(self) -> Tuple[int, ...]:
        return tuple(sorted({a.lot for a in self.activities.values() if a.lot is not None}))

    @property
    def lot_count(self) -> int:
        return len(self.lots)

    def lot_members(self, lot: int) -> Tuple[int, ...]:
        return tuple(a.id for a in self.activities.values() if a.lot == lot)

    def delivery_of(self, lot: int) -> Optional[int]:
        outs = [j for j in self.lot_members(lot) if self.activities[j].kind == Kind.OUT]
        return outs[0] if outs else None

    def real_activities(self) -> List[Activity]:
        return [a for a in self.activities.values() if not a.is_dummy]

    @cached_property
    def topological_order(self) -> Tuple[int, ...]:
        order = topological_sort(self.activities, self.arcs)
        if order is None:
            raise ValueError("network contains a cycle")
        return tuple(order)

    def reachable_from(self, start: int) -> Set[int]:
        seen = {start}
        stack = [start]
        while stack:
            for j in self.successors.get(stack.pop(), ()):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen


def topological_sort(nodes: Iterable[int], arcs: Iterable[Arc]) -> Optional[List[int]]:
    """Kahn's algorithm, smallest id first among ready nodes; None on a cycle."""
    nodes = list(nodes)
    indeg = {n: 0 for n in nodes}
    succ: Dict[int, List[int]] = defaultdict(list)
    for i, j in arcs:
        if i in indeg and j in indeg:
            succ[i].append(j)
            indeg[j] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for j in succ[n]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    return order if len(order) == len(indeg) else None


def _cycle_members(net: Network) -> List[int]:
    order = topological_sort(net.activities, net.arcs) or []
    return sorted(set(net.activities) - set(order))


@dataclass(frozen=True)
class RelationShape:
    """Derived branch structure of one OR activity."""

    members: Tuple[FrozenSet[int], ...]
    exits: Tuple[FrozenSet[int], ...]


def relation_shape(net: Network, or_id: int) -> RelationShape:
    heads = net.successors[or_id]
    reach = {h: net.reachable_from(h) for h in heads}
    members = []
    exits = []
    for h in heads:
        others = set().union(*(reach[g] for g in heads if g != h)) if len(heads) > 1 else set()
        own = frozenset(reach[h] - others) if len(heads) > 1 else frozenset({h})
        members.append(own)
        exits.append(frozenset(j for u in own for j in net.successors[u] if j not in own))
    return RelationShape(tuple(members), tuple(exits))


def validate_network(net: Network) -> List[Diagnostic]:
    """Check every structural invariant; an empty list means the network is usable."""
    diags: List[Diagnostic] = []
    acts = net.activities

    bad_arcs = sorted({n for arc in net.arcs for n in arc if n not in acts})
    if bad_arcs:
        return [Diagnostic("unknown-activity", tuple(bad_arcs))]

    sources = [a.id for a in acts.values() if a.kind == Kind.SOURCE]
    sinks = [a.id for a in acts.values() if a.kind == Kind.SINK]
    if len(sources) != 1:
        diags.append(Diagnostic("source-count", tuple(sources)))
    if len(sinks) != 1:
        diags.append(Diagnostic("sink-count", tuple(sinks)))

    for a in acts.values():
        if a.is_meta:
            diags.append(Diagnostic("meta-in-network", (a.id,)))
        if a.min_duration < 0 or a.max_duration < a.min_duration:
            diags.append(Diagnostic("duration-bounds", (a.id,)))
        if any(q < 0 for q in a.demands.values()):
            diags.append(Diagnostic("negative-demand", (a.id,)))
        if a.kind in (Kind.SOURCE, Kind.SINK):
            if a.min_duration or a.max_duration or any(a.demands.values()):
                diags.append(Diagnostic("dummy-nonzero", (a.id,)))
            if a.lot is not None:
                diags.append(Diagnostic("lot-on-dummy", (a.id,)))
        elif a.lot is None:
            diags.append(Diagnostic("lot-missing", (a.id,)))
        if (a.kind == Kind.OUT) != (a.due_date is not None):
            diags.append(Diagnostic("out-due-mismatch", (a.id,)))
        if a.kind == Kind.OUT and not net.predecessors[a.id]:
            diags.append(Diagnostic("out-no-pred", (a.id,)))

    cyc = _cycle_members(net)
    if cyc:
        diags.append(Diagnostic("cycle", tuple(cyc)))
    if len(sources) != 1 or len(sinks) != 1 or cyc:
        return diags

    reach = net.reachable_from(sources[0])
    for j in sorted(set(acts) - reach):
        diags.append(Diagnostic("unreachable", (j,)))
    sink = sinks[0]
    for j in sorted(acts):
        if j != sink and sink not in net.reachable_from(j):
            diags.append(Diagnostic("dead-end", (j,)))

    for i, rels in net.relations.items():
        if i not in acts or acts[i].kind != Kind.OR:
            diags.append(Diagnostic("relation-on-non-or", (i,)))
    for a in acts.values():
        if a.kind == Kind.OR:
            diags.extend(_check_relations(net, a.id))
    return diags


def _check_relations(net: Network, i: int) -> List[Diagnostic]:
    rels = net.relations.get(i)
    if not rels:
        return [Diagnostic("relation-missing", (i,))]
    if any(len(r) == 0 for r in rels):
        return [Diagnostic("relation-empty", (i,))]
    heads = tuple(sorted(r[0] for r in rels))
    if heads != net.successors[i] or len(set(heads)) != len(rels):
        return [Diagnostic("relation-heads", (i,))]
    if len(rels) == 1:
        return []
    shape = relation_shape(net, i)
    out = []
    for r in rels:
        derived = next((m for m in shape.members if r[0] in m), frozenset())
        if frozenset(r) != derived:
            out.append(Diagnostic("relation-members", (i, r[0])))
        for u in r[1:]:
            if any(p not in derived for p in net.predecessors[u]):
                out.append(Diagnostic("relation-entry", (i, u)))
        if any(p != i for p in net.predecessors[r[0]]):
            out.append(Diagnostic("relation-entry", (i, r[0])))
    if len(set(shape.exits)) != 1:
        out.append(Diagnostic("relation-exits", (i,)))
    return out


def validate_actf_shape(net: Network) -> List[Diagnostic]:
    """Extra checks for the time-flexible class, where lots are chains with OR choices."""
    diags = []
    for a in net.activities.values():
        if a.lot is None:
            continue
        in_lot = [j for j in net.successors[a.id] if net.activities[j].lot == a.lot]
        if a.kind == Kind.AND and len(in_lot) > 1:
            diags.append(Diagnostic("actf-branching", (a.id,)))
        if a.kind == Kind.OUT and any(net.activities[j].kind != Kind.SINK for j in net.successors[a.id]):
            diags.append(Diagnostic("actf-out-successor", (a.id,)))
    for lot in net.lots:
        outs = [j for j in net.lot_members(lot) if net.activities[j].kind == Kind.OUT]
        if len(outs) != 1:
            diags.append(Diagnostic("actf-delivery-count", (lot,)))
    return diags


@dataclass(frozen=True)
class CpNetwork:
    network: Network
    activities: Dict[int, Activity]
    cp_adjacency: FrozenSet[Arc]
    alt_starts: Dict[int, Tuple[int, ...]]
    alt_ends: Dict[int, FrozenSet[int]]
    span_sets: Dict[int, FrozenSet[int]]
    meta_set: FrozenSet[int]
    alt_owner: Dict[int, int]
    span_head: Dict[int, int]
    span_terminals: Dict[int, FrozenSet[int]]
    # (meta, end) pairs where the end node is present exactly when the meta is
    alt_end_iff: FrozenSet[Arc]

    @property
    def source_id(self) -> int:
        return self.network.source_id

    @property
    def sink_id(self) -> int:
        return self.network.sink_id

    @cached_property
    def cp_successors(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, List[int]] = defaultdict(list)
        for i, j in self.cp_adjacency:
            out[i].append(j)
        return {i: tuple(sorted(out.get(i, ()))) for i in self.activities}

    def strip(self) -> Network:
        """Non-meta projection: the network this one was built from."""
        return self.network


def to_cp_network(net: Network) -> CpNetwork:
    for i, rels in net.relations.items():
        if any(len(r) == 0 for r in rels):
            raise ValueError(f"OR activity {i} has an empty successor relation")
    diags = validate_network(net)
    if diags:
        raise ValueError("invalid network: " + "; ".join(map(str, diags)))

    real_ids = sorted(net.activities)
    used = set(real_ids)
    next_id = max(j for j in real_ids if j != net.sink_id) + 1

    def fresh() -> int:
        nonlocal next_id
        while next_id in used:
            next_id += 1
        used.add(next_id)
        return next_id

    or_nodes = sorted(i for i, rels in net.relations.items() if len(rels) >= 2)
    alt_of = {i: fresh() for i in or_nodes}
    span_of: Dict[Tuple[int, int], int] = {}
    for i in or_nodes:
        for k, rel in enumerate(net.relations[i]):
            if len(rel) >= 2:
                span_of[(i, k)] = fresh()

    adjacency = set(net.arcs)
    alt_starts: Dict[int, Tuple[int, ...]] = {}
    alt_ends: Dict[int, FrozenSet[int]] = {}
    span_sets: Dict[int, FrozenSet[int]] = {}
    span_head: Dict[int, int] = {}
    span_terminals: Dict[int, FrozenSet[int]] = {}
    alt_end_iff: Set[Arc] = set()
    metas: Dict[int, Activity] = {}

    # topological order keeps nested OR nodes after the ones enclosing them
    topo_rank = {n: k for k, n in enumerate(net.topological_order)}
    for i in sorted(or_nodes, key=topo_rank.__getitem__):
        m = alt_of[i]
        rels = net.relations[i]
        members = set().union(*map(set, rels))
        starts = []
        for k, rel in enumerate(rels):
            adjacency.discard((i, rel[0]))
            if (i, k) in span_of:
                s = span_of[(i, k)]
                span_sets[s] = frozenset(rel)
                span_head[s] = rel[0]
                span_terminals[s] = frozenset(
                    u for u in rel if not any(v in rel for v in net.successors[u]))
                metas[s] = Activity(s, Kind.META_SPAN)
                starts.append(s)
            else:
                starts.append(rel[0])
        exit_arcs = {(u, e) for u in members for e in net.successors[u] if e not in members}
        adjacency -= exit_arcs
        ends = frozenset(e for _, e in exit_arcs)
        for e in ends:
            if all(p in members for p in net.predecessors[e]):
                alt_end_iff.add((m, e))
        adjacency.add((i, m))
        alt_starts[m] = tuple(starts)
        alt_ends[m] = ends
        metas[m] = Activity(m, Kind.META_ALT)

    activities = dict(net.activities)
    activities.update(metas)
    return CpNetwork(
        network=net,
        activities=dict(sorted(activities.items())),
        cp_adjacency=frozenset(adjacency),
        alt_starts=dict(sorted(alt_starts.items())),
        alt_ends=dict(sorted(alt_ends.items())),
        span_sets=dict(sorted(span_sets.items())),
        meta_set=frozenset(metas),
        alt_owner={alt_of[i]: i for i in or_nodes},
        span_head=dict(sorted(span_head.items())),
        span_terminals=dict(sorted(span_terminals.items())),
        alt_end_iff=frozenset(alt_end_iff),
    )


def _expand(entries: Iterable[int], options, in_scope) -> Set[FrozenSet[int]]:
    """Depth-first expansion of AND/OR choices into complete selections."""
    results: Set[FrozenSet[int]] = set()
    stack = [(frozenset(), tuple(sorted(entries)))]
    while stack:
        selected, pending = stack.pop()
        if not pending:
            results.add(selected)
            continue
        node, rest = pending[0], pending[1:]
        if node in selected:
            stack.append((selected, rest))
            continue
        selected = selected | {node}
        for nxt in options(node):
            add = tuple(n for n in nxt if in_scope(n) and n not in selected)
            stack.append((selected, rest + add))
    return results


def _order(nodes: Iterable[int], order_rank: Mapping[int, int]) -> Route:
    return tuple(sorted(nodes, key=lambda n: (order_rank[n], n)))


def enumerate_routes(net, lot: int) -> List[Route]:
    """All complete selections of one lot, each in precedence order.

    Works on a :class:`Network` or a :class:`CpNetwork`; for the latter the
    meta activities stay in the returned routes.
    """
    base = net.network if isinstance(net, CpNetwork) else net
    if lot not in base.lots:
        raise KeyError(f"unknown lot {lot}")
    acts = net.activities
    lot_nodes = set(base.lot_members(lot))
    entries = [j for j in lot_nodes if any(p not in lot_nodes for p in base.predecessors[j])]

    if isinstance(net, CpNetwork):
        def options(n: int):
            if n in net.alt_starts:
                return [[a, *sorted(net.alt_ends[n])] for a in net.alt_starts[n]]
            if n in net.span_head:
                return [[net.span_head[n]]]
            return [list(net.cp_successors[n])]

        def in_scope(n: int) -> bool:
            return n in lot_nodes or acts[n].is_meta
        arcs = set(net.cp_adjacency)
        arcs |= {(m, e) for m, ends in net.alt_ends.items() for e in ends}
        arcs |= {(m, a) for m, starts in net.alt_starts.items() for a in starts}
        arcs |= {(s, h) for s, h in net.span_head.items()}
    else:
        def options(n: int):
            if acts[n].kind == Kind.OR and n in base.relations:
                return [[r[0]] for r in base.relations[n]]
            return [list(base.successors[n])]

        def in_scope(n: int) -> bool:
            return n in lot_nodes
        arcs = set(base.arcs)

    selections = _expand(entries, options, in_scope)
    rank = _rank(net, arcs)
    delivery = base.delivery_of(lot)
    routes = []
    for sel in selections:
        if delivery is not None and delivery not in sel:
            raise ValueError(f"lot {lot} has a route that never reaches delivery {delivery}")
        routes.append(_order(sel, rank))
    return sorted(routes)


def _rank(net, arcs) -> Dict[int, int]:
    """Topological position of every node, computed once per network object."""
    cache = net.__dict__
    if "_route_rank" not in cache:
        acts = net.activities
        cache["_route_rank"] = {n: k for k, n in enumerate(topological_sort(acts, arcs) or sorted(acts))}
    return cache["_route_rank"]


def route_sets(routes: Iterable[Route], strip: Iterable[int] = ()) -> List[FrozenSet[int]]:
    drop = set(strip)
    return sorted((frozenset(r) - drop for r in routes), key=sorted)
