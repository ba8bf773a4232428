"""Benchmark instances: data model, deterministic generators and a JSON file format.

Instance files are JSON with sorted keys and a mandatory ``format`` tag::

    {
      "format": "rcmpsp-instance/1",
      "meta": {"name", "problem_class", "pattern", "resource_strength", "seed", "horizon"},
      "resources": [{"id", "capacity", "balanced", "renewable"}],
      "activities": [{"id", "kind", "a", "b", "demands", "due", "lot", "label"}],
      "arcs": [[i, j], ...],
      "relations": {"<or id>": [[head, member, ...], ...]}
    }

``resource_strength`` is written as a fraction string such as ``"1/4"`` so
that files are exact and byte-stable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .network import Activity, Kind, Network, enumerate_routes, validate_network

FORMAT_TAG = "rcmpsp-instance/1"


class ProblemClass(str, Enum):
    RCPSP_AC = "RCPSP_AC"
    RCMPSP_AC = "RCMPSP_AC"
    RCMPSP_ACTF = "RCMPSP_ACTF"

    @property
    def time_flexible(self) -> bool:
        return self is ProblemClass.RCMPSP_ACTF


@dataclass(frozen=True)
class Resource:
    id: int
    capacity: int
    balanced: bool = False
    renewable: bool = True


@dataclass(frozen=True)
class Instance:
    network: Network
    resources: Tuple[Resource, ...]
    horizon: int
    problem_class: ProblemClass = ProblemClass.RCMPSP_ACTF
    pattern: Optional[str] = None
    resource_strength: Optional[Fraction] = None
    seed: Optional[int] = None
    name: str = ""

    @property
    def capacities(self) -> Dict[int, int]:
        return {r.id: r.capacity for r in self.resources}

    @property
    def balanced_ids(self) -> Tuple[int, ...]:
        return tuple(r.id for r in self.resources if r.balanced)

    @property
    def renewable_ids(self) -> Tuple[int, ...]:
        return tuple(r.id for r in self.resources if r.renewable)

    @property
    def nonrenewable_ids(self) -> Tuple[int, ...]:
        return tuple(r.id for r in self.resources if not r.renewable)

    def check(self) -> List[str]:
        """Network diagnostics plus instance-level invariants, as strings."""
        problems = [str(d) for d in validate_network(self.network)]
        ids = {r.id for r in self.resources}
        if len(ids) != len(self.resources):
            problems.append("duplicate resource id")
        for r in self.resources:
            if r.capacity < 1:
                problems.append(f"capacity: {r.id}")
            if r.balanced and not r.renewable:
                problems.append(f"balanced non-renewable: {r.id}")
        for a in self.network.activities.values():
            missing = sorted(set(a.demands) - ids)
            if missing:
                problems.append(f"unknown resource: {a.id} -> {missing}")
            if a.due_date is not None and a.due_date > self.horizon:
                problems.append(f"due date beyond horizon: {a.id}")
        if self.horizon < 1:
            problems.append("horizon must be positive")
        return problems


Interval = Tuple[int, int]


@dataclass(frozen=True)
class GeneratorParams:
    lot_count: int = 10
    pattern: str = "rw"
    resource_strength: Fraction = Fraction(1, 4)
    seed: int = 0
    slack_range: Interval = (10, 20)  # inclusive
    min_duration_range: Interval = (1, 5)  # half-open
    demand_range: Interval = (1, 10)  # half-open
    templates: str = "standard"
    max_routes: int = 3
    releases: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "resource_strength", Fraction(self.resource_strength))
        if self.pattern not in ("rw", "rand"):
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if not 0 <= self.resource_strength <= 1:
            raise ValueError("resource strength must lie in [0, 1]")
        if self.lot_count < 1:
            raise ValueError("need at least one lot")
        lo, hi = self.min_duration_range
        if not 0 <= lo < hi:
            raise ValueError("bad min_duration_range")
        if not 0 <= self.slack_range[0] <= self.slack_range[1]:
            raise ValueError("bad slack_range")
        if not 1 <= self.demand_range[0] < self.demand_range[1]:
            raise ValueError("bad demand_range")
        if self.templates not in ROUTE_TEMPLATES:
            raise ValueError(f"unknown template pool {self.templates!r}")
        if not 1 <= self.max_routes <= len(ROUTE_TEMPLATES[self.templates]):
            raise ValueError("bad max_routes")
        if self.releases is not None and len(self.releases) != self.lot_count:
            raise ValueError("one release per lot")


class Rng:
    """Seedable 64-bit stream: PCG64 raw words with rejection sampling.

    Only ``random_raw`` of the bit generator is used, so streams do not
    depend on numpy's higher-level sampling algorithms.
    """

    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def raw(self) -> int:
        return int(self._bits.random_raw())

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        n = hi - lo + 1
        if n == 1:
            return lo
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.raw()
            if x < limit:
                return lo + x % n

    def choice(self, seq: Sequence):
        return seq[self.integer(0, len(seq) - 1)]

    def sample(self, seq: Sequence, k: int) -> list:
        pool = list(seq)
        out = []
        for _ in range(k):
            out.append(pool.pop(self.integer(0, len(pool) - 1)))
        return out


# activity types of the production palette
PRODUCTION, COOLING, PROCESSING, RELOCATION, STORAGE, VEHICLE, DELIVERY = range(7)
TYPE_NAMES = ("production", "cooling", "processing", "relocation", "storage",
              "vehicle relocation", "delivery")
FIXED_TYPES = frozenset({PRODUCTION, RELOCATION})

# intermediate activity types between production and delivery
ROUTE_TEMPLATES: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "standard": (
        (1, 2, 3, 4, 5),
        (1, 3, 2, 3, 4, 5),
        (1, 2, 3, 4, 3, 4, 5),
        (3, 1, 2, 3, 4, 5, 3),
        (1, 3, 4, 3, 2, 3, 4, 5),
        (1, 2, 3, 4, 3, 4, 5, 3, 5),
    ),
    "mini": ((4,), (1,), (5,), (2, 4), (1, 4), (3, 4)),
    "case": (
        (1, 3, 4, 5),
        (1, 4, 5),
        (2, 3, 4, 5),
        (1, 2, 4, 5),
        (1, 3, 4, 3, 5),
        (3, 1, 4, 5),
    ),
}

# rw pattern: each type is served by one resource, two of the types by one of a pair
RW_RESOURCES: Dict[int, Tuple[int, ...]] = {
    PRODUCTION: (1,), COOLING: (2, 3), PROCESSING: (4,), RELOCATION: (7,),
    STORAGE: (5, 6), VEHICLE: (8,), DELIVERY: (9,),
}
ACTF_RESOURCES = tuple(range(1, 10))
ACTF_BALANCED = frozenset({5, 6})


def resource_factor(inst: Instance) -> Fraction:
    jobs = inst.network.real_activities()
    if not jobs:
        raise ValueError("instance has no non-dummy activity")
    res = [r.id for r in inst.resources]
    used = sum(1 for a in jobs for r in res if a.demands.get(r, 0) > 0)
    return Fraction(used, len(jobs) * len(res))


def earliest_completion(net: Network, lot: int) -> int:
    return min(sum(net.activities[j].min_duration for j in route)
               for route in enumerate_routes(net, lot))


def cheapest_route(net: Network, lot: int) -> Tuple[int, ...]:
    routes = enumerate_routes(net, lot)
    return min(routes, key=lambda r: (sum(net.activities[j].min_duration for j in r), r))


def generate_due_dates(params: Optional[GeneratorParams], completion: Mapping[int, int],
                       rng: Rng) -> Dict[int, int]:
    releases = dict(zip(sorted(completion), params.releases)) if params and params.releases else {}
    out = {}
    for lot in sorted(completion):
        t = completion[lot]
        if t < 0:
            raise ValueError("completion times must be non-negative")
        out[lot] = releases.get(lot, 0) + t + rng.integer(t, 2 * t)
    return out


def generate_max_durations(due: Mapping[int, int], completion: Mapping[int, int],
                           slack: Union[int, Mapping[int, int]], net: Network,
                           fixed: Iterable[int] = ()) -> Dict[int, int]:
    """Flexible activities of lot l get b = d_l - t_l + s; fixed ones keep b = a."""
    fixed = set(fixed)
    out = {}
    for a in net.real_activities():
        if a.id in fixed or a.lot is None:
            out[a.id] = a.min_duration
            continue
        s = slack if isinstance(slack, int) else slack[a.lot]
        if due[a.lot] < completion[a.lot]:
            raise ValueError(f"due date before earliest completion in lot {a.lot}")
        out[a.id] = max(a.min_duration, due[a.lot] - completion[a.lot] + s)
    return out


def parallel_lot_estimate(due: Mapping[int, int], releases: Optional[Mapping[int, int]] = None) -> Fraction:
    """Mean number of lots whose [release, due) intervals overlap, over the covered span."""
    releases = releases or {}
    spans = [(releases.get(l, 0), d) for l, d in due.items()]
    start = min(r for r, _ in spans)
    end = max(d for _, d in spans)
    if end <= start:
        return Fraction(1)
    busy = sum(max(0, d - r) for r, d in spans)
    return max(Fraction(1), Fraction(busy, end - start))


def earliest_start_peaks(net: Network, resources: Iterable[int]) -> Dict[int, int]:
    """Peak demand per resource when every lot runs its cheapest route from time 0 at minimum durations."""
    events: Dict[int, List[Tuple[int, int]]] = {r: [] for r in resources}
    for lot in net.lots:
        t = 0
        for j in cheapest_route(net, lot):
            act = net.activities[j]
            if act.min_duration > 0:
                for r, q in act.demands.items():
                    if q and r in events:
                        events[r].append((t, q))
                        events[r].append((t + act.min_duration, -q))
            t += act.min_duration
    peaks = {}
    for r, ev in events.items():
        level = peak = 0
        for _, q in sorted(ev, key=lambda e: (e[0], e[1])):
            level += q
            peak = max(peak, level)
        peaks[r] = peak
    return peaks


def compute_capacities(demands: Mapping[int, Mapping[int, int]], resource_strength,
                       l_par, pattern: str, balanced: Iterable[int],
                       peaks: Mapping[int, int]) -> Dict[int, int]:
    """Capacities from minimum demand, parallel-lot estimate and peak demand.

    ``demands`` maps activity id to its demand map, ``peaks`` maps resource id
    to the earliest-start peak.
    """
    rs = Fraction(resource_strength)
    l_par = Fraction(l_par)
    balanced = set(balanced)
    out = {}
    for r in sorted(peaks):
        c_min = max((d.get(r, 0) for d in demands.values()), default=0)
        if pattern == "rw" and r not in balanced:
            cap = 2 * c_min
        else:
            lower = math.ceil(c_min * l_par)
            upper = lower + peaks[r]
            cap = math.ceil(lower + rs * (upper - lower))
        if cap <= 0:
            raise ValueError(f"resource {r} gets capacity 0")
        out[r] = cap
    return out


@dataclass
class _LotDraft:
    production: Tuple[int, Dict[int, int]]
    routes: List[List[Tuple[int, int, Dict[int, int]]]]  # (type, a, demands)
    delivery: Tuple[int, Dict[int, int]]


def _draw_demands(rng: Rng, kind: int, params: GeneratorParams, resources=ACTF_RESOURCES,
                  rw_map=RW_RESOURCES) -> Dict[int, int]:
    if params.pattern == "rw":
        return {rng.choice(rw_map[kind]): 1}
    lo, hi = params.demand_range
    return {r: rng.integer(lo, hi - 1) for r in resources}


def _assemble(drafts: Sequence[_LotDraft], fixed_types=FIXED_TYPES):
    """Turn per-lot drafts into activities, arcs and relations (b = a for now)."""
    acts = [Activity(0, Kind.SOURCE)]
    arcs: List[Tuple[int, int]] = []
    relations: Dict[int, List[Tuple[int, ...]]] = {}
    fixed: List[int] = []
    nid = 1
    for lot, draft in enumerate(drafts, start=1):
        prod_id = nid
        nid += 1
        a, dem = draft.production
        multi = len(draft.routes) > 1
        acts.append(Activity(prod_id, Kind.OR if multi else Kind.AND, a, a, dem, lot=lot,
                             label=TYPE_NAMES[PRODUCTION]))
        fixed.append(prod_id)
        arcs.append((0, prod_id))
        route_ids = []
        for route in draft.routes:
            ids = []
            for kind, a, dem in route:
                acts.append(Activity(nid, Kind.AND, a, a, dem, lot=lot, label=TYPE_NAMES[kind]))
                if kind in fixed_types:
                    fixed.append(nid)
                ids.append(nid)
                nid += 1
            route_ids.append(ids)
        deliv = nid
        nid += 1
        for ids in route_ids:
            chain = [prod_id, *ids, deliv]
            arcs.extend(zip(chain, chain[1:]))
        if not route_ids:
            arcs.append((prod_id, deliv))
        if multi:
            relations[prod_id] = [tuple(ids) for ids in route_ids]
        a, dem = draft.delivery
        acts.append(Activity(deliv, Kind.OUT, a, a, dem, due_date=0, lot=lot,
                             label=TYPE_NAMES[DELIVERY]))
    sink = nid
    acts.append(Activity(sink, Kind.SINK))
    arcs.extend((a.id, sink) for a in acts if a.kind == Kind.OUT)
    return acts, arcs, relations, fixed


def _finish_actf(acts, arcs, relations, fixed, rng: Rng, params: GeneratorParams,
                 balanced, resource_ids, slack_range=None, due_fn=None):
    net = Network.build(acts, arcs, relations)
    completion = {lot: earliest_completion(net, lot) for lot in net.lots}
    due = due_fn(completion) if due_fn else generate_due_dates(params, completion, rng)
    lo, hi = slack_range or params.slack_range
    slack = {lot: rng.integer(lo, hi) for lot in net.lots}
    b = generate_max_durations(due, completion, slack, net, fixed)
    final = []
    for a in net.activities.values():
        if a.kind == Kind.SOURCE or a.kind == Kind.SINK:
            final.append(a)
            continue
        final.append(replace(a, max_duration=b[a.id],
                             due_date=due[a.lot] if a.kind == Kind.OUT else None))
    net = Network.build(final, arcs, relations)
    horizon = max(due.values()) + max(completion[l] + hi for l in net.lots)
    return net, due, completion, horizon


def generate_actf_instance(params: GeneratorParams) -> Instance:
    """Random time-flexible multi-lot instance.

    RNG stream order: per lot (production, routes, delivery; per activity its
    resource choice then its minimum duration), then one due-date draw per lot,
    then one slack draw per lot.
    """
    rng = Rng(params.seed)
    pool = ROUTE_TEMPLATES[params.templates]
    amin, amax = params.min_duration_range
    drafts = []
    for _ in range(params.lot_count):
        def one(kind):
            dem = _draw_demands(rng, kind, params)
            return dem, rng.integer(amin, amax - 1)
        dem, a = one(PRODUCTION)
        production = (a, dem)
        n_routes = rng.integer(1, params.max_routes)
        shapes = rng.sample(range(len(pool)), n_routes)
        routes = []
        for shape in shapes:
            route = []
            for kind in pool[shape]:
                dem, a = one(kind)
                route.append((kind, a, dem))
            routes.append(route)
        dem, a = one(DELIVERY)
        drafts.append(_LotDraft(production, routes, (a, dem)))
    acts, arcs, relations, fixed = _assemble(drafts)
    net, due, completion, horizon = _finish_actf(acts, arcs, relations, fixed, rng, params,
                                                 ACTF_BALANCED, ACTF_RESOURCES)
    resources = _actf_resources(net, due, params, ACTF_RESOURCES, ACTF_BALANCED)
    rs_tag = f"{int(params.resource_strength * 100):03d}"
    name = f"actf_L{params.lot_count}_{params.pattern}_RS{rs_tag}_s{params.seed}"
    if params.templates != "standard":
        name += f"_{params.templates}"
    return Instance(net, resources, horizon, ProblemClass.RCMPSP_ACTF, params.pattern,
                    params.resource_strength, params.seed, name)


def _actf_resources(net: Network, due, params: GeneratorParams, resource_ids, balanced):
    demands = {a.id: dict(a.demands) for a in net.real_activities()}
    used = sorted({r for d in demands.values() for r, q in d.items() if q > 0})
    peaks = earliest_start_peaks(net, used)
    releases = dict(zip(sorted(due), params.releases)) if params.releases else None
    l_par = parallel_lot_estimate(due, releases)
    caps = compute_capacities(demands, params.resource_strength, l_par, params.pattern,
                              balanced, peaks)
    # resources that no activity happens to demand keep a nominal capacity of 1
    return tuple(Resource(r, caps.get(r, 1), r in balanced) for r in resource_ids)


CASE_CAPACITIES = (10, 10, 30, 10, 50, 240, 220, 80)
CASE_BALANCED = frozenset({6, 8})
CASE_HORIZON = 4088
CASE_ROUTE_COUNTS = (3,) * 21 + (2,) * 23 + (1,) * 6
CASE_RESOURCES: Dict[int, Tuple[int, ...]] = {
    PRODUCTION: (3,), COOLING: (7,), PROCESSING: (5,), RELOCATION: (4,),
    STORAGE: (6, 8), VEHICLE: (1, 2), DELIVERY: (1, 2),
}
CASE_MIN_DURATIONS: Dict[int, Interval] = {
    PRODUCTION: (20, 40), COOLING: (30, 90), PROCESSING: (10, 40), RELOCATION: (5, 15),
    STORAGE: (24, 60), VEHICLE: (10, 30), DELIVERY: (15, 45),
}


def generate_case_study_instance(seed: int = 0) -> Instance:
    """Synthetic 50-lot rw instance shaped like the steel case: 21 lots with three
    routes, 23 with two, 6 fixed; eight resources with fixed capacities; T = 4088."""
    rng = Rng(seed)
    params = GeneratorParams(lot_count=50, pattern="rw", resource_strength=Fraction(0),
                             seed=seed, templates="case")
    pool = ROUTE_TEMPLATES["case"]
    counts = rng.sample(CASE_ROUTE_COUNTS, len(CASE_ROUTE_COUNTS))
    drafts = []
    for n_routes in counts:
        def one(kind):
            dem = {rng.choice(CASE_RESOURCES[kind]): 1}
            lo, hi = CASE_MIN_DURATIONS[kind]
            return dem, rng.integer(lo, hi - 1)
        dem, a = one(PRODUCTION)
        production = (a, dem)
        routes = []
        for shape in rng.sample(range(len(pool)), n_routes):
            route = []
            for kind in pool[shape]:
                dem, a = one(kind)
                route.append((kind, a, dem))
            routes.append(route)
        dem, a = one(DELIVERY)
        drafts.append(_LotDraft(production, routes, (a, dem)))
    acts, arcs, relations, fixed = _assemble(drafts)
    slack_range = (30, 120)

    def due_fn(completion):
        # deliveries spread over roughly three days
        return {lot: rng.integer(2 * t, 3000) for lot, t in sorted(completion.items())}

    net, due, completion, _ = _finish_actf(acts, arcs, relations, fixed, rng, params,
                                           CASE_BALANCED, range(1, 9), slack_range, due_fn)
    resources = tuple(Resource(r, c, r in CASE_BALANCED)
                      for r, c in enumerate(CASE_CAPACITIES, start=1))
    return Instance(net, resources, CASE_HORIZON, ProblemClass.RCMPSP_ACTF, "rw",
                    Fraction(0), seed, f"case_L50_rw_s{seed}")


# AC base structure: (local id, kind, successors); OR relations listed separately
_AC_BASE = {
    1: ("AND", (2, 16, 26)),
    2: ("OR", (3, 7)),
    3: ("AND", (4, 6)), 4: ("AND", (5,)), 5: ("AND", (15,)), 6: ("AND", (15,)),
    7: ("OR", (8, 10)), 8: ("AND", (9,)), 9: ("AND", (15,)),
    10: ("OR", (11, 12)), 11: ("AND", (15,)), 12: ("AND", (13,)), 13: ("AND", (14,)),
    14: ("AND", (15,)),
    15: ("AND", (25,)),
    16: ("OR", (17, 20)), 17: ("AND", (18, 19)), 18: ("AND", (24,)), 19: ("AND", (24,)),
    20: ("OR", (21, 23)), 21: ("AND", (22,)), 22: ("AND", (24,)), 23: ("AND", (24,)),
    24: ("AND", (29,)),
    25: ("AND", (30,)),
    26: ("AND", (27,)), 27: ("AND", (28,)), 28: ("AND", (30,)),
    29: ("AND", (30,)),
    30: ("AND", ()),
}
_AC_RELATIONS = {
    2: ((3, 4, 5, 6), (7, 8, 9, 10, 11, 12, 13, 14)),
    7: ((8, 9), (10, 11, 12, 13, 14)),
    10: ((11,), (12, 13, 14)),
    16: ((17, 18, 19), (20, 21, 22, 23)),
    20: ((21, 22), (23,)),
}
AC_BASE_SIZE = len(_AC_BASE)
AC_RENEWABLE = (1, 2, 3, 4)
AC_NONRENEWABLE = 5


def generate_ac_instance(multiplier: int, mode: str = "single", seed: int = 0) -> Instance:
    """Copies of a 30-activity base structure with five nested OR nodes.

    ``single`` chains the copies one after another, ``multi`` puts them in
    parallel between source and sink. Durations, demands and capacities
    depend only on (multiplier, seed), so both modes share them.
    """
    if not 1 <= multiplier <= 5:
        raise ValueError("multiplier must be in 1..5")
    if mode not in ("single", "multi"):
        raise ValueError("mode must be 'single' or 'multi'")
    rng = Rng(seed)
    n = AC_BASE_SIZE
    draws = []
    for _ in range(multiplier):
        for _local in _AC_BASE:
            d = rng.integer(1, 10)
            dem = {r: rng.integer(0, 9) for r in AC_RENEWABLE}
            dem[AC_NONRENEWABLE] = rng.integer(0, 9)
            draws.append((d, {r: q for r, q in dem.items() if q}))

    sink = multiplier * n + 1
    acts = [Activity(0, Kind.SOURCE), Activity(sink, Kind.SINK)]
    arcs = []
    relations = {}
    for k in range(multiplier):
        off = k * n
        lot = k + 1 if mode == "multi" else 1
        for local, (kind, succ) in _AC_BASE.items():
            d, dem = draws[off + local - 1]
            acts.append(Activity(off + local, Kind[kind], d, d, dem, lot=lot))
            arcs.extend((off + local, off + s) for s in succ)
        for local, rels in _AC_RELATIONS.items():
            relations[off + local] = [tuple(off + m for m in rel) for rel in rels]
        first, last = off + 1, off + n
        if mode == "multi" or k == 0:
            arcs.append((0, first))
        if mode == "multi" or k == multiplier - 1:
            arcs.append((last, sink))
        if mode == "single" and k > 0:
            arcs.append((off, first))
    net = Network.build(acts, arcs, relations)

    jobs = net.real_activities()
    caps = {}
    for r in AC_RENEWABLE:
        c_min = max(a.demands.get(r, 0) for a in jobs)
        caps[r] = max(1, c_min + rng.integer(0, c_min))
    # non-renewable budget between the cheapest and dearest full selection
    lo_total = hi_total = 0
    for k in range(multiplier):
        base_net = _ac_copy_network(net, k * n)
        totals = [sum(net.activities[j].demands.get(AC_NONRENEWABLE, 0) for j in route)
                  for route in enumerate_routes(base_net, 1)]
        lo_total += min(totals)
        hi_total += max(totals)
    caps[AC_NONRENEWABLE] = max(1, lo_total + (hi_total - lo_total) // 2)
    resources = tuple(Resource(r, caps[r]) for r in AC_RENEWABLE)
    resources += (Resource(AC_NONRENEWABLE, caps[AC_NONRENEWABLE], renewable=False),)
    horizon = sum(a.max_duration for a in jobs)
    cls = ProblemClass.RCPSP_AC if mode == "single" else ProblemClass.RCMPSP_AC
    return Instance(net, resources, horizon, cls, None, None, seed,
                    f"ac_{mode}_x{multiplier}_s{seed}")


def _ac_copy_network(net: Network, off: int) -> Network:
    """One copy of the AC base structure as a stand-alone network (lot 1)."""
    ids = set(range(off + 1, off + AC_BASE_SIZE + 1))
    acts = [Activity(0, Kind.SOURCE), Activity(-1, Kind.SINK)]
    acts += [replace(net.activities[j], lot=1) for j in sorted(ids)]
    arcs = [(i, j) for i, j in net.arcs if i in ids and j in ids]
    arcs += [(0, off + 1), (off + AC_BASE_SIZE, -1)]
    rels = {i: r for i, r in net.relations.items() if i in ids}
    return Network.build(acts, arcs, rels)


# ---------------------------------------------------------------- file format

def instance_to_dict(inst: Instance) -> dict:
    net = inst.network
    return {
        "format": FORMAT_TAG,
        "meta": {
            "name": inst.name,
            "problem_class": inst.problem_class.value,
            "pattern": inst.pattern,
            "resource_strength": None if inst.resource_strength is None else str(Fraction(inst.resource_strength)),
            "seed": inst.seed,
            "horizon": inst.horizon,
        },
        "resources": [
            {"id": r.id, "capacity": r.capacity, "balanced": r.balanced, "renewable": r.renewable}
            for r in inst.resources
        ],
        "activities": [
            {"id": a.id, "kind": a.kind.value, "a": a.min_duration, "b": a.max_duration,
             "demands": {str(r): q for r, q in sorted(a.demands.items())},
             "due": a.due_date, "lot": a.lot, "label": a.label}
            for a in net.activities.values()
        ],
        "arcs": sorted([list(arc) for arc in net.arcs]),
        "relations": {str(i): [list(r) for r in rels] for i, rels in net.relations.items()},
    }


def instance_from_dict(data: Mapping) -> Instance:
    if data.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported instance format {data.get('format')!r}")
    meta = data["meta"]
    acts = [
        Activity(int(a["id"]), Kind(a["kind"]), int(a["a"]), int(a["b"]),
                 {int(r): int(q) for r, q in a.get("demands", {}).items()},
                 a.get("due"), a.get("lot"), a.get("label", ""))
        for a in data["activities"]
    ]
    net = Network.build(acts, [tuple(arc) for arc in data["arcs"]],
                        {int(i): rels for i, rels in data.get("relations", {}).items()})
    resources = tuple(Resource(int(r["id"]), int(r["capacity"]), bool(r.get("balanced", False)),
                               bool(r.get("renewable", True))) for r in data["resources"])
    rs = meta.get("resource_strength")
    return Instance(net, resources, int(meta["horizon"]), ProblemClass(meta["problem_class"]),
                    meta.get("pattern"), None if rs is None else Fraction(rs), meta.get("seed"),
                    meta.get("name", ""))


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=1) + "\n"


def loads_instance(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def save_instance(inst: Instance, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps_instance(inst), encoding="utf-8")
    return path


def load_instance(path: Union[str, Path]) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def default_grid(seeds: Iterable[int] = range(1, 6)) -> List[GeneratorParams]:
    """The 3 lot sizes x 2 patterns x 4 resource strengths x seeds benchmark grid."""
    grid = []
    for lots in (10, 50, 100):
        for pattern in ("rw", "rand"):
            for rs in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
                for seed in seeds:
                    grid.append(GeneratorParams(lots, pattern, rs, seed))
    return grid
