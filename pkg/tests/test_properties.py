"""Randomized invariants of generation, propagation and returned schedules."""
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from rcmpsp.instance import GeneratorParams, dumps_instance, generate_actf_instance, loads_instance
from rcmpsp.network import Kind
from rcmpsp.oracle import from_time_indexed, to_time_indexed, validate_schedule
from rcmpsp.solver import (Model, Scenario, Schedule, Slot, SolverConfig, Status, decisions,
                           evaluate_objective, lower_bound, solve)
from rcmpsp.solver.schedule import load_schedule, save_schedule, usage_profiles
from rcmpsp.solver.search import _apply
from rcmpsp.solver.state import PRESENT, Inconsistent

SETTINGS = dict(deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
OBJECTIVES = ("makespan", "timebalance", "resourcebalance")


@st.composite
def small_params(draw):
    return GeneratorParams(
        lot_count=draw(st.integers(1, 2)),
        pattern=draw(st.sampled_from(["rw", "rand"])),
        resource_strength=Fraction(draw(st.integers(0, 4)), 4),
        seed=draw(st.integers(0, 2 ** 32)),
        slack_range=(1, 3),
        min_duration_range=(1, 3),
        templates="mini",
        max_routes=2,
    )


scenarios = st.one_of(st.just(Scenario("A")), st.just(Scenario("B")),
                      st.integers(1, 9).map(lambda k: Scenario("C", Fraction(k, 10))))


def descend(state, choices):
    """Follow the given branch indices from a propagated state; returns the last consistent state."""
    for pick in choices:
        if state.is_fixed():
            break
        decs = decisions(state)
        child = state.copy()
        try:
            _apply(child, decs[pick % len(decs)])
        except Inconsistent:
            break
        if not child.propagate():
            break
        state = child
    return state


def compulsory_usage_ok(state):
    m = state.model
    for ri, users in enumerate(m.users):
        prof = np.zeros(m.T + 1, dtype=np.int64)
        for v, q in users:
            if state.pres[v] == PRESENT and state.smax[v] < state.emin[v]:
                prof[state.smax[v]:state.emin[v]] += q
        if prof.max(initial=0) > m.caps[ri]:
            return False
    return True


# ---------------------------------------------------------------- propagation

@settings(max_examples=300, **SETTINGS)
@given(small_params(), st.sampled_from(OBJECTIVES), scenarios, st.lists(st.integers(0, 1), max_size=25))
def test_propagation_fixpoint_is_idempotent(params, objective, scenario, choices):
    inst = generate_actf_instance(params)
    root = Model(inst, SolverConfig(objective, scenario)).root()
    if not root.propagate():
        return
    state = descend(root, choices)
    once = state.snapshot()
    assert state.propagate()
    assert state.snapshot() == once


@settings(max_examples=200, **SETTINGS)
@given(small_params(), scenarios, st.lists(st.integers(0, 1), max_size=25))
def test_windows_shrink_and_timetable_respects_capacity(params, scenario, choices):
    inst = generate_actf_instance(params)
    root = Model(inst, SolverConfig("makespan", scenario)).root()
    before = root.copy()
    if not root.propagate():
        return
    for v in range(root.model.n):
        assert before.smin[v] <= root.smin[v] <= root.smax[v] <= before.smax[v]
        assert before.lmin[v] <= root.lmin[v] <= root.lmax[v] <= before.lmax[v]
        if root.pres[v] == PRESENT:
            assert root.smin[v] + root.lmin[v] <= root.emax[v]
    state = descend(root, choices)
    assert compulsory_usage_ok(state)
    assert lower_bound(state) >= lower_bound(root)


# ---------------------------------------------------------------- returned schedules

def check_schedule(inst, res, cfg):
    sched = res.schedule
    assert validate_schedule(inst, sched, cfg) == []
    net = inst.network
    for i, j in net.arcs:
        a, b = net.activities[i], net.activities[j]
        if a.lot is not None and a.lot == b.lot and sched[i].present and sched[j].present:
            assert sched[i].end == sched[j].start
    caps = inst.capacities
    for r, steps in usage_profiles(inst, sched).items():
        assert all(level <= caps[r] for _, level in steps)
    assert evaluate_objective(inst, sched, cfg) == res.objective
    assert res.bound <= res.objective


@settings(max_examples=300, **SETTINGS)
@given(small_params(), st.sampled_from(OBJECTIVES), scenarios)
def test_returned_schedules_are_valid(params, objective, scenario):
    inst = generate_actf_instance(params)
    cfg = SolverConfig(objective, scenario, time_limit=60)
    res = solve(inst, cfg)
    assert res.status in (Status.OPTIMAL, Status.INFEASIBLE)
    if res.status == Status.INFEASIBLE:
        assert scenario.kind != "A"
        return
    check_schedule(inst, res, cfg)
    if objective == "timebalance":
        assert res.objective >= 0
    if objective == "resourcebalance":
        assert 0 <= res.objective <= 1
    if scenario.kind == "C":
        for j in net_deliveries(inst):
            d = inst.network.activities[j].due_date
            assert d * (1 - scenario.v) <= res.schedule[j].end <= d


def net_deliveries(inst):
    return sorted(a.id for a in inst.network.activities.values() if a.kind == Kind.OUT)


@settings(max_examples=200, **SETTINGS)
@given(small_params())
def test_on_time_delivery_never_shortens_the_makespan(params):
    inst = generate_actf_instance(params)
    a = solve(inst, SolverConfig("makespan", Scenario("A")))
    b = solve(inst, SolverConfig("makespan", Scenario("B")))
    assert a.status == Status.OPTIMAL
    if b.status == Status.OPTIMAL:
        assert b.objective >= a.objective
        for j in net_deliveries(inst):
            assert b.schedule[j].end == inst.network.activities[j].due_date
    else:
        assert b.status == Status.INFEASIBLE


# ---------------------------------------------------------------- formats

@settings(max_examples=100, **SETTINGS)
@given(small_params())
def test_instances_round_trip(params):
    inst = generate_actf_instance(params)
    text = dumps_instance(inst)
    assert loads_instance(text) == inst
    assert dumps_instance(generate_actf_instance(params)) == text
    for lot in inst.network.lots:
        out = inst.network.activities[inst.network.delivery_of(lot)]
        assert out.due_date <= inst.horizon


@st.composite
def schedules(draw):
    horizon = draw(st.integers(1, 30))
    slots = {}
    for j in range(draw(st.integers(1, 8))):
        if draw(st.booleans()):
            s = draw(st.integers(0, horizon))
            slots[j] = Slot(True, s, draw(st.integers(s, horizon)))
        else:
            slots[j] = Slot(False)
    return horizon, Schedule(slots)


@settings(max_examples=150, **SETTINGS)
@given(schedules())
def test_time_indexed_round_trip(data):
    horizon, sched = data
    ti = to_time_indexed(sched, horizon)
    for j in ti.ids:
        assert ti.s[j].sum() == ti.y[j].sum() == ti.x[j]
        assert np.array_equal(np.cumsum(ti.s[j] - ti.y[j]), ti.w[j])
    assert from_time_indexed(ti).slots == sched.slots


@settings(max_examples=100, **SETTINGS)
@given(schedules())
def test_schedule_files_round_trip(tmp_path_factory, data):
    _, sched = data
    path = tmp_path_factory.mktemp("s") / "s.json"
    save_schedule(sched, path, "x")
    back, name = load_schedule(path)
    assert name == "x" and back.slots == sched.slots
