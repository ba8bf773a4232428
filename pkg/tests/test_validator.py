"""One injected defect per constraint tag; each must be reported with exactly that tag."""
from fractions import Fraction

import pytest

from rcmpsp.instance import Instance, ProblemClass, Resource
from rcmpsp.network import Activity, Kind, Network
from rcmpsp.oracle import prune, tags_of, to_time_indexed, validate_schedule
from rcmpsp.oracle.validator import ACTF_TAGS, AC_TAGS, STRUCTURE_TAG
from rcmpsp.solver import Claims, Scenario, Schedule, Slot, SolverConfig, solve

SINK = 99
T = 12
C_HALF = Scenario("C", Fraction(1, 2))

# id: (kind, a, b, demands, due, lot)
# lot 1: OR 1 picks 2 or 4-10, both rejoin at 3, which feeds delivery 5 and the side task 11
# lot 2: OR 6 picks 12 or 13, delivery 7
ACTF_SPEC = {
    1: (Kind.OR, 1, 1, {1: 1}, None, 1),
    2: (Kind.AND, 1, 3, {2: 1}, None, 1),
    4: (Kind.AND, 1, 3, {2: 1}, None, 1),
    10: (Kind.AND, 1, 2, {}, None, 1),
    3: (Kind.AND, 1, 3, {}, None, 1),
    11: (Kind.AND, 1, 3, {}, None, 1),
    5: (Kind.OUT, 1, 2, {3: 1}, 6, 1),
    6: (Kind.OR, 1, 1, {1: 1}, None, 2),
    12: (Kind.AND, 1, 4, {}, None, 2),
    13: (Kind.AND, 1, 4, {}, None, 2),
    7: (Kind.OUT, 1, 2, {3: 1}, 10, 2),
}
AC_LENGTHS = {1: 1, 2: 2, 4: 1, 10: 1, 3: 2, 11: 1, 5: 1, 6: 1, 12: 3, 13: 3, 7: 1}
ARCS = [(0, 1), (1, 2), (1, 4), (2, 3), (4, 10), (10, 3), (3, 5), (3, 11), (11, SINK), (5, SINK),
        (0, 6), (6, 12), (6, 13), (12, 7), (13, 7), (7, SINK)]
RELATIONS = {1: [(2,), (4, 10)], 6: [(12,), (13,)]}

BASE = {0: (0, 0), 1: (0, 1), 2: (1, 3), 3: (3, 5), 11: (5, 6), 5: (5, 6),
        6: (5, 6), 12: (6, 9), 7: (9, 10), SINK: (10, 10)}


def actf_instance():
    acts = [Activity(0, Kind.SOURCE), Activity(SINK, Kind.SINK)]
    acts += [Activity(j, k, a, b, dem, due, lot) for j, (k, a, b, dem, due, lot) in ACTF_SPEC.items()]
    res = (Resource(1, 1), Resource(2, 2, balanced=True), Resource(3, 1))
    return Instance(Network.build(acts, ARCS, RELATIONS), res, T, ProblemClass.RCMPSP_ACTF, name="fx")


def ac_instance():
    acts = [Activity(0, Kind.SOURCE), Activity(SINK, Kind.SINK)]
    for j, (k, _, _, dem, due, lot) in ACTF_SPEC.items():
        d = AC_LENGTHS[j]
        dem = dict(dem)
        if j == 13:
            dem[4] = 5
        # due dates play no role in the AC classes
        acts.append(Activity(j, k, d, d, dem, due, lot))
    res = (Resource(1, 1), Resource(2, 2), Resource(3, 1), Resource(4, 3, renewable=False))
    return Instance(Network.build(acts, ARCS, RELATIONS), res, T, ProblemClass.RCMPSP_AC, name="fx_ac")


def schedule(changes=None, drop=(), claims=None, base=BASE):
    times = dict(base)
    times.update(changes or {})
    slots = {}
    for j in [0, SINK, *ACTF_SPEC]:
        if j in times and j not in drop:
            s, e = times[j]
            slots[j] = Slot(True, s, e)
        else:
            slots[j] = Slot(False)
    return Schedule(slots, claims)


BASE_CLAIMS = Claims(B=2, S=0, peaks={2: 1})
TB = SolverConfig("timebalance")
RB = SolverConfig("resourcebalance")
RB_C = SolverConfig("resourcebalance", C_HALF)

# tag: (config, schedule changes, dropped ids, claims)
ACTF_FIXTURES = {
    "Eq.2": (None, {0: (1, 1)}, (), None),
    "Eq.5": (None, {4: (1, 2), 10: (2, 3)}, (), None),
    "Eq.6": (None, {}, (11,), None),
    "Eq.7": (None, {10: (2, 3)}, (), None),
    "Eq.8": (None, {2: (2, 3)}, (), None),
    "Eq.9": (None, {3: (4, 5)}, (), None),
    "Eq.10": (None, {3: (3, 4), 11: (4, 5), 5: (6, 7)}, (), None),
    "Eq.11": (None, {SINK: (9, 9)}, (), None),
    "Eq.13": (None, {11: (5, 5)}, (), None),
    "Eq.14": (None, {6: (3, 4), 12: (4, 9)}, (), None),
    "Eq.15": (None, {6: (5, 6), 12: (6, 8), 7: (8, 9)}, (), None),
    "Eq.16": (SolverConfig(scenario=C_HALF), {6: (1, 2), 12: (2, 5), 7: (5, 6)}, (), None),
    "Eq.17": (None, {}, (), None),  # presence flag 2, set below
    "Eq.18": (None, {2: (1.5, 3)}, (), None),
    "Eq.20": (TB, {}, (), Claims(B=2, S=1, peaks={2: 1})),
    "Eq.21": (TB, {}, (), Claims(B=1, S=0, peaks={2: 1})),
    "Eq.22": (TB, {}, (), Claims(B=2, S=-1, peaks={2: 1})),
    "Eq.24": (RB, {}, (), Claims(B=2, S=0, peaks={2: 0})),
    "Eq.25": (RB, {}, (), Claims(B=2, S=0, peaks={2: 3})),
    "Eq.26": (RB_C, {6: (1, 2), 12: (2, 5), 7: (5, 6)}, (), BASE_CLAIMS),
    "Eq.27": (RB, {}, (), Claims(B=2, S=0, peaks={2: -1})),
    "Eq.45b": (SolverConfig(scenario=Scenario("B")), {6: (6, 7), 12: (7, 10), 7: (10, 11), SINK: (11, 11)},
               (), None),
    "Eq.45c": (SolverConfig(scenario=C_HALF), {6: (1, 2), 12: (2, 3), 7: (3, 4)}, (), None),
    "Eq.46": (None, {SINK: (13, 13)}, (), None),
}


def actf_fixture(tag):
    cfg, changes, drop, claims = ACTF_FIXTURES[tag]
    sched = schedule(changes, drop, claims)
    if tag == "Eq.17":
        slots = dict(sched.slots)
        slots[11] = Slot(2, 5, 6)
        sched = Schedule(slots)
    return cfg or SolverConfig(), sched


def _ti_defect(tag):
    ti = to_time_indexed(schedule(), T)
    if tag == "Eq.3":
        ti.s[3][7] = 1
    elif tag == "Eq.4":
        ti.y[3][8] = 1
    else:
        ti.w[3][8] = 1
    return ti


@pytest.mark.parametrize("cfg", [SolverConfig(), SolverConfig(scenario=Scenario("B")),
                                 SolverConfig(scenario=C_HALF), RB_C, TB])
def test_base_schedule_is_clean(cfg):
    claims = BASE_CLAIMS if cfg.objective.value != "makespan" else None
    assert validate_schedule(actf_instance(), schedule(claims=claims), cfg) == []


@pytest.mark.parametrize("tag", sorted(ACTF_FIXTURES))
def test_actf_defect_is_flagged_with_its_tag(tag):
    cfg, sched = actf_fixture(tag)
    found = validate_schedule(actf_instance(), sched, cfg)
    assert tags_of(found) == {tag}, found


@pytest.mark.parametrize("tag", ["Eq.3", "Eq.4", "Eq.12"])
def test_time_indexed_defect_is_flagged(tag):
    found = validate_schedule(actf_instance(), _ti_defect(tag))
    assert tags_of(found) == {tag}, found


def test_time_indexed_form_of_the_base_is_clean():
    assert validate_schedule(actf_instance(), to_time_indexed(schedule(), T)) == []


def test_every_actf_tag_has_a_fixture():
    covered = set(ACTF_FIXTURES) | {"Eq.3", "Eq.4", "Eq.12"}
    assert covered == set(ACTF_TAGS)


def test_slot_form_of_start_and_end_defects():
    s = dict(schedule().slots)
    s[3] = Slot(True, None, 5)
    assert tags_of(validate_schedule(actf_instance(), Schedule(s))) == {"Eq.3"}
    s[3] = Slot(True, 3, None)
    assert tags_of(validate_schedule(actf_instance(), Schedule(s))) == {"Eq.4"}
    s[3] = Slot(True, 5, 3)
    assert tags_of(validate_schedule(actf_instance(), Schedule(s))) == {"Eq.12"}


# ---------------------------------------------------------------- AC class

AC_FIXTURES = {
    "c.2": {j: (s + 1, e + 1) for j, (s, e) in BASE.items()},
    "c.4": {4: (1, 2), 10: (2, 3)},
    "c.5": "drop 11",
    "c.6": {7: (8, 9)},
    "c.7": {6: (1, 2), 12: (2, 5), 7: (5, 6)},
    "c.8": "swap 12 13",
    "c.11": {10: (2, 3)},
    "Eq.31": {12: (6, 8)},
    "Eq.46": {SINK: (13, 13)},
}


def ac_fixture(tag):
    if tag == "c.3":
        s = dict(schedule().slots)
        s[11] = Slot(True, None, 6)
        return Schedule(s)
    if tag == "c.9":
        s = dict(schedule().slots)
        s[11] = Slot(2, 5, 6)
        return Schedule(s)
    if tag == "c.10":
        return schedule({11: (5, 6.0)})
    spec = AC_FIXTURES[tag]
    if spec == "drop 11":
        return schedule(drop=(11,))
    if spec == "swap 12 13":
        return schedule({13: BASE[12]}, drop=(12,))
    return schedule(spec)


def test_ac_base_is_clean():
    assert validate_schedule(ac_instance(), schedule()) == []


@pytest.mark.parametrize("tag", sorted(AC_TAGS))
def test_ac_defect_is_flagged_with_its_tag(tag):
    found = validate_schedule(ac_instance(), ac_fixture(tag))
    assert tags_of(found) == {tag}, found


def test_prune_removes_dangling_selections():
    inst = ac_instance()
    sched = schedule({10: (2, 3)})
    assert tags_of(validate_schedule(inst, sched)) == {"c.11"}
    assert validate_schedule(inst, sched, prune_extra=True) == []
    assert not prune(inst, sched)[10].present


# ---------------------------------------------------------------- structure

def test_missing_or_unknown_ids_are_structural():
    s = dict(schedule().slots)
    del s[11]
    assert tags_of(validate_schedule(actf_instance(), Schedule(s))) == {STRUCTURE_TAG}
    s = dict(schedule().slots)
    s[500] = Slot(False)
    assert tags_of(validate_schedule(actf_instance(), Schedule(s))) == {STRUCTURE_TAG}


def test_violations_serialize():
    cfg, sched = actf_fixture("Eq.9")
    v = validate_schedule(actf_instance(), sched, cfg)[0]
    assert v.to_dict() == {"tag": "Eq.9", "ids": [2, 3], "slot": 4, "message": "end 3 != start 4"}
    assert str(v) == "Eq.9: ids=[2, 3] t=4 end 3 != start 4"


def test_fixture_instance_is_solvable():
    res = solve(actf_instance(), SolverConfig())
    assert res.objective == 10
    assert validate_schedule(actf_instance(), res.schedule) == []
