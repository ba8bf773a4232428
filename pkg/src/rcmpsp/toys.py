"""Small hand-built networks and instances used by tests, docs and the CLI demo."""
from __future__ import annotations

from fractions import Fraction

from .network import Activity, Kind, Network

__all__ = [
    "chain_network",
    "common_end_network",
    "nested_or_network",
    "toy_instance",
    "two_lot_network",
]


def _dummy(i: int, kind: Kind) -> Activity:
    return Activity(i, kind)


def two_lot_network() -> Network:
    """Two lots sharing source and sink, nodes 0 to 14.

    Lot 1: production 1 chooses route 2-3 or route 4-5, delivered by 6.
    Lot 2: production 7 chooses route 8-9 or relocation 10, which in turn
    chooses 11 or 12; delivery is 13.
    """
    A, OR, OUT = Kind.AND, Kind.OR, Kind.OUT
    acts = [
        _dummy(0, Kind.SOURCE),
        Activity(1, OR, 2, 2, {1: 1}, lot=1, label="production"),
        Activity(2, A, 1, 3, {2: 1}, lot=1, label="cooling"),
        Activity(3, A, 2, 3, {3: 1}, lot=1, label="storage"),
        Activity(4, A, 2, 4, {2: 1}, lot=1, label="processing"),
        Activity(5, A, 1, 2, {3: 1}, lot=1, label="storage"),
        Activity(6, OUT, 1, 2, {4: 1}, due_date=7, lot=1, label="delivery"),
        Activity(7, OR, 2, 2, {1: 1}, lot=2, label="production"),
        Activity(8, A, 2, 3, {2: 1}, lot=2, label="cooling"),
        Activity(9, A, 1, 3, {3: 1}, lot=2, label="storage"),
        Activity(10, OR, 1, 1, {4: 1}, lot=2, label="relocation"),
        Activity(11, A, 1, 2, {2: 1}, lot=2, label="processing"),
        Activity(12, A, 2, 4, {3: 1}, lot=2, label="storage"),
        Activity(13, OUT, 1, 3, {4: 1}, due_date=8, lot=2, label="delivery"),
        _dummy(14, Kind.SINK),
    ]
    arcs = [(0, 1), (1, 2), (2, 3), (3, 6), (1, 4), (4, 5), (5, 6), (6, 14),
            (0, 7), (7, 8), (8, 9), (9, 13), (7, 10), (10, 11), (10, 12),
            (11, 13), (12, 13), (13, 14)]
    relations = {1: [(2, 3), (4, 5)], 7: [(8, 9), (10, 11, 12)], 10: [(11,), (12,)]}
    return Network.build(acts, arcs, relations)


def toy_instance():
    from .instance import Instance, ProblemClass, Resource

    resources = (
        Resource(1, 1),
        Resource(2, 2, balanced=True),
        Resource(3, 2, balanced=True),
        Resource(4, 1),
    )
    return Instance(two_lot_network(), resources, horizon=14,
                    problem_class=ProblemClass.RCMPSP_ACTF, pattern="rw",
                    resource_strength=Fraction(1, 2), seed=0, name="toy")


def nested_or_network() -> Network:
    """OR node 1 picks 2-4-5 or OR node 3, which picks 6 or 7; sink 8."""
    acts = [_dummy(0, Kind.SOURCE), Activity(1, Kind.OR, 1, 1, lot=1)]
    acts += [Activity(i, Kind.AND, 1, 1, lot=1) for i in (2, 4, 5, 6, 7)]
    acts += [Activity(3, Kind.OR, 1, 1, lot=1), _dummy(8, Kind.SINK)]
    arcs = [(0, 1), (1, 2), (1, 3), (2, 4), (4, 5), (5, 8), (3, 6), (3, 7), (6, 8), (7, 8)]
    relations = {1: [(2, 4, 5), (3, 6, 7)], 3: [(6,), (7,)]}
    return Network.build(acts, arcs, relations)


def common_end_network() -> Network:
    """Two nested OR nodes whose branches all meet again at the sink 14."""
    acts = [_dummy(0, Kind.SOURCE), Activity(1, Kind.OR, 1, 1, lot=1),
            Activity(3, Kind.OR, 1, 1, lot=1), _dummy(14, Kind.SINK)]
    acts += [Activity(i, Kind.AND, 1, 1, lot=1) for i in (2, 4, 5, 6, 7, 8)]
    arcs = [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (4, 14), (5, 14),
            (3, 6), (3, 7), (6, 14), (7, 8), (8, 14)]
    relations = {1: [(2, 4, 5), (3, 6, 7, 8)], 3: [(6,), (7, 8)]}
    return Network.build(acts, arcs, relations)


def chain_network(durations=(2, 3, 1)) -> Network:
    """source -> 1 -> 2 -> ... -> sink, fixed durations, one lot."""
    n = len(durations)
    acts = [_dummy(0, Kind.SOURCE), _dummy(n + 1, Kind.SINK)]
    acts += [Activity(i + 1, Kind.AND, d, d, lot=1) for i, d in enumerate(durations)]
    arcs = [(i, i + 1) for i in range(n + 1)]
    return Network.build(acts, arcs)
