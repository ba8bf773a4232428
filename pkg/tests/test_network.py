import pytest

from rcmpsp.network import (Activity, Kind, Network, enumerate_routes, route_sets, to_cp_network,
                            topological_sort, validate_actf_shape, validate_network)
from rcmpsp.toys import chain_network, common_end_network, nested_or_network, two_lot_network


def codes(diags):
    return {d.code for d in diags}


def test_toy_networks_are_valid():
    for net in (two_lot_network(), nested_or_network(), common_end_network(), chain_network()):
        assert validate_network(net) == []
    assert validate_actf_shape(two_lot_network()) == []


def test_topological_sort_is_deterministic_and_detects_cycles():
    assert topological_sort([3, 1, 2], [(1, 2)]) == [1, 2, 3]
    assert topological_sort([1, 2, 3], [(1, 2), (2, 3), (3, 1)]) is None


def test_cp_form_of_nested_or():
    cp = to_cp_network(nested_or_network())
    # meta ids follow the largest non-sink id 7, skipping the sink id 8
    assert cp.alt_starts == {9: (11, 12), 10: (6, 7)}
    assert cp.span_sets == {11: frozenset({2, 4, 5}), 12: frozenset({3, 6, 7})}
    assert cp.span_head == {11: 2, 12: 3}
    assert cp.alt_ends == {9: frozenset({8}), 10: frozenset({8})}
    assert sorted(cp.cp_adjacency) == [(0, 1), (1, 9), (2, 4), (3, 10), (4, 5)]
    assert cp.alt_end_iff == frozenset({(9, 8)})
    assert cp.meta_set == frozenset({9, 10, 11, 12})
    assert cp.activities[9].kind == Kind.META_ALT
    assert cp.activities[11].kind == Kind.META_SPAN


def test_cp_form_skips_used_ids_and_keeps_common_end():
    cp = to_cp_network(common_end_network())
    assert set(cp.alt_starts) == {9, 10}
    assert set(cp.span_sets) == {11, 12, 13}
    assert cp.span_terminals[11] == frozenset({4, 5})
    assert cp.span_terminals[12] == frozenset({6, 8})
    assert 14 not in cp.meta_set


def test_cp_form_of_two_lots():
    cp = to_cp_network(two_lot_network())
    assert cp.alt_starts == {15: (18, 19), 16: (20, 21), 17: (11, 12)}
    # 13 has a predecessor (9) outside the relations of OR 10, so only one direction
    assert (16, 13) in cp.alt_end_iff and (17, 13) not in cp.alt_end_iff
    assert (1, 15) in cp.cp_adjacency and (1, 2) not in cp.cp_adjacency


def test_strip_recovers_original_activities():
    net = two_lot_network()
    cp = to_cp_network(net)
    assert set(cp.strip().activities) == set(net.activities)


@pytest.mark.parametrize("factory", [two_lot_network, nested_or_network, common_end_network])
def test_route_sets_survive_the_cp_transformation(factory):
    net = factory()
    cp = to_cp_network(net)
    for lot in net.lots:
        plain = route_sets(enumerate_routes(net, lot))
        via_cp = route_sets(enumerate_routes(cp, lot), strip=cp.meta_set)
        assert sorted(map(sorted, plain)) == sorted(map(sorted, via_cp))


def test_routes_of_toy_lots():
    net = two_lot_network()
    assert enumerate_routes(net, 1) == [(1, 2, 3, 6), (1, 4, 5, 6)]
    assert enumerate_routes(net, 2) == [(7, 8, 9, 13), (7, 10, 11, 13), (7, 10, 12, 13)]
    with pytest.raises(KeyError):
        enumerate_routes(net, 99)


def _base():
    return [Activity(0, Kind.SOURCE), Activity(1, Kind.AND, 1, 2, lot=1),
            Activity(2, Kind.OUT, 1, 1, due_date=5, lot=1), Activity(3, Kind.SINK)]


def test_invalid_networks_are_diagnosed():
    acts = _base()
    assert "cycle" in codes(validate_network(Network.build(acts, [(0, 1), (1, 2), (2, 1), (2, 3)])))
    assert "unknown-activity" in codes(validate_network(Network.build(acts, [(0, 9)])))
    bad = acts[:1] + [Activity(1, Kind.AND, 3, 2, lot=1)] + acts[2:]
    assert "duration-bounds" in codes(validate_network(Network.build(bad, [(0, 1), (1, 2), (2, 3)])))
    two_src = acts + [Activity(4, Kind.SOURCE)]
    assert "source-count" in codes(validate_network(Network.build(two_src, [(0, 1), (1, 2), (2, 3), (4, 1)])))
    dead = acts + [Activity(4, Kind.AND, 1, 1, lot=1)]
    assert "dead-end" in codes(validate_network(Network.build(dead, [(0, 1), (1, 2), (2, 3), (1, 4)])))


def test_or_node_without_relations_is_diagnosed():
    acts = [Activity(0, Kind.SOURCE), Activity(1, Kind.OR, 1, 1, lot=1),
            Activity(2, Kind.AND, 1, 1, lot=1), Activity(3, Kind.AND, 1, 1, lot=1),
            Activity(4, Kind.OUT, 1, 1, due_date=5, lot=1), Activity(5, Kind.SINK)]
    arcs = [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]
    assert "relation-missing" in codes(validate_network(Network.build(acts, arcs)))
    ok = Network.build(acts, arcs, {1: [(2,), (3,)]})
    assert validate_network(ok) == []
    with pytest.raises(ValueError):
        to_cp_network(Network.build(acts, arcs, {1: []}))
