"""Small instance builders shared by the test modules."""
from rcmpsp.instance import Instance, ProblemClass, Resource
from rcmpsp.network import Activity, Kind, Network

SINK = 99


def chain_lots(specs, caps, horizon=20, balanced=(), cls=ProblemClass.RCMPSP_ACTF):
    """One chain per lot from ``specs`` = [(durations [(a, b), ...], due, demands of the first activity)].

    Activity ids run 1, 2, ... across lots in order; the sink is 99.
    """
    acts = [Activity(0, Kind.SOURCE)]
    arcs = []
    nid = 1
    for lot, (durs, due, dem) in enumerate(specs, 1):
        prev = 0
        for k, (a, b) in enumerate(durs):
            kind = Kind.OUT if k == len(durs) - 1 else Kind.AND
            acts.append(Activity(nid, kind, a, b, dem if k == 0 else {},
                                 due if kind == Kind.OUT else None, lot))
            arcs.append((prev, nid))
            prev = nid
            nid += 1
        arcs.append((prev, SINK))
    acts.append(Activity(SINK, Kind.SINK))
    resources = tuple(Resource(r, c, r in balanced) for r, c in caps.items())
    return Instance(Network.build(acts, arcs), resources, horizon, cls, name="chain")
