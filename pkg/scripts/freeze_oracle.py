"""Build the oracle-equivalence suite and freeze exhaustive optima into tests/data.

An instance enters the suite when it respects the size bounds (at most 3
lots, 12 non-dummy activities, horizon 30) and the exhaustive oracle finishes
all nine objective/scenario cases within its node budget. Selection never
looks at the branch and bound.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from rcmpsp.instance import GeneratorParams, generate_actf_instance
from rcmpsp.oracle import OracleLimitExceeded, OracleLimits, brute_force_solve
from rcmpsp.solver import Scenario, SolverConfig

OBJECTIVES = ("makespan", "timebalance", "resourcebalance")
SCENARIOS = (("A", None), ("B", None), ("C", Fraction(1, 2)))
LIMITS = OracleLimits(max_nodes=200_000)


def suite_params(seed: int) -> GeneratorParams:
    return GeneratorParams(
        lot_count=1 + seed % 3,
        pattern=("rw", "rand")[seed % 2],
        resource_strength=Fraction(1 + (seed // 2) % 4, 4),
        seed=seed,
        slack_range=(1, 3),
        min_duration_range=(1, 3),
        templates="mini",
        max_routes=2,
    )


def case_key(objective: str, kind: str) -> str:
    return f"{objective}/{kind}"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/data/oracle_suite.json"))
    args = ap.parse_args(argv)
    entries = []
    seed = 0
    while len(entries) < args.count:
        seed += 1
        params = suite_params(seed)
        inst = generate_actf_instance(params)
        if inst.horizon > 30 or len(inst.network.real_activities()) > 12 or inst.network.lot_count > 3:
            continue
        optima = {}
        t0 = time.perf_counter()
        try:
            for obj in OBJECTIVES:
                for kind, v in SCENARIOS:
                    cfg = SolverConfig(obj, Scenario(kind, v))
                    res = brute_force_solve(inst, cfg, LIMITS)
                    optima[case_key(obj, kind)] = str(res.objective) if res.objective is not None else "INFEASIBLE"
        except OracleLimitExceeded as exc:
            print(f"skip {inst.name}: {exc}", file=sys.stderr)
            continue
        entries.append({"seed": seed, "name": inst.name, "optima": optima})
        print(f"{inst.name}: {optima} ({time.perf_counter() - t0:.1f}s)", file=sys.stderr, flush=True)
    data = {
        "generator": {"slack_range": [1, 3], "min_duration_range": [1, 3], "templates": "mini",
                      "max_routes": 2, "lot_count": "1 + seed % 3", "pattern": "rw if seed even else rand",
                      "resource_strength": "(1 + (seed // 2) % 4) / 4"},
        "oracle_max_nodes": LIMITS.max_nodes,
        "earliness_v": "1/2",
        "instances": entries,
    }
    Path(args.out).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
