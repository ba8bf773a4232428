"""Benchmark manifests, run records and per-group result tables."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path
from statistics import mean
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .instance import Instance, load_instance
from .solver.config import Objective, Scenario, SolverConfig, Status
from .solver.search import SolveResult, solve

MANIFEST_TAG = "rcmpsp-manifest/1"


@dataclass(frozen=True)
class ManifestEntry:
    file: str
    name: str
    group: str
    problem_class: str
    seed: int


@dataclass(frozen=True)
class RunRecord:
    instance: str
    group: str
    solver: str
    problem_class: str
    objective: str
    scenario: str
    status: str
    value: str  # exact rational, "" when no schedule
    bound: str
    runtime: float
    nodes: int
    seed: int
    agree: str = ""  # "true"/"false" when both solvers ran the same case


RECORD_COLUMNS = [f.name for f in fields(RunRecord)]
AGGREGATE_COLUMNS = ["group", "solver", "objective", "scenario", "instances", "mean_value",
                     "mean_bound", "mean_runtime", "optimal", "feasible"]


def instance_group(inst: Instance) -> str:
    if inst.problem_class.time_flexible:
        rs = int(inst.resource_strength * 100) if inst.resource_strength is not None else 0
        return f"L{inst.network.lot_count}_{inst.pattern}_RS{rs:03d}"
    return inst.name.rsplit("_s", 1)[0]


def write_manifest(entries: Sequence[ManifestEntry], path: Union[str, Path]) -> Path:
    path = Path(path)
    data = {"format": MANIFEST_TAG, "instances": [asdict(e) for e in entries]}
    path.write_text(json.dumps(data, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path


def read_manifest(path: Union[str, Path]) -> List[ManifestEntry]:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("format") != MANIFEST_TAG:
        raise ValueError(f"unsupported manifest format {data.get('format')!r}")
    return [ManifestEntry(**e) for e in data["instances"]]


def _fmt(x: Optional[Fraction]) -> str:
    return "" if x is None else str(x)


def record_of(inst: Instance, result: SolveResult, cfg: SolverConfig, group: str = "") -> RunRecord:
    return RunRecord(
        instance=inst.name, group=group or instance_group(inst), solver=result.solver,
        problem_class=inst.problem_class.value, objective=Objective(cfg.objective).value,
        scenario=str(cfg.scenario), status=result.status.value, value=_fmt(result.objective),
        bound=_fmt(result.bound), runtime=round(result.stats.wall_time, 6),
        nodes=result.stats.nodes, seed=inst.seed if inst.seed is not None else 0,
    )


def _run_case(args) -> RunRecord:
    path, group, solver, objective, scenario, time_limit = args
    inst = load_instance(path)
    cfg = SolverConfig(objective, scenario, time_limit)
    if solver == "oracle":
        from .oracle.brute import brute_force_solve

        result = brute_force_solve(inst, cfg)
    else:
        result = solve(inst, cfg)
    return record_of(inst, result, cfg, group)


def run_bench(manifest: Union[str, Path], objectives: Iterable[str] = ("makespan",),
              scenarios: Iterable[Scenario] = (Scenario("A"),), solvers: Iterable[str] = ("bb",),
              time_limit: float = 3600.0, workers: int = 1) -> List[RunRecord]:
    """Run every (instance, objective, scenario, solver) case of a manifest; deterministic order."""
    base = Path(manifest).parent
    entries = read_manifest(manifest)
    cases = []
    for e in entries:
        cls_ac = not e.problem_class.endswith("ACTF")
        for obj in objectives:
            for sc in scenarios:
                if cls_ac and (obj != "makespan" or sc.kind != "A"):
                    continue
                for solver in solvers:
                    cases.append((str(base / e.file), e.group, solver, obj, sc, time_limit))
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_case, cases))
    else:
        records = [_run_case(c) for c in cases]
    return mark_agreement(records)


def mark_agreement(records: List[RunRecord]) -> List[RunRecord]:
    """Fill ``agree`` on cases solved by both the branch and bound and the oracle."""
    by_case: Dict[Tuple[str, str, str], Dict[str, RunRecord]] = {}
    for r in records:
        by_case.setdefault((r.instance, r.objective, r.scenario), {})[r.solver] = r
    out = []
    for r in records:
        both = by_case[(r.instance, r.objective, r.scenario)]
        if "bb" in both and "oracle" in both:
            a, b = both["bb"], both["oracle"]
            same = a.status == b.status and (a.status != Status.OPTIMAL.value or a.value == b.value)
            r = RunRecord(**{**asdict(r), "agree": "true" if same else "false"})
        out.append(r)
    return out


def aggregate(records: Iterable[RunRecord]) -> List[dict]:
    groups: Dict[Tuple[str, str, str, str], List[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.group, r.solver, r.objective, r.scenario), []).append(r)
    rows = []
    for (group, solver, obj, sc), rs in sorted(groups.items()):
        values = [Fraction(r.value) for r in rs if r.value]
        bounds = [Fraction(r.bound) for r in rs if r.bound]
        rows.append({
            "group": group, "solver": solver, "objective": obj, "scenario": sc,
            "instances": len(rs),
            "mean_value": f"{float(mean(values)):.4f}" if values else "",
            "mean_bound": f"{float(mean(bounds)):.4f}" if bounds else "",
            "mean_runtime": f"{mean(r.runtime for r in rs):.3f}",
            "optimal": sum(r.status == Status.OPTIMAL.value for r in rs),
            "feasible": sum(r.status in (Status.OPTIMAL.value, Status.FEASIBLE.value) for r in rs),
        })
    return rows


def to_csv(rows: Iterable, columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r) if isinstance(r, RunRecord) else r)
    return buf.getvalue()


def records_to_json(records: Iterable[RunRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=1) + "\n"
