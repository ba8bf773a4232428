"""Command-line front end: generate, solve, validate, bench, gantt."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__
from .bench import (AGGREGATE_COLUMNS, RECORD_COLUMNS, ManifestEntry, aggregate, instance_group,
                    record_of, records_to_json, run_bench, to_csv, write_manifest)
from .gantt import render_svg, render_text, rows_by_lot, rows_by_resource
from .instance import (GeneratorParams, ProblemClass, default_grid, generate_ac_instance,
                       generate_actf_instance, generate_case_study_instance, load_instance,
                       save_instance)
from .oracle.validator import STRUCTURE_TAG, validate_schedule
from .solver.config import ConfigError, DEFAULT_TIME_LIMIT, Scenario, SolverConfig, Status
from .solver.schedule import load_schedule, save_schedule
from .solver.search import solve

EXIT_CODES = {Status.OPTIMAL: 0, Status.FEASIBLE: 10, Status.TIME_LIMIT: 11, Status.INFEASIBLE: 12}
EXIT_USAGE = 2
EXIT_VIOLATIONS = 1
EXIT_STRUCTURE = 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc


def _scenario(args) -> Scenario:
    kind = args.scenario.upper()
    if kind == "C":
        return Scenario("C", args.earliness_v if args.earliness_v is not None else Fraction(1, 2))
    if args.earliness_v is not None:
        raise ConfigError("--earliness-v only applies to scenario c")
    return Scenario(kind)


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--objective", choices=["makespan", "timebalance", "resourcebalance"], default="makespan")
    p.add_argument("--scenario", choices=["a", "b", "c", "A", "B", "C"], default="a")
    p.add_argument("--earliness-v", type=_fraction, default=None, help="earliness factor v in (0, 1), scenario c")
    p.add_argument("--flexible-only", action="store_true",
                   help="time balance over flexible activities only")
    p.add_argument("--class", dest="problem_class", default=None,
                   choices=["rcpsp_ac", "rcmpsp_ac", "rcmpsp_actf"],
                   help="expected problem class; mismatch is an error")


def _config(args, time_limit: float = DEFAULT_TIME_LIMIT) -> SolverConfig:
    cls = ProblemClass[args.problem_class.upper()] if args.problem_class else None
    return SolverConfig(args.objective, _scenario(args), time_limit, cls, flexible_only=args.flexible_only)


# ------------------------------------------------------------------ generate

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    instances = []
    if args.cls == "ac":
        modes = [args.mode] if args.mode else ["single", "multi"]
        for mode in modes:
            for m in (args.multiplier or [1, 2, 3, 4, 5]):
                instances.append(generate_ac_instance(m, mode, args.seed))
    elif args.cls == "case":
        instances.append(generate_case_study_instance(args.seed))
    elif args.lots is None and args.pattern is None and args.rs is None:
        seeds = range(args.seed, args.seed + args.seeds)
        instances = [generate_actf_instance(p) for p in default_grid(seeds)]
    else:
        for lots in args.lots or [10]:
            for pattern in args.pattern or ["rw", "rand"]:
                for rs in args.rs or [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]:
                    for seed in range(args.seed, args.seed + args.seeds):
                        params = GeneratorParams(lots, pattern, rs, seed, templates=args.templates)
                        instances.append(generate_actf_instance(params))
    entries = []
    for inst in instances:
        fname = f"{inst.name}.json"
        save_instance(inst, out / fname)
        entries.append(ManifestEntry(fname, inst.name, instance_group(inst),
                                     inst.problem_class.value, inst.seed or 0))
    write_manifest(entries, out / "manifest.json")
    print(f"wrote {len(entries)} instances and manifest.json to {out}")
    return 0


# ------------------------------------------------------------------ solve

def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args, args.time_limit)
    if args.solver == "oracle":
        from .oracle.brute import brute_force_solve

        result = brute_force_solve(inst, cfg)
    else:
        result = solve(inst, cfg)
    rec = record_of(inst, result, cfg.resolved(inst))
    out = Path(args.out) if args.out else Path(f"{inst.name}.schedule.json")
    if result.schedule is not None:
        save_schedule(result.schedule, out, inst.name)
    if args.record:
        path = Path(args.record)
        if path.suffix == ".json":
            path.write_text(records_to_json([rec]), encoding="utf-8")
        else:
            path.write_text(to_csv([rec], RECORD_COLUMNS), encoding="utf-8")
    print(f"{rec.instance}: {rec.status} value={rec.value or '-'} bound={rec.bound or '-'} "
          f"nodes={rec.nodes} time={rec.runtime:.3f}s")
    if result.schedule is not None:
        print(f"schedule written to {out}")
    return EXIT_CODES[result.status]


# ------------------------------------------------------------------ validate

def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    sched, name = load_schedule(args.schedule)
    cfg = _config(args)
    if name and name != inst.name:
        print(f"{STRUCTURE_TAG}: schedule was written for instance {name!r}, not {inst.name!r}")
        return EXIT_STRUCTURE
    found = validate_schedule(inst, sched, cfg, prune_extra=args.prune)
    if args.json:
        print(json.dumps([v.to_dict() for v in found], indent=1))
    else:
        for v in found:
            print(v)
    if not found:
        if not args.json:
            print("clean")
        return 0
    return EXIT_STRUCTURE if any(v.tag == STRUCTURE_TAG for v in found) else EXIT_VIOLATIONS


# ------------------------------------------------------------------ bench

def cmd_bench(args) -> int:
    scenarios = []
    for s in args.scenarios:
        s = s.strip()
        if s.upper().startswith("C"):
            v = s.split("=", 1)[1] if "=" in s else (args.earliness_v or Fraction(1, 2))
            scenarios.append(Scenario("C", Fraction(v)))
        else:
            scenarios.append(Scenario(s.upper()))
    records = run_bench(args.manifest, args.objectives, scenarios, args.solvers, args.time_limit,
                        args.workers)
    out = Path(args.out)
    if out.suffix == ".json":
        out.write_text(records_to_json(records), encoding="utf-8")
    else:
        out.write_text(to_csv(records, RECORD_COLUMNS), encoding="utf-8")
    agg = aggregate(records)
    agg_path = out.with_name(out.stem + "_groups.csv")
    agg_path.write_text(to_csv(agg, AGGREGATE_COLUMNS), encoding="utf-8")
    print(to_csv(agg, AGGREGATE_COLUMNS), end="")
    print(f"{len(records)} runs written to {out}, {len(agg)} group rows to {agg_path}")
    return 0


# ------------------------------------------------------------------ gantt

def cmd_gantt(args) -> int:
    sched, name = load_schedule(args.schedule)
    inst = load_instance(args.instance) if args.instance else None
    if inst is not None and args.by == "resource":
        rows = rows_by_resource(sched, inst)
    else:
        rows = rows_by_lot(sched, inst)
    title = name or Path(args.schedule).stem
    if args.svg:
        Path(args.svg).write_text(render_svg(rows, title), encoding="utf-8")
    print(render_text(rows, args.width), end="")
    return 0


# ------------------------------------------------------------------ entry

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcmpsp", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write instance files and a manifest")
    g.add_argument("--class", dest="cls", choices=["actf", "ac", "case"], default="actf")
    g.add_argument("--lots", type=int, nargs="+", default=None)
    g.add_argument("--pattern", choices=["rw", "rand"], nargs="+", default=None)
    g.add_argument("--rs", type=_fraction, nargs="+", default=None, help="resource strengths")
    g.add_argument("--templates", choices=["standard", "mini", "case"], default="standard")
    g.add_argument("--multiplier", type=int, nargs="+", choices=[1, 2, 3, 4, 5], default=None)
    g.add_argument("--mode", choices=["single", "multi"], default=None)
    g.add_argument("--seed", type=int, default=1, help="first seed")
    g.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    _model_flags(s)
    s.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    s.add_argument("--solver", choices=["bb", "oracle"], default="bb")
    s.add_argument("--seed", type=int, default=0, help="accepted for symmetry; the search is deterministic")
    s.add_argument("--out", default=None, help="schedule file")
    s.add_argument("--record", default=None, help="run record file (.csv or .json)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a schedule against an instance")
    v.add_argument("instance")
    v.add_argument("schedule")
    _model_flags(v)
    v.add_argument("--prune", action="store_true", help="drop extra selected nodes first (AC classes)")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="run a manifest and tabulate results")
    b.add_argument("manifest")
    b.add_argument("--objectives", nargs="+", default=["makespan"],
                   choices=["makespan", "timebalance", "resourcebalance"])
    b.add_argument("--scenarios", nargs="+", default=["a"], help="a, b, c or c=V")
    b.add_argument("--earliness-v", type=_fraction, default=None)
    b.add_argument("--solvers", nargs="+", default=["bb"], choices=["bb", "oracle"])
    b.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--seed", type=int, default=0, help="accepted for symmetry; runs are deterministic")
    b.add_argument("--out", default="results.csv", help="records file (.csv or .json)")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("gantt", help="draw a schedule")
    c.add_argument("schedule")
    c.add_argument("--instance", default=None, help="instance file, enables lot and resource rows")
    c.add_argument("--by", choices=["lot", "resource"], default="lot")
    c.add_argument("--svg", default=None, help="write an SVG 1.1 file")
    c.add_argument("--width", type=int, default=72)
    c.set_defaults(func=cmd_gantt)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
