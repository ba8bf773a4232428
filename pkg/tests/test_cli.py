import csv
import json

import pytest

from helpers import chain_lots
from rcmpsp.bench import (AGGREGATE_COLUMNS, RECORD_COLUMNS, RunRecord, aggregate,
                          read_manifest, write_manifest)
from rcmpsp.cli import main
from rcmpsp.instance import default_grid, save_instance
from rcmpsp.solver import Schedule, Slot, load_schedule, save_schedule
from rcmpsp.toys import toy_instance


@pytest.fixture
def toy_file(tmp_path):
    return str(save_instance(toy_instance(), tmp_path / "toy.json"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_solve_toy_and_validate(tmp_path, toy_file, capsys):
    out = tmp_path / "toy.schedule.json"
    rec = tmp_path / "rec.csv"
    code, text = run(capsys, "solve", toy_file, "--out", out, "--record", rec)
    assert code == 0
    assert "OPTIMAL value=8 bound=8" in text
    rows = list(csv.DictReader(rec.open()))
    assert list(rows[0]) == RECORD_COLUMNS
    assert rows[0]["status"] == "OPTIMAL" and rows[0]["value"] == rows[0]["bound"] == "8"
    code, text = run(capsys, "validate", toy_file, out)
    assert code == 0 and text.strip() == "clean"


@pytest.mark.parametrize("objective,scenario,extra", [
    ("timebalance", "b", []), ("resourcebalance", "c", ["--earliness-v", "1/2"]),
])
def test_solver_output_always_validates(tmp_path, toy_file, capsys, objective, scenario, extra):
    out = tmp_path / "s.json"
    flags = ["--objective", objective, "--scenario", scenario, *extra]
    code, _ = run(capsys, "solve", toy_file, "--out", out, *flags)
    assert code == 0
    code, text = run(capsys, "validate", toy_file, out, *flags)
    assert code == 0, text


def test_oracle_solver_matches(tmp_path, toy_file, capsys):
    code, text = run(capsys, "solve", toy_file, "--solver", "oracle", "--objective", "resourcebalance",
                     "--out", tmp_path / "o.json")
    assert code == 0 and "value=1/2" in text


def test_tampered_schedule_is_rejected(tmp_path, toy_file, capsys):
    out = tmp_path / "s.json"
    run(capsys, "solve", toy_file, "--out", out)
    sched, name = load_schedule(out)
    slots = dict(sched.slots)
    j = next(j for j in sorted(slots) if j not in (0, 14) and slots[j].present)
    s = slots[j]
    slots[j] = Slot(True, s.start + 1, s.end)
    save_schedule(Schedule(slots), out, name)
    code, text = run(capsys, "validate", toy_file, out)
    assert code == 1
    assert "Eq." in text
    code, text = run(capsys, "validate", toy_file, out, "--json")
    assert code == 1 and json.loads(text)[0]["tag"].startswith("Eq.")


def test_schedule_of_another_instance_is_structural(tmp_path, toy_file, capsys):
    out = tmp_path / "s.json"
    run(capsys, "solve", toy_file, "--out", out)
    sched, _ = load_schedule(out)
    save_schedule(sched, out, "something_else")
    code, text = run(capsys, "validate", toy_file, out)
    assert code == 3 and text.startswith("format")


def test_infeasible_exit_code(tmp_path, capsys):
    path = save_instance(chain_lots([([(2, 2)], 5, {1: 2})], {1: 1}), tmp_path / "bad.json")
    code, text = run(capsys, "solve", path, "--out", tmp_path / "s.json")
    assert code == 12 and "INFEASIBLE" in text
    assert not (tmp_path / "s.json").exists()


def test_time_limit_on_a_large_instance(tmp_path, capsys):
    code, _ = run(capsys, "generate", "--lots", 100, "--pattern", "rw", "--rs", "1/4", "--seeds", 1,
                  "--out", tmp_path)
    assert code == 0
    code, text = run(capsys, "solve", tmp_path / "actf_L100_rw_RS025_s1.json", "--time-limit", 1,
                     "--out", tmp_path / "s.json")
    assert code == 11
    assert "TIME_LIMIT value=- bound=" in text and "bound=-" not in text


def test_usage_errors(tmp_path, toy_file, capsys):
    assert main(["solve", str(tmp_path / "missing.json")]) == 2
    assert main(["solve", toy_file, "--earliness-v", "1/2"]) == 2
    assert main(["solve", toy_file, "--scenario", "c", "--earliness-v", "3/2"]) == 2
    assert main(["solve", toy_file, "--class", "rcpsp_ac"]) == 2
    with pytest.raises(SystemExit):
        main(["solve", toy_file, "--objective", "cost"])


def test_generate_ac_groups(tmp_path, capsys):
    code, _ = run(capsys, "generate", "--class", "ac", "--mode", "single", "--out", tmp_path)
    assert code == 0
    entries = read_manifest(tmp_path / "manifest.json")
    assert len(entries) == 5
    assert len({e.group for e in entries}) == 5


def test_generate_is_repeatable(tmp_path, capsys):
    for d in ("a", "b"):
        run(capsys, "generate", "--lots", 10, "--rs", "1/2", "--seed", 3, "--seeds", 1, "--out", tmp_path / d)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 3  # two patterns plus the manifest
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_bench_agreement(tmp_path, capsys):
    run(capsys, "generate", "--lots", 1, 2, "--rs", "1/2", "--templates", "mini", "--seeds", 1,
        "--out", tmp_path)
    out = tmp_path / "res.csv"
    code, text = run(capsys, "bench", tmp_path / "manifest.json", "--objectives", "makespan", "timebalance",
                     "--scenarios", "a", "c=1/2", "--solvers", "bb", "oracle", "--out", out)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4 * 2 * 2 * 2
    assert {r["agree"] for r in rows} == {"true"}
    groups = list(csv.DictReader((tmp_path / "res_groups.csv").open()))
    assert list(groups[0]) == AGGREGATE_COLUMNS
    assert all(int(g["optimal"]) <= int(g["instances"]) for g in groups)


def test_bench_empty_manifest(tmp_path, capsys):
    write_manifest([], tmp_path / "m.json")
    code, _ = run(capsys, "bench", tmp_path / "m.json", "--out", tmp_path / "r.csv")
    assert code == 0
    assert (tmp_path / "r.csv").read_text().strip() == ",".join(RECORD_COLUMNS)
    assert (tmp_path / "r_groups.csv").read_text().strip() == ",".join(AGGREGATE_COLUMNS)


def test_grid_aggregates_into_24_groups():
    # one record per instance of the default grid, grouped as the bench command does
    records = []
    for p in default_grid():
        rs = int(p.resource_strength * 100)
        records.append(RunRecord(f"actf_L{p.lot_count}_{p.pattern}_RS{rs:03d}_s{p.seed}",
                                 f"L{p.lot_count}_{p.pattern}_RS{rs:03d}", "bb", "RCMPSP_ACTF",
                                 "makespan", "A", "OPTIMAL", "10", "10", 1.0, 1, p.seed))
    assert len(records) == 120
    rows = aggregate(records)
    assert len(rows) == 24
    assert all(r["instances"] == 5 and r["optimal"] == 5 for r in rows)


def test_gantt(tmp_path, toy_file, capsys):
    out = tmp_path / "s.json"
    run(capsys, "solve", toy_file, "--out", out)
    svg = tmp_path / "g.svg"
    code, text = run(capsys, "gantt", out, "--instance", toy_file, "--svg", svg)
    assert code == 0
    rows = [line for line in text.splitlines() if line.startswith("lot ")]
    assert [r.split()[1] for r in rows] == ["1", "2"]
    body = svg.read_text()
    assert body.startswith("<?xml") and 'version="1.1"' in body
    sched, _ = load_schedule(out)
    absent = [j for j, s in sched.slots.items() if not s.present]
    assert absent and all(f"{j}[" not in text for j in absent)
    code, text = run(capsys, "gantt", out, "--instance", toy_file, "--by", "resource")
    assert code == 0 and text.count("(C=") == 4


def test_gantt_of_an_empty_schedule(tmp_path, capsys):
    path = save_schedule(Schedule({}), tmp_path / "e.json")
    code, text = run(capsys, "gantt", path)
    assert code == 0 and text.strip() == "(empty schedule)"
