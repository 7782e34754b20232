from __future__ import annotations

import csv
import io

import pytest

from genoptics import bench
from genoptics.bench import CSV_COLUMNS, SUITES, BenchError, make_input, run_bench, runner, to_csv
from genoptics.schema import validate
from genoptics.value import node_count


def test_bench_schema_validates():
    s = bench.bench_schema()
    assert validate(s) == []
    ctors = sum(len(s.lookup(n).ctors) for n in ("Module", "Decl", "ConDecl", "Ty", "Clause", "Pat", "Rhs", "Expr", "Lit", "Alt"))
    assert ctors == 30
    assert len(s.lookup("Logic").ctors) == 6
    assert len(s.lookup("Tree").ctors) == 2


@pytest.mark.parametrize("suite", list(SUITES))
@pytest.mark.parametrize("mode", ["fold", "map"])
def test_engines_agree(suite, mode):
    sut = SUITES[suite]
    v = make_input(sut, 2000, seed=4)
    results = {e: runner(sut, e, mode, True)(v) for e in ("plan", "naive", "hand")}
    assert results["plan"][0] == results["naive"][0] == results["hand"][0]
    fast = {e: runner(sut, e, mode, False)(v) for e in ("plan", "naive", "hand")}
    assert fast["plan"] == results["plan"][0]
    assert fast["hand"] == results["hand"][0]


@pytest.mark.parametrize("suite", ["tree", "logic"])
def test_plan_visits_what_hand_visits(suite):
    sut = SUITES[suite]
    v = make_input(sut, 3000, seed=1)
    for mode in ("fold", "map"):
        assert runner(sut, "plan", mode, True)(v)[1] == runner(sut, "hand", mode, True)(v)[1]


def test_inputs_are_deterministic_and_sized():
    for sut in SUITES.values():
        a = make_input(sut, 1000, seed=7)
        assert a == make_input(sut, 1000, seed=7)
        assert 0.5 * 1000 <= node_count(a) <= 2 * 1000


def test_hsmod_is_sparse():
    sut = SUITES["hsmod"]
    v = make_input(sut, 10_000, seed=0)
    _, plan_nodes = runner(sut, "plan", "fold", True)(v)
    _, naive_nodes = runner(sut, "naive", "fold", True)(v)
    assert naive_nodes >= 100 * plan_nodes


def test_csv_shape():
    rows = run_bench(["tree"], [64], ["plan", "hand"], reps=1)
    assert len(rows) == 4
    parsed = list(csv.DictReader(io.StringIO(to_csv(rows))))
    assert tuple(parsed[0]) == CSV_COLUMNS
    assert {(r["engine"], r["mode"]) for r in parsed} == {("plan", "fold"), ("plan", "map"), ("hand", "fold"), ("hand", "map")}
    assert all(int(r["mean_ns"]) > 0 for r in parsed)


def test_zero_reps_gives_header_only():
    assert run_bench(["tree"], [64], reps=0) == []
    assert to_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_unknown_names():
    with pytest.raises(BenchError):
        run_bench(["forest"], [8], reps=1)
    with pytest.raises(BenchError):
        run_bench(["tree"], [8], ["rocket"], reps=1)


def test_normalized_table_divides_by_hand():
    rows = [
        {"suite": "tree", "engine": "plan", "size": 8, "mode": "fold", "mean_ns": 300, "nodesVisited": 1},
        {"suite": "tree", "engine": "hand", "size": 8, "mode": "fold", "mean_ns": 100, "nodesVisited": 1},
    ]
    table = bench.normalized_table(rows)
    assert "3.00x" in table and "1.00x" in table
