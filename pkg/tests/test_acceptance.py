"""Acceptance criteria 1-10, one test each.

Every test records a single PASS/FAIL line; the lines are echoed at the end
of the pytest run and printed directly when this file runs as a script.
"""
from __future__ import annotations

import dataclasses
import random
import sys
import time
import warnings

from genoptics import bench
from genoptics.cli import load_schema
from genoptics.derive import DeriveError, derive_constraints, derive_types, has_types_table
from genoptics.effects import STATE, label, run_state
from genoptics.engine import (
    ByType, Effect, Fold, InterestingDepthWarning, MapPure, PlanCache, VisitStats, compile_plan, interesting,
    naive_traverse, run_plan,
)
from genoptics.gen import PRIMS, random_ground, random_schema, random_value_sized, user_types
from genoptics.optics import Focus, LensBody, build, compose, compose_all, match, modify, over, to_list_of, traverse_of, update, view
from genoptics.schema import App, Prim, parse_type
from genoptics.value import Ctor, PChar, PInt, from_list, parse_value

from goldens import error_cases, golden_cases
from oracles import (
    bump, closure, marker, random_lens_case, random_lens_chain, random_prism_case, random_traversal_case,
    random_triple, reachability,
)

RESULTS: dict[int, str] = {}
INT = Prim("Int")


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------


def test_criterion_01_worked_examples():
    t0 = time.perf_counter()
    cases = golden_cases(load_schema(None))
    bad = [(name, got, want) for name, thunk, want in cases for got in [thunk()] if got != want]
    elapsed = time.perf_counter() - t0
    detail = f"{len(cases) - len(bad)}/{len(cases)} byte-exact in {elapsed:.3f}s"
    if bad:
        detail += f"; first mismatch {bad[0][0]}: {bad[0][1]!r}"
    record(1, not bad and elapsed < 1.0, detail)


def test_criterion_02_error_messages():
    bad = []
    cases = error_cases(load_schema(None))
    for name, thunk, want in cases:
        try:
            thunk()
            bad.append((name, None))
        except DeriveError as e:
            if e.message != want:
                bad.append((name, e.message))
    record(2, not bad, f"{len(cases) - len(bad)}/{len(cases)} messages byte-exact")


def test_criterion_03_plan_matches_naive():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    failures = 0
    n = 1000
    for _ in range(n):
        s, ty, v, q = random_triple(rng, max_types=10, max_nodes=200)
        plan = compile_plan(s, PlanCache(), ty, q)
        ok = (
            run_plan(plan, Fold(), v) == naive_traverse(s, v, ty, q, Fold())
            and run_plan(plan, MapPure(marker), v) == naive_traverse(s, v, ty, q, MapPure(marker))
            and run_state(run_plan(plan, Effect(STATE, label), v))
            == run_state(naive_traverse(s, v, ty, q, Effect(STATE, label)))
        )
        failures += not ok
    elapsed = time.perf_counter() - t0
    record(3, failures == 0 and elapsed < 60, f"{n - failures}/{n} triples agree in 3 modes, {elapsed:.1f}s")


def _perfect(depth):
    counter = [0]

    def build_(d):
        if d == 0:
            counter[0] += 1
            return PInt(counter[0])
        return Ctor("Pair", (build_(d - 1), build_(d - 1)))

    v = Ctor("Single", (build_(depth),))
    for _ in range(depth):
        v = Ctor("Balanced", (v,))
    return v


def test_criterion_04_interesting_is_reachability():
    rng = random.Random(7)
    t0 = time.perf_counter()
    pairs = mismatches = 0
    for _ in range(500):
        s = random_schema(rng, max_types=20)
        # every definition, instantiated at random ground arguments
        roots = [App(d.name, [random_ground(rng, s, depth=1) for _ in d.params]) for d in user_types(s)]
        universe = sorted(closure(s, roots), key=repr)
        for a in list(PRIMS) + universe:
            expect = reachability(s, universe, ByType(a))
            for t in universe:
                pairs += 1
                mismatches += interesting(s, t, a) != expect[t]

    # divergent polymorphic recursion: conservative, warned, and still exact
    shop = load_schema(None)
    ty = parse_type("Perfect Int")
    cache = PlanCache()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        plan = compile_plan(shop, cache, ty, INT)
    warned = any(issubclass(w.category, InterestingDepthWarning) for w in caught)
    conservative = cache.verdict(shop, ty, ByType(INT)) is None
    exact = all(
        run_plan(plan, Fold(), _perfect(d)) == naive_traverse(shop, _perfect(d), ty, INT, Fold())
        == [PInt(i) for i in range(1, 2**d + 1)]
        for d in range(6)
    )
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and warned and conservative and exact and elapsed < 60
    record(
        4,
        ok,
        f"{pairs - mismatches}/{pairs} pairs agree; Perfect warned={warned} conservative={conservative} "
        f"exact={exact}; {elapsed:.1f}s",
    )


def _best_of(fn, v, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(v)
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_05_pruning():
    shop = load_schema(None)
    tc = parse_type("TC")
    v = Ctor("MkTC", (PInt(1), from_list([PChar("x")] * 10_000), parse_value("Just True")))
    plan = compile_plan(shop, PlanCache(), tc, INT)
    sp, sn = VisitStats(), VisitStats()
    same = run_plan(plan, Fold(), v, stats=sp) == naive_traverse(shop, v, tc, INT, Fold(), sn)
    t_plan = _best_of(lambda x: run_plan(plan, Fold(), x), v)
    t_naive = _best_of(lambda x: naive_traverse(shop, x, tc, INT, Fold()), v, reps=3)
    speedup = t_naive / t_plan

    sut = bench.SUITES["hsmod"]
    ratios = []
    for seed in range(5):
        hv = bench.make_input(sut, 10_000, seed)
        _, pn = bench.runner(sut, "plan", "fold", True)(hv)
        _, nn = bench.runner(sut, "naive", "fold", True)(hv)
        ratios.append(nn / pn)
    ok = same and sp.nodes_visited <= 10 and sn.nodes_visited >= 10_000 and speedup >= 10 and min(ratios) >= 100
    record(
        5,
        ok,
        f"TC with 10k chars: plan={sp.nodes_visited} naive={sn.nodes_visited} visits, {speedup:.0f}x faster; "
        f"hsmod visit ratio min {min(ratios):.0f}x over 5 seeds",
    )


def test_criterion_06_hand_parity():
    lines = []
    ok = True
    for name in ("tree", "logic"):
        sut = bench.SUITES[name]
        v = bench.make_input(sut, 2**15, seed=0)
        for mode in ("fold", "map"):
            plan_fast = bench.runner(sut, "plan", mode, False)
            hand_fast = bench.runner(sut, "hand", mode, False)
            t_plan = bench.run_deep(bench.time_ns, plan_fast, v, 7)
            t_hand = bench.run_deep(bench.time_ns, hand_fast, v, 7)
            _, n_plan = bench.run_deep(bench.runner(sut, "plan", mode, True), v)
            _, n_hand = bench.run_deep(bench.runner(sut, "hand", mode, True), v)
            ratio = t_plan / t_hand
            ok &= ratio <= 3 and n_plan == n_hand
            lines.append(f"{name}/{mode} {ratio:.2f}x nodes {n_plan}={n_hand}")
    record(6, ok, "; ".join(lines))


def test_criterion_07_laws():
    rng = random.Random(11)
    fails = {"lens": 0, "prism": 0, "functor": 0, "compose": 0}
    for _ in range(300):
        s, lens, v, b = random_lens_case(rng)
        b2 = random_value_sized(rng, s, lens.a_ty)
        fails["lens"] += view(lens, update(lens, b, v)) != b
        fails["lens"] += update(lens, view(lens, v), v) != v
        fails["lens"] += update(lens, b2, update(lens, b, v)) != update(lens, b2, v)
    for _ in range(300):
        s, p, v, b = random_prism_case(rng)
        fails["prism"] += match(p, build(p, b)) != Focus(b)
        r = match(p, v)
        fails["prism"] += isinstance(r, Focus) and build(p, r.value) != v
        fails["prism"] += not isinstance(r, Focus) and r.value != v
    for _ in range(300):
        s, t, v = random_traversal_case(rng)
        both = over(t, lambda x: marker(bump(x)), v, check=False)
        fails["functor"] += both != over(t, marker, over(t, bump, v, check=False), check=False)
    for _ in range(300):
        s, chain, v = random_lens_chain(rng, 2)
        first = chain[0]
        inner = derive_types(s, first.a_ty, INT)
        expect = [y for x in to_list_of(first, v) for y in to_list_of(inner, x)]
        fails["compose"] += to_list_of(compose(first, inner), v) != expect
    total = sum(fails.values())
    record(7, total == 0, "failures " + ", ".join(f"{k}={n}" for k, n in fails.items()) + " (300 cases each)")


def test_criterion_08_fusion():
    rng = random.Random(5)
    bad = 0
    depths = []
    for _ in range(100):
        s, chain, v = random_lens_chain(rng, 5)
        depths.append(len(chain))
        counts = []

        def instrument(lens):
            slot = [0, 0]
            counts.append(slot)
            ext, reb = lens.body.extract, lens.body.rebuild

            def extract(x):
                slot[0] += 1
                return ext(x)

            def rebuild(b, c):
                slot[1] += 1
                return reb(b, c)

            return dataclasses.replace(lens, body=LensBody(extract, rebuild))

        modify(compose_all(*[instrument(l) for l in chain]), bump, v, check=False)
        bad += counts != [[1, 1]] * len(chain)
    record(8, bad == 0, f"{100 - bad}/100 compositions (depth {min(depths)}..{max(depths)}) extract and rebuild once per layer")


def test_criterion_09_constraints():
    rng = random.Random(9)
    sch = bench.bench_schema()
    bad = 0
    for i in range(500):
        sut = bench.SUITES["tree" if i % 2 == 0 else "logic"]
        v = sut.make(rng.randint(1, 400), rng)
        table = has_types_table(sch, sut.ty, INT, lambda eff, x: eff.pure(bump(x)))
        via_table = derive_constraints(sch, sut.ty, table).over(v)
        bad += via_table != over(derive_types(sch, sut.ty, INT), bump, v)
    record(9, bad == 0, f"{500 - bad}/500 Tree/Logic values identical")


def test_criterion_10_effect_order():
    rng = random.Random(10)
    bad = 0

    def tag(x):
        return lambda s: (Ctor("L", (PInt(s), x)), s + 1)

    for _ in range(300):
        s, t, v = random_traversal_case(rng)
        foci = to_list_of(t, v)
        out, n = run_state(traverse_of(t, STATE, tag, v))
        tagged = to_list_of(t, out)
        ok = n == len(foci) and [x.args[0] for x in tagged] == [PInt(i) for i in range(n)]
        ok = ok and [x.args[1] for x in tagged] == foci
        bad += not ok
    record(10, bad == 0, f"{300 - bad}/300 values labelled 0..n-1 in toListOf order")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
