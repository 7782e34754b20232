"""Benchmark suites: compiled plans vs the naive engine vs handwritten walkers.

Each suite fixes a schema, a root type and the query ``types Int``, and
generates inputs deterministically from a seed. Handwritten walkers count
visits the same way plans do: one per constructor node entered and one per
focus; subtrees that cannot contain an Int are skipped.
"""
from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .engine import ByType, Fold, MapPure, PlanCache, VisitStats, compile_plan, naive_traverse, run_deep, run_plan
from .schema import INT, Schema, TypeExpr, parse_schema, parse_type, prelude
from .value import Ctor, PChar, PInt, from_list

BENCH_SCHEMA_TEXT = """\
type Tree a
  | Leaf a
  | Branch (Tree a) (Tree a)

type Logic
  | LVar Int
  | LConst Bool
  | Not Logic
  | And Logic Logic
  | Or Logic Logic
  | Impl Logic Logic

type Module
  | Module [Char] [Decl]
type Decl
  | TypeSig [[Char]] Ty
  | FunBind [Char] [Clause]
  | DataDecl [Char] [[Char]] [ConDecl]
type ConDecl
  | ConDecl [Char] [Ty]
type Ty
  | TyCon [Char]
  | TyVar [Char]
  | TyApp Ty Ty
  | TyFun Ty Ty
  | TyList Ty
type Clause
  | Clause [Pat] Rhs [Decl]
type Pat
  | PVar [Char]
  | PLit Lit
  | PCon [Char] [Pat]
  | PWild
type Rhs
  | Plain Expr
  | Guarded [(Expr, Expr)]
type Expr
  | Var [Char]
  | Con [Char]
  | ELit Lit
  | App Expr Expr
  | Lam [Pat] Expr
  | Let [Decl] Expr
  | If Expr Expr Expr
  | Case Expr [Alt]
  | Typed Expr Ty
type Lit
  | LInt Int
  | LChar Char
  | LStr [Char]
type Alt
  | Alt Pat Rhs
"""

_SCHEMA: Optional[Schema] = None


def bench_schema() -> Schema:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = parse_schema(BENCH_SCHEMA_TEXT, prelude())
    return _SCHEMA


def inc(x):
    return PInt(x.value + 1)


# ---------------------------------------------------------------------------
# Inputs


def make_tree(size: int, rng: random.Random):
    """Balanced tree with about ``size`` constructor nodes."""
    leaves = max(1, (size + 1) // 2)
    counter = iter(range(leaves))

    def go(n):
        if n == 1:
            return Ctor("Leaf", (PInt(next(counter)),))
        half = n // 2
        return Ctor("Branch", (go(half), go(n - half)))

    return go(leaves)


def make_logic(size: int, rng: random.Random):
    """Random formula with ``size`` Logic constructors."""

    def go(n):
        if n <= 1:
            if rng.random() < 0.8:
                return Ctor("LVar", (PInt(rng.randrange(100)),))
            return Ctor("LConst", (Ctor(rng.choice(["False", "True"]), ()),))
        if n == 2 or rng.random() < 0.15:
            return Ctor("Not", (go(n - 1),))
        left = rng.randint(1, n - 2)
        return Ctor(rng.choice(["And", "Or", "Impl"]), (go(left), go(n - 1 - left)))

    return go(size)


def _name(rng, lo=6, hi=12):
    return from_list([PChar(rng.choice("abcdefghijklmnopqrstuvwxyz")) for _ in range(rng.randint(lo, hi))])


def _ty(rng, depth=0):
    r = rng.random()
    if depth >= 3 or r < 0.3:
        return Ctor(rng.choice(["TyCon", "TyVar"]), (_name(rng),))
    if r < 0.6:
        return Ctor("TyApp", (_ty(rng, depth + 1), _ty(rng, depth + 1)))
    if r < 0.85:
        return Ctor("TyFun", (_ty(rng, depth + 1), _ty(rng, depth + 1)))
    return Ctor("TyList", (_ty(rng, depth + 1),))


def _lit(rng):
    r = rng.random()
    if r < 0.6:
        return Ctor("LInt", (PInt(rng.randrange(1000)),))
    if r < 0.8:
        return Ctor("LChar", (PChar("c"),))
    return Ctor("LStr", (_name(rng, 3, 8),))


def _pat(rng, depth=0):
    r = rng.random()
    if r < 0.5 or depth >= 2:
        return Ctor("PVar", (_name(rng, 1, 4),))
    if r < 0.7:
        return Ctor("PLit", (_lit(rng),))
    if r < 0.9:
        return Ctor("PCon", (_name(rng), from_list([_pat(rng, depth + 1) for _ in range(rng.randint(0, 2))])))
    return Ctor("PWild", ())


def _expr(rng, depth=0):
    r = rng.random()
    if depth >= 2 or r < 0.3:
        return Ctor(rng.choice(["Var", "Con"]), (_name(rng, 2, 8),))
    if r < 0.45:
        return Ctor("ELit", (_lit(rng),))
    if r < 0.7:
        return Ctor("App", (_expr(rng, depth + 1), _expr(rng, depth + 1)))
    if r < 0.78:
        return Ctor("Lam", (from_list([_pat(rng)]), _expr(rng, depth + 1)))
    if r < 0.84:
        return Ctor("If", (_expr(rng, depth + 1), _expr(rng, depth + 1), _expr(rng, depth + 1)))
    if r < 0.92:
        alts = [Ctor("Alt", (_pat(rng), Ctor("Plain", (_expr(rng, depth + 1),)))) for _ in range(rng.randint(1, 2))]
        return Ctor("Case", (_expr(rng, depth + 1), from_list(alts)))
    if r < 0.96:
        return Ctor("Typed", (_expr(rng, depth + 1), _ty(rng, 1)))
    return Ctor("Let", (from_list([]), _expr(rng, depth + 1)))


def _funbind(rng):
    # one small clause: keeps the Int-bearing part of the corpus bounded
    pats = from_list([_pat(rng, 2) for _ in range(rng.randint(0, 1))])
    if rng.random() < 0.8:
        rhs = Ctor("Plain", (_expr(rng, 1),))
    else:
        rhs = Ctor("Guarded", (from_list([Ctor("Pair", (_expr(rng, 2), _expr(rng, 2)))]),))
    return Ctor("FunBind", (_name(rng), from_list([Ctor("Clause", (pats, rhs, from_list([])))])))


def _signature_or_data(rng):
    if rng.random() < 0.4:
        names = from_list([_name(rng, 8, 14) for _ in range(rng.randint(2, 4))])
        return Ctor("TypeSig", (names, _ty(rng)))
    cons = []
    for _ in range(rng.randint(3, 6)):
        cons.append(Ctor("ConDecl", (_name(rng, 8, 14), from_list([_ty(rng, 1) for _ in range(rng.randint(2, 4))]))))
    params = from_list([_name(rng, 1, 3) for _ in range(rng.randint(0, 2))])
    return Ctor("DataDecl", (_name(rng, 8, 14), params, from_list(cons)))


def make_hsmod(size: int, rng: random.Random):
    """Synthetic module of about ``size`` nodes.

    Mostly type signatures and data declarations, which hold no Int; a
    function binding with literals appears about once per 70 declarations.
    """
    from .value import node_count

    decls = [_funbind(rng)]
    total = 20 + node_count(decls[0])
    while total < size:
        d = _funbind(rng) if rng.random() < 0.015 else _signature_or_data(rng)
        total += node_count(d) + 1
        decls.append(d)
    rng.shuffle(decls)
    return Ctor("Module", (_name(rng), from_list(decls)))


# ---------------------------------------------------------------------------
# Handwritten walkers: tree


def tree_fold(v, out):
    if v.name == "Leaf":
        out.append(v.args[0])
    else:
        a = v.args
        tree_fold(a[0], out)
        tree_fold(a[1], out)


def tree_fold_counted(v, out, st):
    st[0] += 1
    if v.name == "Leaf":
        out.append(v.args[0])
        st[0] += 1
        st[1] += 1
    else:
        a = v.args
        tree_fold_counted(a[0], out, st)
        tree_fold_counted(a[1], out, st)


def tree_map(v, f):
    if v.name == "Leaf":
        return Ctor("Leaf", (f(v.args[0]),))
    a = v.args
    return Ctor("Branch", (tree_map(a[0], f), tree_map(a[1], f)))


def tree_map_counted(v, f, st):
    st[0] += 1
    if v.name == "Leaf":
        st[0] += 1
        st[1] += 1
        return Ctor("Leaf", (f(v.args[0]),))
    a = v.args
    return Ctor("Branch", (tree_map_counted(a[0], f, st), tree_map_counted(a[1], f, st)))


# ---------------------------------------------------------------------------
# Handwritten walkers: logic


def logic_fold(v, out):
    n = v.name
    if n == "LVar":
        out.append(v.args[0])
    elif n == "Not":
        logic_fold(v.args[0], out)
    elif n != "LConst":
        a = v.args
        logic_fold(a[0], out)
        logic_fold(a[1], out)


def logic_fold_counted(v, out, st):
    st[0] += 1
    n = v.name
    if n == "LVar":
        out.append(v.args[0])
        st[0] += 1
        st[1] += 1
    elif n == "LConst":
        st[2] += 1
    elif n == "Not":
        logic_fold_counted(v.args[0], out, st)
    else:
        a = v.args
        logic_fold_counted(a[0], out, st)
        logic_fold_counted(a[1], out, st)


def logic_map(v, f):
    n = v.name
    if n == "LVar":
        return Ctor("LVar", (f(v.args[0]),))
    if n == "LConst":
        return v
    if n == "Not":
        return Ctor("Not", (logic_map(v.args[0], f),))
    a = v.args
    return Ctor(n, (logic_map(a[0], f), logic_map(a[1], f)))


def logic_map_counted(v, f, st):
    st[0] += 1
    n = v.name
    if n == "LVar":
        st[0] += 1
        st[1] += 1
        return Ctor("LVar", (f(v.args[0]),))
    if n == "LConst":
        st[2] += 1
        return v
    if n == "Not":
        return Ctor("Not", (logic_map_counted(v.args[0], f, st),))
    a = v.args
    return Ctor(n, (logic_map_counted(a[0], f, st), logic_map_counted(a[1], f, st)))


# ---------------------------------------------------------------------------
# Handwritten walkers: hsmod
#
# One set of functions serves both modes: ``f`` is None for a fold (foci
# go to ``out``) and a function for a map (the rebuilt value is returned).
# Names, type signatures and data declarations hold no Int and are skipped.


class _HsWalk:
    def __init__(self, f, out, st):
        self.f = f
        self.out = out
        self.st = st

    def lst(self, v, item):
        st = self.st
        items = []
        while v.name == "Cons":
            st[0] += 1
            a = v.args
            items.append(item(a[0]))
            v = a[1]
        st[0] += 1
        if self.f is None:
            return None
        out = v
        for x in reversed(items):
            out = Ctor("Cons", (x, out))
        return out

    def module(self, v):
        self.st[0] += 1
        self.st[2] += 1
        a = v.args
        return Ctor("Module", (a[0], self.lst(a[1], self.decl)))

    def decl(self, v):
        st = self.st
        st[0] += 1
        a = v.args
        if v.name == "FunBind":
            st[2] += 1
            return Ctor("FunBind", (a[0], self.lst(a[1], self.clause)))
        st[2] += len(a)
        return v

    def clause(self, v):
        self.st[0] += 1
        a = v.args
        return Ctor("Clause", (self.lst(a[0], self.pat), self.rhs(a[1]), self.lst(a[2], self.decl)))

    def pat(self, v):
        st = self.st
        st[0] += 1
        n = v.name
        a = v.args
        if n == "PVar":
            st[2] += 1
            return v
        if n == "PLit":
            return Ctor("PLit", (self.lit(a[0]),))
        if n == "PCon":
            st[2] += 1
            return Ctor("PCon", (a[0], self.lst(a[1], self.pat)))
        return v

    def lit(self, v):
        st = self.st
        st[0] += 1
        if v.name == "LInt":
            st[0] += 1
            st[1] += 1
            x = v.args[0]
            if self.f is None:
                self.out.append(x)
                return v
            return Ctor("LInt", (self.f(x),))
        st[2] += 1
        return v

    def rhs(self, v):
        self.st[0] += 1
        a = v.args
        if v.name == "Plain":
            return Ctor("Plain", (self.expr(a[0]),))
        return Ctor("Guarded", (self.lst(a[0], self.guard),))

    def guard(self, v):
        self.st[0] += 1
        a = v.args
        return Ctor("Pair", (self.expr(a[0]), self.expr(a[1])))

    def alt(self, v):
        self.st[0] += 1
        a = v.args
        return Ctor("Alt", (self.pat(a[0]), self.rhs(a[1])))

    def expr(self, v):
        st = self.st
        st[0] += 1
        n = v.name
        a = v.args
        if n == "Var" or n == "Con":
            st[2] += 1
            return v
        if n == "ELit":
            return Ctor("ELit", (self.lit(a[0]),))
        if n == "App":
            return Ctor("App", (self.expr(a[0]), self.expr(a[1])))
        if n == "Lam":
            return Ctor("Lam", (self.lst(a[0], self.pat), self.expr(a[1])))
        if n == "Let":
            return Ctor("Let", (self.lst(a[0], self.decl), self.expr(a[1])))
        if n == "If":
            return Ctor("If", (self.expr(a[0]), self.expr(a[1]), self.expr(a[2])))
        if n == "Case":
            return Ctor("Case", (self.expr(a[0]), self.lst(a[1], self.alt)))
        st[2] += 1
        return Ctor("Typed", (self.expr(a[0]), a[1]))


def hsmod_fold(v, out, st=None):
    _HsWalk(None, out, st if st is not None else [0, 0, 0]).module(v)


def hsmod_map(v, f, st=None):
    return _HsWalk(f, None, st if st is not None else [0, 0, 0]).module(v)


# ---------------------------------------------------------------------------
# Suites


@dataclass(frozen=True)
class Suite:
    name: str
    root: str
    make: Callable
    hand_fold: Callable
    hand_fold_counted: Callable
    hand_map: Callable
    hand_map_counted: Callable
    default_size: int

    @property
    def ty(self) -> TypeExpr:
        return parse_type(self.root)


SUITES = {
    "tree": Suite("tree", "Tree Int", make_tree, tree_fold, tree_fold_counted, tree_map, tree_map_counted, 2 ** 15),
    "logic": Suite("logic", "Logic", make_logic, logic_fold, logic_fold_counted, logic_map, logic_map_counted, 2 ** 15),
    "hsmod": Suite("hsmod", "Module", make_hsmod, hsmod_fold, hsmod_fold, hsmod_map, hsmod_map, 10 ** 4),
}
ENGINES = ("plan", "naive", "hand")
MODES = ("fold", "map")
CSV_COLUMNS = ("suite", "engine", "size", "mode", "mean_ns", "nodesVisited")


class BenchError(Exception):
    pass


def make_input(suite: Suite, size: int, seed: int = 0):
    return suite.make(size, random.Random(seed))


def runner(suite: Suite, engine: str, mode: str, counted: bool, cache: Optional[PlanCache] = None):
    """A one-argument callable running ``engine`` on an input; counted
    runners return ``(result, nodes_visited)``."""
    schema = bench_schema()
    ty = suite.ty
    if engine == "plan":
        plan = compile_plan(schema, cache or PlanCache(), ty, ByType(INT))
        m = Fold() if mode == "fold" else MapPure(inc)
        if counted:
            def run(v):
                st = VisitStats()
                return run_plan(plan, m, v, stats=st), st.nodes_visited
            return run
        return lambda v: run_plan(plan, m, v)
    if engine == "naive":
        m = Fold() if mode == "fold" else MapPure(inc)
        if counted:
            def run_n(v):
                st = VisitStats()
                return naive_traverse(schema, v, ty, ByType(INT), m, st), st.nodes_visited
            return run_n
        return lambda v: naive_traverse(schema, v, ty, ByType(INT), m)
    if engine == "hand":
        if mode == "fold":
            if counted:
                def run_hf(v):
                    out, st = [], [0, 0, 0]
                    suite.hand_fold_counted(v, out, st)
                    return out, st[0]
                return run_hf

            def run_hf_fast(v):
                out = []
                suite.hand_fold(v, out)
                return out
            return run_hf_fast
        if counted:
            def run_hm(v):
                st = [0, 0, 0]
                return suite.hand_map_counted(v, inc, st), st[0]
            return run_hm
        return lambda v: suite.hand_map(v, inc)
    raise BenchError(f"unknown engine {engine!r}; expected one of {', '.join(ENGINES)}")


def time_ns(fn: Callable, v, reps: int) -> int:
    fn(v)  # warm-up: compiles plans and fills caches
    total = 0
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn(v)
        total += time.perf_counter_ns() - t0
    return total // reps


def run_bench(
    suites: Iterable[str],
    sizes: Optional[Iterable[int]] = None,
    engines: Iterable[str] = ENGINES,
    reps: int = 5,
    modes: Iterable[str] = MODES,
    seed: int = 0,
) -> list[dict]:
    rows: list[dict] = []
    if reps <= 0:
        return rows
    engines = list(engines)
    for e in engines:
        if e not in ENGINES:
            raise BenchError(f"unknown engine {e!r}; expected one of {', '.join(ENGINES)}")
    for name in suites:
        suite = SUITES.get(name)
        if suite is None:
            raise BenchError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)} or all")
        for size in list(sizes) if sizes else [suite.default_size]:
            v = make_input(suite, size, seed)
            for mode in modes:
                for engine in engines:
                    mean = run_deep(time_ns, runner(suite, engine, mode, False), v, reps)
                    _, nodes = run_deep(runner(suite, engine, mode, True), v)
                    rows.append(
                        {"suite": name, "engine": engine, "size": size, "mode": mode, "mean_ns": mean, "nodesVisited": nodes}
                    )
    return rows


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def normalized_table(rows: list[dict]) -> str:
    """Each engine's mean time divided by the handwritten walker's."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["suite"], r["size"], r["mode"]), {})[r["engine"]] = r
    lines = [f"{'suite':<8}{'size':>8}  {'mode':<5}" + "".join(f"{e:>10}" for e in ENGINES)]
    for (suite, size, mode), by_engine in groups.items():
        hand = by_engine.get("hand")
        cells = []
        for e in ENGINES:
            r = by_engine.get(e)
            if r is None or hand is None or hand["mean_ns"] == 0:
                cells.append(f"{'-':>10}")
            else:
                cells.append(f"{r['mean_ns'] / hand['mean_ns']:>9.2f}x")
        lines.append(f"{suite:<8}{size:>8}  {mode:<5}" + "".join(cells))
    return "\n".join(lines)


__all__ = [
    "BENCH_SCHEMA_TEXT", "bench_schema", "SUITES", "ENGINES", "MODES", "CSV_COLUMNS", "Suite", "BenchError",
    "make_input", "make_tree", "make_logic", "make_hsmod", "runner", "time_ns", "run_bench", "to_csv",
    "normalized_table",
]
