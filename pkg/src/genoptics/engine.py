"""Reachability analysis, traversal plans and the naive baseline engine.

A plan is a graph of ``Descend`` nodes whose per-constructor children are
``FOCUS`` (apply the action, do not descend), ``SKIP`` (leave untouched) or
another plan node. Plans are memoized per (type, query) and may be cyclic.
Each plan graph is turned into Python source once per execution mode and
``exec``'d, so that running a plan costs about as much as a handwritten
recursive walker.
"""
from __future__ import annotations

import itertools
import sys
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .effects import EffectInterface
from .rep import index_params
from .schema import App, ParamTag, Prim, Schema, TypeExpr, is_primitive, show_type, substitute
from .value import Ctor

DEFAULT_DEPTH_BOUND = 64


class DepthExceeded(Exception):
    def __init__(self, ty: TypeExpr, bound: int):
        self.ty = ty
        self.bound = bound
        super().__init__(f"type analysis of {_short(ty)} exceeded depth bound {bound}")


class InterestingDepthWarning(UserWarning):
    pass


def _short(ty: TypeExpr, limit: int = 80) -> str:
    # instantiations under polymorphic recursion grow exponentially when printed
    text = show_type(ty) if _size_at_most(ty, limit) else f"{_head(ty)} ..."
    return text if len(text) <= limit else text[: limit - 4] + " ..."


def _size_at_most(ty, limit):
    stack = [ty]
    n = 0
    while stack:
        t = stack.pop()
        n += 1
        if n > limit:
            return False
        if isinstance(t, App):
            stack.extend(t.args)
        elif isinstance(t, ParamTag):
            stack.append(t.inner)
    return True


def _head(ty):
    while isinstance(ty, ParamTag):
        ty = ty.inner
    return getattr(ty, "name", "?")


def _strip(ty: TypeExpr) -> TypeExpr:
    while isinstance(ty, ParamTag):
        ty = ty.inner
    return ty


# ---------------------------------------------------------------------------
# Queries


@dataclass(frozen=True)
class ByType:
    a: TypeExpr

    def matches(self, ty: TypeExpr) -> bool:
        return ty is self.a

    def show(self) -> str:
        return f"types {show_type(self.a)}"


@dataclass(frozen=True)
class ByParam:
    """Matches fields typed ``ParamTag(i, a)`` in the indexed view."""

    i: int
    a: TypeExpr
    b: TypeExpr

    def matches(self, ty: TypeExpr) -> bool:
        return type(ty) is ParamTag and ty.index == self.i and ty.inner is self.a

    def show(self) -> str:
        return f"param {self.i}"


Query = Union[ByType, ByParam]


def as_query(q) -> Query:
    if isinstance(q, (ByType, ByParam)):
        return q
    if isinstance(q, TypeExpr):
        return ByType(q)
    raise TypeError(f"not a query: {q!r}")


def root_type(ty: TypeExpr, q: Query) -> TypeExpr:
    """The type a traversal for ``q`` starts from: indexed for parameter queries."""
    if isinstance(q, ByParam) and not (isinstance(ty, App) and ty.args and isinstance(ty.args[0], ParamTag)):
        return index_params(ty).tagged
    return ty


# ---------------------------------------------------------------------------
# Interesting


def interesting(
    schema: Schema,
    ty: TypeExpr,
    a,
    seen=None,
    depth_bound: int = DEFAULT_DEPTH_BOUND,
    trace: Optional[list] = None,
) -> bool:
    """Whether a value of ``ty`` can contain a field matching ``a``.

    Types in ``seen`` (by default just ``ty``) are never expanded. Every
    branch is explored, so a divergent instantiation chain raises
    ``DepthExceeded`` even if a match exists elsewhere. ``trace`` receives
    one ``(type, path)`` entry per expansion, ``path`` being the types
    currently being expanded.
    """
    q = as_query(a)
    start = _strip(ty)
    if isinstance(start, Prim):
        return False
    explored = set(seen) if seen is not None else {ty}
    explored.add(start)

    def go(t, path):
        if len(path) > depth_bound:
            raise DepthExceeded(ty, depth_bound)
        if trace is not None:
            trace.append((t, path))
        found = False
        for c in schema.instantiate(t):
            for f in c.fields:
                ft = f.ty
                if q.matches(ft):
                    found = True
                    continue
                inner = _strip(ft)
                if isinstance(inner, Prim) or inner in explored:
                    continue
                explored.add(inner)
                if go(inner, path + (inner,)):
                    found = True
        return found

    return go(start, (start,))


def reachable_types(schema: Schema, ty: TypeExpr, limit: int = 10_000) -> set:
    """Distinct non-primitive ground types reachable from ``ty`` through fields."""
    start = _strip(ty)
    out = set()
    if isinstance(start, Prim):
        return out
    stack = [start]
    out.add(start)
    while stack:
        t = stack.pop()
        for c in schema.instantiate(t):
            for f in c.fields:
                inner = _strip(f.ty)
                if not isinstance(inner, Prim) and inner not in out:
                    if len(out) >= limit:
                        raise DepthExceeded(ty, limit)
                    out.add(inner)
                    stack.append(inner)
    return out


# ---------------------------------------------------------------------------
# Plans


class PlanNode:
    __slots__ = ()
    kind = "?"


class _Focus(PlanNode):
    __slots__ = ()
    kind = "FocusLeaf"

    def __repr__(self):
        return "FOCUS"


class _Skip(PlanNode):
    __slots__ = ()
    kind = "SkipLeaf"

    def __repr__(self):
        return "SKIP"


FOCUS = _Focus()
SKIP = _Skip()


class Descend(PlanNode):
    __slots__ = ("id", "ty", "query", "ctors", "cache", "complete")
    kind = "Descend"

    def __init__(self, id_: int, ty: TypeExpr, query: Query, cache: "PlanCache"):
        self.id = id_
        self.ty = ty
        self.query = query
        self.ctors: list[tuple[str, list[PlanNode]]] = []
        self.cache = cache
        self.complete = False

    def children(self, name: str) -> list:
        for n, kids in self.ctors:
            if n == name:
                return kids
        raise KeyError(name)

    def __repr__(self):
        return f"<Descend #{self.id} {_short(self.ty)}>"


class Lazy(PlanNode):
    """A child whose compilation is deferred until execution first reaches it."""

    __slots__ = ("id", "ty", "query", "schema", "cache", "depth", "prune", "target")
    kind = "Lazy"

    def __init__(self, id_, ty, query, schema, cache, depth, prune):
        self.id = id_
        self.ty = ty
        self.query = query
        self.schema = schema
        self.cache = cache
        self.depth = depth
        self.prune = prune
        self.target: Optional[PlanNode] = None

    def force(self) -> PlanNode:
        if self.target is None:
            if self.depth > self.cache.depth_bound:
                raise DepthExceeded(self.ty, self.cache.depth_bound)
            with self.cache.lock:
                if self.target is None:
                    self.target = _compile(self.schema, self.cache, self.ty, self.query, self.depth, self.prune)
        return self.target

    def __repr__(self):
        return f"<Lazy #{self.id} {_short(self.ty)}>"


@dataclass
class VisitStats:
    nodes_visited: int = 0
    foci_applied: int = 0
    subtrees_pruned: int = 0

    def add(self, counts) -> None:
        self.nodes_visited += counts[0]
        self.foci_applied += counts[1]
        self.subtrees_pruned += counts[2]


class PlanCache:
    def __init__(self, depth_bound: int = DEFAULT_DEPTH_BOUND):
        self.depth_bound = depth_bound
        self.nodes: dict = {}
        self.verdicts: dict = {}
        self.in_progress: set = set()
        self.warnings: list[str] = []
        self.lock = threading.RLock()
        self._ids = itertools.count()
        self._programs: dict = {}
        self._warned: set = set()

    def __len__(self) -> int:
        return len(self.nodes)

    def next_id(self) -> int:
        return next(self._ids)

    def verdict(self, schema: Schema, ty: TypeExpr, q: Query) -> Optional[bool]:
        """Cached ``interesting`` for a field type; None when the depth bound was hit."""
        key = (ty, q)
        if key in self.verdicts:
            return self.verdicts[key]
        try:
            v = interesting(schema, ty, q, depth_bound=self.depth_bound)
        except DepthExceeded:
            v = None
            msg = (
                f"depth bound {self.depth_bound} exceeded while analysing {_short(ty)} "
                f"for {_short_query(q)}; treating it as interesting"
            )
            self.warnings.append(msg)
            # one warning per type constructor and query; deeper instantiations repeat it
            if (_head(ty), q) not in self._warned:
                self._warned.add((_head(ty), q))
                warnings.warn(msg, InterestingDepthWarning, stacklevel=3)
        self.verdicts[key] = v
        return v


def _short_query(q: Query) -> str:
    return q.show()


def compile_plan(
    schema: Schema,
    cache: PlanCache,
    ty: TypeExpr,
    q,
    prune: bool = True,
) -> PlanNode:
    """Compile (or fetch) the plan for traversing ``ty`` with query ``q``.

    Parameter queries are compiled over the indexed view of ``ty``. With
    ``prune=False`` only primitives are skipped; this exists to check that
    pruning never changes results.
    """
    q = as_query(q)
    with cache.lock:
        return _compile(schema, cache, root_type(ty, q), q, 0, prune)


def _compile(schema, cache, ty, q, depth, prune):
    key = (ty, q, prune)
    node = cache.nodes.get(key)
    if node is not None:
        return node
    if is_primitive(ty) or (prune and cache.verdict(schema, _strip(ty), q) is False):
        cache.nodes[key] = SKIP
        return SKIP
    node = Descend(cache.next_id(), ty, q, cache)
    cache.nodes[key] = node
    cache.in_progress.add(key)
    try:
        for c in schema.instantiate(ty):
            kids = []
            for f in c.fields:
                kids.append(_child(schema, cache, f.ty, q, depth, prune))
            node.ctors.append((c.name, kids))
    except BaseException:
        del cache.nodes[key]
        raise
    finally:
        cache.in_progress.discard(key)
    node.complete = True
    return node


def _child(schema, cache, ft, q, depth, prune):
    if q.matches(ft):
        return FOCUS
    inner = _strip(ft)
    if isinstance(inner, Prim):
        return SKIP
    key = (inner, q, prune)
    hit = cache.nodes.get(key)
    if hit is not None:
        return hit
    if prune:
        v = cache.verdict(schema, inner, q)
        if v is False:
            cache.nodes[key] = SKIP
            return SKIP
        if v is None:
            return Lazy(cache.next_id(), inner, q, schema, cache, depth + 1, prune)
    if len(cache.in_progress) >= cache.depth_bound:
        return Lazy(cache.next_id(), inner, q, schema, cache, depth + 1, prune)
    return _compile(schema, cache, inner, q, depth, prune)


def plan_nodes(root: PlanNode) -> list[Descend]:
    """Descend nodes reachable from ``root`` without forcing lazy children."""
    out = []
    seen = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if isinstance(n, Lazy) and n.target is not None:
            n = n.target
        if not isinstance(n, Descend) or n.id in seen:
            continue
        seen.add(n.id)
        out.append(n)
        for _name, kids in reversed(n.ctors):
            stack.extend(reversed(kids))
    return out


def show_plan(root: PlanNode) -> str:
    """Indented dump; repeated nodes print as back references ``-> #id``."""
    lines: list[str] = []
    printed: set = set()

    def go(n, indent, label):
        pad = "  " * indent
        prefix = f"{pad}{label}" if label else pad
        if isinstance(n, Lazy):
            if n.target is None:
                lines.append(f"{prefix}Lazy {_short(n.ty)} (compiled on demand)")
                return
            n = n.target
        if not isinstance(n, Descend):
            lines.append(f"{prefix}{n.kind}")
            return
        if n.id in printed:
            lines.append(f"{prefix}-> #{n.id}")
            return
        printed.add(n.id)
        lines.append(f"{prefix}#{n.id} Descend {_short(n.ty)}")
        for name, kids in n.ctors:
            lines.append(f"{pad}  {name}:")
            for i, k in enumerate(kids):
                go(k, indent + 2, f"[{i}] ")

    go(root, 0, "")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Modes


@dataclass(frozen=True)
class Fold:
    pass


@dataclass(frozen=True)
class MapPure:
    f: Callable


@dataclass(frozen=True)
class Effect:
    eff: EffectInterface
    k: Callable


Mode = Union[Fold, MapPure, Effect]


# ---------------------------------------------------------------------------
# Code generation
#
# Generated signatures, where st is a 3-slot counter list in instrumented
# programs and absent otherwise:
#   fold:   f<id>(v, out[, st]) -> None
#   map:    m<id>(v, f[, st]) -> Value
#   effect: e<id>(v, k, P, F, A[, st]) -> EffValue


class _Program:
    def __init__(self, cache: PlanCache, mode: str, instrumented: bool):
        self.cache = cache
        self.mode = mode
        self.instrumented = instrumented
        self.ns: dict = {"C": Ctor, "__builtins__": __builtins__}
        self.done: set = set()
        self.lock = threading.RLock()

    def fname(self, node: PlanNode) -> str:
        return f"{self.mode[0]}{node.id}"

    def entry(self, node: PlanNode) -> Callable:
        with self.lock:
            if isinstance(node, Lazy):
                node = node.force()
            if not isinstance(node, Descend):
                return self._leaf_fn(node)
            if node.id not in self.done:
                self._generate(node)
            return self.ns[self.fname(node)]

    def _leaf_fn(self, node):
        # only SKIP reaches here: roots are never foci
        pruned = self.instrumented
        if self.mode == "fold":
            if pruned:
                def skip(v, out, st):
                    st[2] += 1
                return skip
            return lambda v, out: None
        if self.mode == "map":
            if pruned:
                def skip_m(v, f, st):
                    st[2] += 1
                    return v
                return skip_m
            return lambda v, f: v
        if pruned:
            def skip_e(v, k, P, F, A, st):
                st[2] += 1
                return P(v)
            return skip_e
        return lambda v, k, P, F, A: P(v)

    def _lazy_stub(self, lazy: Lazy) -> str:
        name = f"z{lazy.id}"
        if name in self.ns:
            return name
        prog = self

        def stub(*args):
            fn = prog.entry(lazy)
            prog.ns[name] = fn
            return fn(*args)

        self.ns[name] = stub
        return name

    def _generate(self, root: Descend) -> None:
        src: list[str] = []
        for node in plan_nodes(root):
            if node.id in self.done:
                continue
            self.done.add(node.id)
            getattr(self, f"_gen_{self.mode}")(node, src)
        exec(compile("\n".join(src), f"<plan {self.mode} #{root.id}>", "exec"), self.ns)

    def _ref(self, kid) -> str:
        if isinstance(kid, Lazy):
            if kid.target is not None and isinstance(kid.target, Descend):
                return self.fname(kid.target)
            return self._lazy_stub(kid)
        return self.fname(kid)

    def _gen_fold(self, node: Descend, src: list) -> None:
        inst = self.instrumented
        st = ", st" if inst else ""
        src.append(f"def {self.fname(node)}(v, out{st}):")
        if inst:
            src.append("    st[0] += 1")
        branches = []
        for name, kids in node.ctors:
            body = []
            pruned = 0
            for i, kid in enumerate(kids):
                if kid is FOCUS:
                    body.append(f"out.append(a[{i}])")
                    if inst:
                        body.append("st[0] += 1; st[1] += 1")
                elif kid is SKIP or (isinstance(kid, Lazy) and kid.target is SKIP):
                    pruned += 1
                else:
                    body.append(f"{self._ref(kid)}(a[{i}], out{st})")
            if inst and pruned:
                body.append(f"st[2] += {pruned}")
            if body:
                branches.append((name, body))
        self._emit_dispatch(src, branches, tail=None)

    def _gen_map(self, node: Descend, src: list) -> None:
        inst = self.instrumented
        st = ", st" if inst else ""
        src.append(f"def {self.fname(node)}(v, f{st}):")
        if inst:
            src.append("    st[0] += 1")
        branches = []
        for name, kids in node.ctors:
            parts = []
            pruned = 0
            active = False
            for i, kid in enumerate(kids):
                if kid is FOCUS:
                    parts.append(f"f(a[{i}])")
                    active = True
                elif kid is SKIP or (isinstance(kid, Lazy) and kid.target is SKIP):
                    parts.append(f"a[{i}]")
                    pruned += 1
                else:
                    parts.append(f"{self._ref(kid)}(a[{i}], f{st})")
                    active = True
            body = []
            if inst:
                nf = sum(1 for k in kids if k is FOCUS)
                if nf:
                    body.append(f"st[0] += {nf}; st[1] += {nf}")
                if pruned:
                    body.append(f"st[2] += {pruned}")
            if active:
                body.append(f"return C({name!r}, ({', '.join(parts)},))")
                branches.append((name, body))
            elif body:
                body.append("return v")
                branches.append((name, body))
        self._emit_dispatch(src, branches, tail="return v")

    def _gen_effect(self, node: Descend, src: list) -> None:
        inst = self.instrumented
        st = ", st" if inst else ""
        src.append(f"def {self.fname(node)}(v, k, P, F, A{st}):")
        if inst:
            src.append("    st[0] += 1")
        branches = []
        for name, kids in node.ctors:
            effs = []  # expressions producing effect values, left to right
            slots = []
            pruned = 0
            for i, kid in enumerate(kids):
                if kid is FOCUS:
                    slots.append(f"x{len(effs)}")
                    effs.append(f"k(a[{i}])")
                elif kid is SKIP or (isinstance(kid, Lazy) and kid.target is SKIP):
                    slots.append(f"a[{i}]")
                    pruned += 1
                else:
                    slots.append(f"x{len(effs)}")
                    effs.append(f"{self._ref(kid)}(a[{i}], k, P, F, A{st})")
            body = []
            if inst:
                nf = sum(1 for k in kids if k is FOCUS)
                if nf:
                    body.append(f"st[0] += {nf}; st[1] += {nf}")
                if pruned:
                    body.append(f"st[2] += {pruned}")
            if effs:
                rebuild = f"C({name!r}, ({', '.join(slots)},))"
                lam = "".join(f"lambda x{j}: " for j in range(len(effs))) + rebuild
                expr = f"F({lam}, {effs[0]})"
                for e in effs[1:]:
                    expr = f"A({expr}, {e})"
                body.append(f"return {expr}")
                branches.append((name, body))
            elif body:
                body.append("return P(v)")
                branches.append((name, body))
        self._emit_dispatch(src, branches, tail="return P(v)")

    @staticmethod
    def _emit_dispatch(src, branches, tail):
        if not branches:
            src.append(f"    {tail or 'return None'}")
            src.append("")
            return
        src.append("    n = v.name")
        for j, (name, body) in enumerate(branches):
            kw = "if" if j == 0 else "elif"
            src.append(f"    {kw} n == {name!r}:")
            src.append("        a = v.args")
            for line in body:
                src.append(f"        {line}")
        if tail:
            src.append(f"    {tail}")
        src.append("")


def _program(cache: PlanCache, mode: str, instrumented: bool) -> _Program:
    key = (mode, instrumented)
    prog = cache._programs.get(key)
    if prog is None:
        with cache.lock:
            prog = cache._programs.get(key)
            if prog is None:
                prog = _Program(cache, mode, instrumented)
                cache._programs[key] = prog
    return prog


def _cache_of(plan: PlanNode, cache: Optional[PlanCache]) -> PlanCache:
    if cache is not None:
        return cache
    c = getattr(plan, "cache", None)
    if c is None:
        # leaf roots carry no cache; any program table will do
        return _LEAF_CACHE
    return c


_LEAF_CACHE = PlanCache()


def compiled(plan: PlanNode, mode_kind: str, instrumented: bool = False, cache: Optional[PlanCache] = None) -> Callable:
    """The generated entry function for ``plan`` in ``mode_kind`` ("fold", "map" or "effect")."""
    return _program(_cache_of(plan, cache), mode_kind, instrumented).entry(plan)


# ---------------------------------------------------------------------------
# Deep values
#
# Generated walkers recurse once per constructor level. Values deeper than
# the interpreter's recursion limit (long lists mostly) are handled by
# rerunning on a thread with a large stack.

_DEEP_LOCK = threading.Lock()
_DEEP_STACK = 512 * 1024 * 1024
_DEEP_LIMIT = 1_000_000


def run_deep(fn: Callable, *args):
    """Call ``fn(*args)`` on a thread whose stack allows very deep recursion."""
    result: list = []
    error: list = []

    def target():
        try:
            result.append(fn(*args))
        except BaseException as e:  # re-raised on the caller's thread
            error.append(e)

    with _DEEP_LOCK:
        old_size = threading.stack_size()
        old_limit = sys.getrecursionlimit()
        threading.stack_size(_DEEP_STACK)
        sys.setrecursionlimit(max(old_limit, _DEEP_LIMIT))
        try:
            t = threading.Thread(target=target, name="deep-walk")
            t.start()
            t.join()
        finally:
            threading.stack_size(old_size)
            sys.setrecursionlimit(old_limit)
    if error:
        raise error[0]
    return result[0]


def _with_retry(call: Callable, stats_snapshot: Callable):
    try:
        return call()
    except RecursionError:
        stats_snapshot()
        return run_deep(call)


# ---------------------------------------------------------------------------
# Running plans


def run_plan(plan: PlanNode, mode: Mode, v, ty: Optional[TypeExpr] = None, stats: Optional[VisitStats] = None):
    """Execute a compiled plan.

    Fold returns the list of foci, MapPure the rebuilt value and Effect the
    effect-wrapped rebuilt value. ``ty`` is accepted for symmetry with the
    naive engine and is not consulted. When ``stats`` is given the
    instrumented program runs and its counts are added to ``stats``.
    """
    inst = stats is not None
    counts = [0, 0, 0]

    def reset():
        counts[:] = [0, 0, 0]

    if isinstance(mode, Fold):
        fn = compiled(plan, "fold", inst)

        def call():
            out: list = []
            fn(v, out, counts) if inst else fn(v, out)
            return out
    elif isinstance(mode, MapPure):
        fn = compiled(plan, "map", inst)
        f = mode.f

        def call():
            return fn(v, f, counts) if inst else fn(v, f)
    elif isinstance(mode, Effect):
        fn = compiled(plan, "effect", inst)
        e = mode.eff

        def call():
            if inst:
                return fn(v, mode.k, e.pure, e.fmap, e.ap, counts)
            return fn(v, mode.k, e.pure, e.fmap, e.ap)
    else:
        raise TypeError(f"unknown mode {mode!r}")
    result = _with_retry(call, reset)
    if inst:
        stats.add(counts)
    return result


def interpret(plan: PlanNode, mode: Mode, v, stats: Optional[VisitStats] = None):
    """Straightforward recursive plan interpreter, kept as a cross-check for
    the generated code."""
    st = stats if stats is not None else VisitStats()

    def go(node, x):
        if isinstance(node, Lazy):
            node = node.force()
        if node is SKIP:
            st.subtrees_pruned += 1
            return ("skip", x)
        if node is FOCUS:
            st.nodes_visited += 1
            st.foci_applied += 1
            return ("focus", x)
        st.nodes_visited += 1
        return ("descend", x, [go(k, a) for k, a in zip(node.children(x.name), x.args)])

    tree = go(plan, v)

    if isinstance(mode, Fold):
        out = []

        def collect(t):
            if t[0] == "focus":
                out.append(t[1])
            elif t[0] == "descend":
                for c in t[2]:
                    collect(c)

        collect(tree)
        return out
    if isinstance(mode, MapPure):
        def rebuild(t):
            if t[0] == "focus":
                return mode.f(t[1])
            if t[0] == "skip":
                return t[1]
            return Ctor(t[1].name, tuple(rebuild(c) for c in t[2]))

        return rebuild(tree)
    e = mode.eff

    def seq(t):
        if t[0] == "focus":
            return mode.k(t[1])
        if t[0] == "skip":
            return e.pure(t[1])
        name = t[1].name
        acc = e.pure(())
        for c in t[2]:
            acc = e.ap(e.fmap(lambda xs: lambda y: xs + (y,), acc), seq(c))
        return e.fmap(lambda xs: Ctor(name, xs), acc)

    return seq(tree)


# ---------------------------------------------------------------------------
# Naive engine


def types_equal(s: TypeExpr, t: TypeExpr) -> bool:
    """Structural comparison that ignores interning on purpose."""
    stack = [(s, t)]
    while stack:
        x, y = stack.pop()
        if type(x) is not type(y):
            return False
        if type(x) is Prim:
            if x.name != y.name:
                return False
        elif type(x) is App:
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        elif type(x) is ParamTag:
            if x.index != y.index:
                return False
            stack.append((x.inner, y.inner))
        else:
            if x.index != y.index:
                return False
    return True


def _naive_matches(q: Query, ft: TypeExpr) -> bool:
    if isinstance(q, ByType):
        return types_equal(ft, q.a)
    return type(ft) is ParamTag and ft.index == q.i and types_equal(ft.inner, q.a)


def _naive_fields(schema: Schema, t: TypeExpr, name: str):
    base = _strip(t)
    # deliberately uncached: the baseline recomputes field types at every node
    for c in substitute(schema.lookup(base.name), base.args):
        if c.name == name:
            return c.fields
    raise KeyError(f"{name} is not a constructor of {_short(base)}")


_VISIT, _FOCUS, _BUILD = 0, 1, 2


def naive_traverse(schema: Schema, v, ty: TypeExpr, q, mode: Mode, stats: Optional[VisitStats] = None):
    """Run a query without a plan: every node is visited and type-tested.

    Matching fields are foci and are not entered. The root is never a focus.
    """
    q = as_query(q)
    root = root_type(ty, q)
    st = stats if stats is not None else VisitStats()
    if isinstance(mode, Fold):
        return _naive_fold(schema, v, root, q, st)
    if isinstance(mode, MapPure):
        return _naive_map(schema, v, root, q, mode.f, st)
    if isinstance(mode, Effect):
        foci = _naive_fold(schema, v, root, q, st)
        e = mode.eff
        acc = e.pure(None)
        for x in foci:
            acc = e.ap(e.fmap(lambda xs: lambda y: (y, xs), acc), mode.k(x))

        def finish(chain):
            ys = []
            while chain is not None:
                ys.append(chain[0])
                chain = chain[1]
            ys.reverse()
            it = iter(ys)
            return _naive_map(schema, v, root, q, lambda _x: next(it), VisitStats())

        return e.fmap(finish, acc)
    raise TypeError(f"unknown mode {mode!r}")


def _naive_fold(schema, v, root, q, st):
    out = []
    stack = [(_VISIT, v, root)]
    while stack:
        op, x, t = stack.pop()
        st.nodes_visited += 1
        if op == _FOCUS:
            st.foci_applied += 1
            out.append(x)
            continue
        if is_primitive(t):
            continue
        fs = _naive_fields(schema, t, x.name)
        for i in range(len(fs) - 1, -1, -1):
            ft = fs[i].ty
            stack.append((_FOCUS if _naive_matches(q, ft) else _VISIT, x.args[i], ft))
    return out


def _naive_map(schema, v, root, q, f, st):
    results = []
    stack = [(_VISIT, v, root)]
    while stack:
        op, x, t = stack.pop()
        if op == _BUILD:
            n = len(x.args)
            args = tuple(results[len(results) - n:]) if n else ()
            if n:
                del results[len(results) - n:]
            results.append(Ctor(x.name, args))
            continue
        st.nodes_visited += 1
        if op == _FOCUS:
            st.foci_applied += 1
            results.append(f(x))
            continue
        if is_primitive(t):
            results.append(x)
            continue
        fs = _naive_fields(schema, t, x.name)
        stack.append((_BUILD, x, None))
        for i in range(len(fs) - 1, -1, -1):
            ft = fs[i].ty
            stack.append((_FOCUS if _naive_matches(q, ft) else _VISIT, x.args[i], ft))
    return results[0]


__all__ = [
    "DEFAULT_DEPTH_BOUND", "DepthExceeded", "InterestingDepthWarning", "ByType", "ByParam", "Query",
    "as_query", "root_type", "interesting", "reachable_types", "PlanNode", "FOCUS", "SKIP", "Descend",
    "Lazy", "VisitStats", "PlanCache", "compile_plan", "plan_nodes", "show_plan", "Fold", "MapPure",
    "Effect", "compiled", "run_plan", "run_deep", "interpret", "types_equal", "naive_traverse",
]
