"""Independent reference implementations and generators shared by the tests."""
from __future__ import annotations

import random

from genoptics.derive import derive_ctor_prism, derive_position, derive_types
from genoptics.engine import ByParam, ByType
from genoptics.gen import PRIMS, random_ground, random_schema, random_value_sized
from genoptics.rep import index_params
from genoptics.schema import App, ParamTag, Prim, Schema, TypeExpr
from genoptics.value import Ctor, PChar, PFloat, PInt, PString


def strip(ty):
    while isinstance(ty, ParamTag):
        ty = ty.inner
    return ty


def closure(schema: Schema, roots) -> set:
    """Every non-primitive type reachable from ``roots`` through fields."""
    todo = [strip(r) for r in roots if not isinstance(strip(r), Prim)]
    out = set(todo)
    while todo:
        t = todo.pop()
        for c in schema.instantiate(t):
            for f in c.fields:
                u = strip(f.ty)
                if not isinstance(u, Prim) and u not in out:
                    out.add(u)
                    todo.append(u)
    return out


def field_matches(q, ft) -> bool:
    if isinstance(q, ByType):
        return ft == q.a
    return isinstance(ft, ParamTag) and ft.index == q.i and ft.inner == q.a


def reachability(schema: Schema, types, q) -> dict:
    """Least fixpoint of "has a matching field, or a non-matching field whose
    type already qualifies", computed over the whole closure at once."""
    universe = closure(schema, types)
    edges = {}
    good = set()
    for t in universe:
        succ = set()
        for c in schema.instantiate(t):
            for f in c.fields:
                if field_matches(q, f.ty):
                    good.add(t)
                elif not isinstance(strip(f.ty), Prim):
                    succ.add(strip(f.ty))
        edges[t] = succ
    changed = True
    while changed:
        changed = False
        for t in universe:
            if t not in good and edges[t] & good:
                good.add(t)
                changed = True
    return {t: t in good for t in universe}


def brute_types(schema: Schema, v, ty: TypeExpr, a: TypeExpr) -> list:
    """Foci of ``types a``: stop at matches, never the root, recursive walk."""
    out = []

    def walk(x, t):
        t = strip(t)
        if isinstance(t, Prim):
            return
        for c in schema.instantiate(t):
            if c.name == x.name:
                for arg, f in zip(x.args, c.fields):
                    if strip(f.ty) == a:
                        out.append(arg)
                    else:
                        walk(arg, f.ty)
                return
        raise AssertionError(f"{x.name} does not fit {t}")

    walk(v, ty)
    return out


def random_query(rng: random.Random, schema: Schema, ty: TypeExpr):
    """A types-query over a primitive or a reachable ADT, or a param query."""
    if isinstance(ty, App) and ty.args and rng.random() < 0.3:
        i = rng.randrange(len(ty.args))
        a = ty.args[len(ty.args) - 1 - i]
        return ByParam(i, a, a)
    pool = sorted(closure(schema, [ty]), key=repr)
    if pool and rng.random() < 0.4:
        return ByType(rng.choice(pool))
    return ByType(rng.choice(PRIMS))


def random_triple(rng: random.Random, max_types: int = 10, max_nodes: int = 200):
    s = random_schema(rng, max_types=max_types)
    ty = random_ground(rng, s, user_only=True)
    v = random_value_sized(rng, s, ty, max_nodes=max_nodes)
    return s, ty, v, random_query(rng, s, ty)


def marker(x):
    """Map action that makes every focus position visible in the output."""
    return Ctor("Hit", (x,))


def bump(x):
    """A type-preserving map action for primitive foci."""
    if isinstance(x, PInt):
        return PInt(x.value + 1)
    if isinstance(x, PFloat):
        return PFloat(x.value * 2)
    if isinstance(x, PChar):
        return PChar(x.value.upper() if x.value.islower() else x.value.lower())
    if isinstance(x, PString):
        return PString(x.value[::-1] + "!")
    return x


def indexed_root(ty, q):
    return index_params(ty).tagged if isinstance(q, ByParam) else ty


# ---------------------------------------------------------------------------
# Random derived optics


def _single_ctor(schema, ty):
    ty = strip(ty)
    if not isinstance(ty, App):
        return None
    cs = schema.instantiate(ty)
    return cs[0] if len(cs) == 1 and cs[0].fields else None


def nested_pairs(rng: random.Random, schema: Schema, depth: int):
    """A ground type with at least ``depth`` nested single-constructor layers."""
    if depth == 0:
        return random_ground(rng, schema)
    inner = nested_pairs(rng, schema, depth - 1)
    other = random_ground(rng, schema)
    args = [inner, other] if rng.random() < 0.5 else [other, inner]
    return App("Pair", args)


def random_lens_case(rng: random.Random):
    """(schema, lens, s, b) for a monomorphic position lens."""
    while True:
        s = random_schema(rng)
        ty = nested_pairs(rng, s, 1) if rng.random() < 0.3 else random_ground(rng, s, user_only=True)
        c = _single_ctor(s, ty)
        if c is None:
            continue
        k = rng.randint(1, len(c.fields))
        lens = derive_position(s, ty, k)
        return s, lens, random_value_sized(rng, s, ty), random_value_sized(rng, s, lens.a_ty)


def random_prism_case(rng: random.Random):
    """(schema, prism, s, b) for a constructor prism."""
    while True:
        s = random_schema(rng)
        ty = random_ground(rng, s, user_only=True)
        cs = s.instantiate(ty)
        if not cs:
            continue
        p = derive_ctor_prism(s, ty, rng.choice(cs).name)
        return s, p, random_value_sized(rng, s, ty), random_value_sized(rng, s, p.a_ty)


def random_lens_chain(rng: random.Random, max_depth: int = 5):
    """(schema, [lenses], s): 1..max_depth position lenses that compose."""
    depth = rng.randint(1, max_depth)
    s = random_schema(rng)
    ty = nested_pairs(rng, s, depth)
    chain = []
    cur = ty
    while len(chain) < depth:
        c = _single_ctor(s, cur)
        if c is None:
            break
        deeper = [k for k, f in enumerate(c.fields, 1) if _single_ctor(s, f.ty) is not None]
        k = rng.choice(deeper) if deeper and len(chain) < depth - 1 else rng.randint(1, len(c.fields))
        lens = derive_position(s, cur, k)
        chain.append(lens)
        cur = lens.a_ty
    return s, chain, random_value_sized(rng, s, ty)


def random_traversal_case(rng: random.Random):
    """(schema, traversal, s) for a type-preserving types-traversal."""
    s, ty, v, q = random_triple(rng)
    a = q.a if isinstance(q, ByType) else strip(q.a)
    return s, derive_types(s, ty, a), v
