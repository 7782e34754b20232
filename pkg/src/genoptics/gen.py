"""Random schemas, ground types and well-typed values for property tests.

Generated schemas never use polymorphic recursion: a type may refer to
itself (or to a later type) only with its own parameters in order, or to
an arity-0 type; arbitrary arguments are only passed to earlier types.
The first constructor of every type refers to primitives, parameters,
prelude types and earlier types only, so falling back to it always
terminates.
"""
from __future__ import annotations

import random

from .schema import (
    App, CtorDef, FieldDef, ParamTag, Prim, Schema, TypeDef, TypeExpr, Var, prelude, register,
)
from .value import Ctor, PChar, PFloat, PInt, PString, Value, node_count

PRIMS = [Prim("Int"), Prim("Float"), Prim("Char"), Prim("String")]


def _rand_field_type(rng: random.Random, i: int, arities: list, arity: int, base_only: bool, depth: int = 0) -> TypeExpr:
    roll = rng.random()
    if arity and roll < 0.2:
        return Var(rng.randrange(arity))
    if roll < 0.45 or depth >= 2:
        return rng.choice(PRIMS) if not arity or rng.random() < 0.7 else Var(rng.randrange(arity))
    if roll < 0.65:
        name = rng.choice(["List", "Maybe", "Pair", "Either"])
        n = {"List": 1, "Maybe": 1, "Pair": 2, "Either": 2}[name]
        return App(name, [_rand_field_type(rng, i, arities, arity, base_only, depth + 1) for _ in range(n)])
    # a user type
    if base_only:
        if i == 0:
            return rng.choice(PRIMS)
        j = rng.randrange(i)
        return App(f"T{j}", [_rand_field_type(rng, i, arities, arity, True, depth + 1) for _ in range(arities[j])])
    j = rng.randrange(len(arities))
    if j < i:
        return App(f"T{j}", [_rand_field_type(rng, i, arities, arity, False, depth + 1) for _ in range(arities[j])])
    if j == i:
        return App(f"T{i}", [Var(k) for k in range(arity)])
    if arities[j] == 0:
        return App(f"T{j}", [])
    # later parameterised type: only with ground primitive arguments
    return App(f"T{j}", [rng.choice(PRIMS) for _ in range(arities[j])])


def random_schema(rng: random.Random, max_types: int = 10, max_arity: int = 2) -> Schema:
    n = rng.randint(1, max_types)
    arities = [rng.randint(0, max_arity) if rng.random() < 0.5 else 0 for _ in range(n)]
    s = prelude()
    for i in range(n):
        arity = arities[i]
        ctors = []
        for c in range(rng.randint(1, 4)):
            nf = rng.randint(0, 3)
            fields = tuple(
                FieldDef(None, _rand_field_type(rng, i, arities, arity, base_only=(c == 0))) for _ in range(nf)
            )
            ctors.append(CtorDef(f"C{i}_{c}", fields))
        params = tuple("abcdefgh"[k] for k in range(arity))
        s = register(s, TypeDef(f"T{i}", params, tuple(ctors)))
    return s


def user_types(schema: Schema) -> list[TypeDef]:
    return [d for d in schema if not schema.is_prelude(d.name)]


def random_ground(rng: random.Random, schema: Schema, depth: int = 0, user_only: bool = False) -> TypeExpr:
    """A random ground type over the schema's definitions."""
    defs = user_types(schema)
    if not user_only and (depth >= 2 or rng.random() < 0.4):
        return rng.choice(PRIMS)
    if not user_only and rng.random() < 0.25:
        name = rng.choice(["List", "Maybe", "Pair", "Either"])
    else:
        name = rng.choice(defs).name
    d = schema.lookup(name)
    return App(name, [random_ground(rng, schema, depth + 1) for _ in range(d.arity)])


def _prim_value(rng: random.Random, ty: Prim) -> Value:
    if ty.name == "Int":
        return PInt(rng.randint(-50, 50))
    if ty.name in ("Float", "Double"):
        # multiples of 1/4 keep arithmetic exact
        return PFloat(rng.randint(-200, 200) / 4)
    if ty.name == "Char":
        return PChar(rng.choice("abcxyz"))
    return PString("".join(rng.choice("abcxyz") for _ in range(rng.randint(0, 4))))


def random_value(rng: random.Random, schema: Schema, ty: TypeExpr, budget: int = 60) -> Value:
    """A value of ``ty``. Past ``budget`` constructors every choice falls back
    to the first constructor, which terminates by construction."""
    left = [budget]

    def go(t):
        while isinstance(t, ParamTag):
            t = t.inner
        if isinstance(t, Prim):
            return _prim_value(rng, t)
        ctors = schema.instantiate(t)
        left[0] -= 1
        if left[0] > 0:
            c = rng.choice(ctors)
        else:
            c = ctors[0]
        return Ctor(c.name, tuple(go(f.ty) for f in c.fields))

    return go(ty)


def random_value_sized(rng: random.Random, schema: Schema, ty: TypeExpr, max_nodes: int = 200, budget: int = 60) -> Value:
    while True:
        v = random_value(rng, schema, ty, budget)
        if node_count(v) <= max_nodes:
            return v
        budget = max(1, budget // 2)


__all__ = ["PRIMS", "random_schema", "user_types", "random_ground", "random_value", "random_value_sized"]
