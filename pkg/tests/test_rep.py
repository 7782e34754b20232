from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from genoptics.gen import random_ground, random_schema
from genoptics.rep import (
    MetaN, ParamOutOfRange, PrimitiveHasNoRep, ProdN, SumN, UnitN, VoidN, constructors, fields,
    get_param, index_params, put_param, rep_of, show_rep,
)
from genoptics.schema import App, ParamTag, Prim, TypeDef, erase_tags, parse_type, prelude, register

INT = Prim("Int")


def test_list_int_rep(shop):
    r = rep_of(shop, parse_type("List Int"))
    assert r.kind == "Data" and r.name == "List"
    nil, cons = constructors(r)
    assert (nil.name, cons.name) == ("Nil", "Cons")
    assert isinstance(nil.child, UnitN)
    assert isinstance(cons.child, ProdN)
    assert [f.ty for f in fields(cons)] == [INT, parse_type("List Int")]
    assert show_rep(r) == (
        "M ('MetaData \"List\") (M ('MetaCons \"Nil\") U :+: M ('MetaCons \"Cons\") "
        "(M ('MetaSel 'Nothing) (K Int) :×: M ('MetaSel 'Nothing) (K (List Int))))"
    )


def test_tree_rep_without_metadata(shop):
    assert show_rep(rep_of(shop, parse_type("Tree Int")), metadata=False) == "K Int :+: (K (Tree Int) :×: K (Tree Int))"


def test_sums_are_right_nested(shop):
    r = rep_of(shop, parse_type("E")).child
    assert isinstance(r, SumN) and isinstance(r.right, SumN) and not isinstance(r.left, SumN)


def test_void_type():
    s = register(prelude(), TypeDef("Void", (), ()))
    r = rep_of(s, parse_type("Void"))
    assert isinstance(r.child, VoidN)
    assert constructors(r) == []


def test_primitive_has_no_rep(shop):
    with pytest.raises(PrimitiveHasNoRep):
        rep_of(shop, INT)


def test_index_params():
    assert index_params(parse_type("Invoice Int")).tagged is App("Invoice", [ParamTag(0, INT)])
    assert index_params(parse_type("Either Int String")).tagged is App(
        "Either", [ParamTag(1, INT), ParamTag(0, Prim("String"))]
    )
    b = parse_type("Bool")
    assert index_params(b).tagged is b


def test_get_put_param():
    e = parse_type("Either Int String")
    assert get_param(e, 1) is INT
    assert get_param(parse_type("Invoice Int"), 0) is INT
    assert put_param(parse_type("Invoice Int"), 0, parse_type("(Int, Double)")) is parse_type("Invoice (Int, Double)")
    assert put_param(e, 1, Prim("Char")) is parse_type("Either Char String")
    with pytest.raises(ParamOutOfRange):
        get_param(parse_type("Bool"), 0)
    with pytest.raises(ParamOutOfRange):
        put_param(e, 2, INT)


def test_tags_reach_nested_fields(shop):
    tagged = index_params(parse_type("Poly Int String")).tagged
    _, pcons = constructors(rep_of(shop, tagged))
    a, rest = fields(pcons)
    assert a.ty is ParamTag(1, INT)
    assert rest.ty is App("Poly", [ParamTag(0, Prim("String")), ParamTag(1, INT)])


def _erase_fields(node):
    if isinstance(node, MetaN):
        return MetaN(node.kind, node.name, _erase_fields(node.child))
    if isinstance(node, (SumN, ProdN)):
        return type(node)(_erase_fields(node.left), _erase_fields(node.right))
    if hasattr(node, "ty"):
        return type(node)(erase_tags(node.ty))
    return node


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 3), st.integers(0, 10))
def test_param_round_trips_and_erasure(seed, i, pick):
    rng = random.Random(seed)
    s = random_schema(rng)
    ty = random_ground(rng, s, user_only=True)
    b = random_ground(rng, s)
    if isinstance(ty, App) and i < len(ty.args):
        assert get_param(put_param(ty, i, b), i) is b
        assert put_param(ty, i, get_param(ty, i)) is ty
    assert _erase_fields(rep_of(s, index_params(ty).tagged)) == rep_of(s, ty)
    assert rep_of(s, ty) == rep_of(s, ty)
    assert len(constructors(rep_of(s, ty))) == len(s.lookup(ty.name).ctors)
