from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from genoptics import bench
from genoptics.derive import (
    DeriveError, Instance, derive_constraints, derive_ctor_prism, derive_field, derive_param, derive_position,
    derive_sub_prism, derive_super, derive_typed, derive_typed_prism, derive_types, has_types_table,
)
from genoptics.effects import STATE, label, run_state
from genoptics.gen import random_ground, random_schema, random_value_sized
from genoptics.optics import Focus, Lens, Prism, Traversal, match, over, to_list_of, traverse_of, update, view
from genoptics.schema import parse_schema, parse_type, prelude
from genoptics.value import PInt, PString, parse_value

from goldens import error_cases, golden_cases
from oracles import bump

T = parse_type


@pytest.mark.parametrize("case", golden_cases(), ids=lambda c: c[0])
def test_worked_example(case):
    _, thunk, expected = case
    assert thunk() == expected


@pytest.mark.parametrize("case", error_cases(), ids=lambda c: c[0])
def test_error_message(case):
    _, thunk, expected = case
    with pytest.raises(DeriveError) as ei:
        thunk()
    assert ei.value.message == expected
    assert str(ei.value) == expected


def _code(thunk):
    with pytest.raises(DeriveError) as ei:
        thunk()
    return ei.value.code


def test_error_codes(shop):
    s = shop
    odd = parse_schema(
        "type Twice a\n  | Twice a a\ntype Amb\n  | A1 Int\n  | A2 Int\n"
        "type Shape\n  | Circle r:Int\n  | Square side:Int\n",
        prelude(),
    )
    assert _code(lambda: derive_field(odd, T("Shape"), "r")) == "MultiConstructor"
    assert _code(lambda: derive_field(s, T("Tree Int"), "x")) == "NoSuchField"
    assert _code(lambda: derive_field(s, T("IntPair Int"), "x")) == "NotARecord"
    assert _code(lambda: derive_field(s, T("Int"), "x")) == "NotAnAlgebraicType"
    assert _code(lambda: derive_field(s, T("Nope"), "x")) == "UnknownType"
    assert _code(lambda: derive_typed(s, T("Item"), T("Weight"))) == "TypeAbsent"
    assert _code(lambda: derive_typed(s, T("Invoice Int"), T("Int"))) == "TypeAmbiguous"
    assert _code(lambda: derive_position(s, T("Orders"), 0)) == "PositionOutOfRange"
    assert _code(lambda: derive_position(s, T("D"), 1)) == "MultiConstructor"
    assert _code(lambda: derive_super(s, T("Item"), T("WeighedItem"))) == "NotASubtype"
    assert _code(lambda: derive_ctor_prism(s, T("D"), "DChar")) == "NoSuchConstructor"
    assert _code(lambda: derive_typed_prism(s, T("D"), T("Char"))) == "TypeAbsent"
    assert _code(lambda: derive_typed_prism(odd, T("Amb"), T("Int"))) == "TypeAmbiguous"
    assert _code(lambda: derive_sub_prism(s, T("D"), T("E"))) == "NotASumSubtype"
    assert _code(lambda: derive_param(s, T("Bool"), 0, T("Int"))) == "ParamOutOfRange"
    assert _code(lambda: derive_param(s, T("Invoice Int"), 1)) == "ParamOutOfRange"
    assert _code(lambda: derive_field(s, T("Item"), "cost", T("Int"))) == "NotTypeChanging"
    assert _code(lambda: derive_position(odd, T("Twice Int"), 1, T("Char"))) == "NotTypeChanging"


def test_ambiguous_sub_mapping():
    s = parse_schema("type Big\n  | B1 Int\n  | B2 Int\ntype Small\n  | S Int\n", prelude())
    assert _code(lambda: derive_sub_prism(s, T("Big"), T("Small"))) == "AmbiguousMapping"


def test_typed_ambiguity_lists_positions(shop):
    with pytest.raises(DeriveError) as ei:
        derive_typed(shop, T("Invoice Int"), T("Int"))
    assert "3" in ei.value.message and "4" in ei.value.message


def test_type_changing_field(shop):
    lens = derive_field(shop, T("Invoice Int"), "priority", T("(Int, Int)"))
    assert lens.signature() == "Lens (Invoice Int) (Invoice (Int, Int)) Int (Int, Int)"
    mono = derive_field(shop, T("Invoice Int"), "priority")
    assert mono.s_ty is mono.t_ty and mono.a_ty is mono.b_ty


def test_typed_lens_is_monomorphic(shop, bourbon):
    lens = derive_typed(shop, T("Item"), T("Cost"))
    assert lens.kind is Lens and lens.s_ty is lens.t_ty


def test_sub_prism_round_trip(shop):
    p = derive_sub_prism(shop, T("E"), T("D"))
    assert p.kind is Prism
    assert match(p, parse_value('EPair True "x"')) == Focus(parse_value('DPair True "x"'))


def test_typed_prism_single_field(shop):
    p = derive_typed_prism(shop, T("D"), T("Int"))
    assert match(p, parse_value("DInt 1")) == Focus(PInt(1))


def test_nullary_ctor_prism_focuses_unit(shop):
    p = derive_ctor_prism(shop, T("Maybe Int"), "Nothing")
    assert p.a_ty is T("Unit")
    assert isinstance(match(p, parse_value("Nothing")), Focus)


def test_primitive_types_traversal(shop):
    t = derive_types(shop, T("Int"), T("Int"))
    assert t.kind is Traversal
    assert to_list_of(t, PInt(5)) == []


def test_position_on_pair(shop):
    lens = derive_position(shop, T("(Int, Char)"), 1)
    assert view(lens, parse_value("(1, 'c')")) == PInt(1)


def test_wtree_param(shop):
    t = derive_param(shop, T("WTree Int Int"), 0)
    assert to_list_of(t, parse_value("Fork (Leaf 1) (WithWeight (Leaf 2) 3)")) == [PInt(3)]
    t1 = derive_param(shop, T("WTree Int Int"), 1)
    assert to_list_of(t1, parse_value("Fork (Leaf 1) (WithWeight (Leaf 2) 3)")) == [PInt(1), PInt(2)]


RECORDS = ["Item", "WeighedItem", "Invoice Int", "Invoice (Int, Double)"]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(RECORDS))
def test_field_and_position_agree(shop, seed, name):
    rng = random.Random(seed)
    ty = T(name)
    (c,) = shop.instantiate(ty)
    for k, f in enumerate(c.fields, 1):
        by_name = derive_field(shop, ty, f.name)
        by_pos = derive_position(shop, ty, k)
        v = random_value_sized(rng, shop, ty)
        b = random_value_sized(rng, shop, f.ty)
        assert view(by_name, v) == view(by_pos, v)
        assert update(by_name, b, v) == update(by_pos, b, v)


KINDS = ("field", "position", "typed", "ctor", "typedp", "types", "param")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KINDS))
def test_derivation_is_total(seed, kind):
    rng = random.Random(seed)
    s = random_schema(rng)
    ty = random_ground(rng, s, user_only=True)
    other = random_ground(rng, s)
    try:
        if kind == "field":
            o = derive_field(s, ty, "x")
        elif kind == "position":
            o = derive_position(s, ty, rng.randint(0, 4))
        elif kind == "typed":
            o = derive_typed(s, ty, other)
        elif kind == "ctor":
            o = derive_ctor_prism(s, ty, f"C{rng.randrange(10)}_{rng.randrange(4)}")
        elif kind == "typedp":
            o = derive_typed_prism(s, ty, other)
        elif kind == "types":
            o = derive_types(s, ty, other)
        else:
            o = derive_param(s, ty, rng.randrange(3), other)
    except DeriveError:
        return
    if o.a_ty is o.b_ty:
        assert o.s_ty is o.t_ty


# ---------------------------------------------------------------------------
# Constrained traversals


def test_missing_instance(shop, bourbon):
    table = {T("Cost"): Instance(lambda eff, v: eff.pure(v), T("Cost"))}
    with pytest.raises(DeriveError) as ei:
        derive_constraints(shop, T("Item"), table)
    assert ei.value.code == "MissingInstance" and ei.value.detail is T("String")


def test_identity_table(shop, bourbon):
    keep = Instance(lambda eff, v: eff.pure(v), None)
    table = {T("String"): keep, T("Cost"): keep}
    table = {k: Instance(v.action, k) for k, v in table.items()}
    c = derive_constraints(shop, T("Item"), table)
    assert c.over(bourbon) == bourbon
    assert c.t_ty is T("Item")


def test_type_changing_constraints(shop):
    table: dict = {}
    handle = []

    def recurse(eff, v):
        return handle[0].traverse(eff, v)

    table[T("Int")] = Instance(lambda eff, v: eff.pure(PString(str(v.value))), T("String"))
    table[T("Tree Int")] = Instance(recurse, T("Tree String"))
    handle.append(derive_constraints(shop, T("Tree Int"), table))
    assert handle[0].t_ty is T("Tree String")
    assert handle[0].over(parse_value("Branch (Leaf 1) (Leaf 2)")) == parse_value('Branch (Leaf "1") (Leaf "2")')


def _focus(eff, v):
    return eff.pure(bump(v))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["tree", "logic"]))
def test_constraints_encode_types(seed, suite):
    rng = random.Random(seed)
    sch = bench.bench_schema()
    sut = bench.SUITES[suite]
    v = sut.make(rng.randint(1, 300), rng)
    table = has_types_table(sch, sut.ty, T("Int"), _focus)
    c = derive_constraints(sch, sut.ty, table)
    t = derive_types(sch, sut.ty, T("Int"))
    assert c.over(v) == over(t, bump, v)
    lab = lambda eff, x: label(x)
    via_table = derive_constraints(sch, sut.ty, has_types_table(sch, sut.ty, T("Int"), lab))
    assert run_state(via_table.traverse(STATE, v)) == run_state(traverse_of(t, STATE, label, v))
