"""Generic optics derived from schema-defined algebraic data types."""
from __future__ import annotations

from .derive import (
    ConstrainedTraversal, DeriveError, Instance, derive_constraints, derive_ctor_prism, derive_field, derive_param,
    derive_position, derive_sub_prism, derive_super, derive_typed, derive_typed_prism, derive_types,
    has_types_table, plan_cache,
)
from .effects import CONST_LIST, IDENTITY, STATE, EffectInterface, collect, label, run_state
from .engine import (
    ByParam, ByType, DepthExceeded, PlanCache, VisitStats, compile_plan, interesting, naive_traverse, run_plan,
    show_plan,
)
from .optics import (
    KindMismatch, Lens, MiddleTypeMismatch, Optic, OpticKind, Prism, Traversal, build, compose, compose_all, match,
    modify, over, to_list_of, traverse_of, update, view,
)
from .rep import get_param, index_params, put_param, rep_of, show_rep
from .schema import Schema, SchemaError, parse_schema, parse_type, prelude, show_type, validate
from .value import Ctor, PChar, PFloat, PInt, PString, TypeMismatch, parse_value, print_value, typecheck

__version__ = "0.1.0"
