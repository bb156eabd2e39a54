"""Constant folding and consequence-driven simplification of ground theories."""

from __future__ import annotations

from fractions import Fraction

from ..lang.ast import (
    Apply, BinOp, BoolLit, Cmp, Expr, Ite, Neg, Not,
)
from ..lang.printer import print_expr
from ..structure import TermKey
from ..values import Value, is_number
from . import theory as gt
from .theory import GroundAssertion, GroundTheory, node_value, value_node


def _cmp_const(op: str, a: Value, b: Value) -> bool:
    if op == "=":
        return a == b
    if op == "<":
        return a < b
    return a <= b  # "=<"


def fold(e: Expr) -> Expr:
    """Bottom-up constant folding: boolean laws, ite folding and constant
    arithmetic. Children are assumed already ground."""
    if isinstance(e, Not):
        arg = fold(e.arg)
        if isinstance(arg, BoolLit):
            return BoolLit(not arg.value)
        if isinstance(arg, Not):
            return arg.arg
        return Not(arg)
    if isinstance(e, Neg):
        arg = fold(e.arg)
        v = node_value(arg)
        if v is not None and is_number(v):
            return value_node(-v)
        return Neg(arg)
    if isinstance(e, BinOp):
        left, right = fold(e.left), fold(e.right)
        if e.op in ("&", "|", "=>", "<=>"):
            return _fold_bool(e.op, left, right)
        lv, rv = node_value(left), node_value(right)
        if lv is not None and rv is not None and is_number(lv) and is_number(rv):
            if e.op == "+":
                return value_node(lv + rv)
            if e.op == "-":
                return value_node(lv - rv)
            if e.op == "*":
                return value_node(lv * rv)
            return value_node(Fraction(0) if rv == 0 else Fraction(lv) / Fraction(rv))
        lnum = lv if lv is not None and is_number(lv) else None
        rnum = rv if rv is not None and is_number(rv) else None
        if e.op == "+":
            if lnum == 0:
                return right
            if rnum == 0:
                return left
        elif e.op == "-":
            if rnum == 0:
                return left
        elif e.op == "*":
            if lnum == 1:
                return right
            if rnum == 1:
                return left
            if lnum == 0 or rnum == 0:
                return value_node(0)
        return BinOp(e.op, left, right)
    if isinstance(e, Cmp):
        operands = tuple(fold(o) for o in e.operands)
        values = [node_value(o) for o in operands]
        if all(v is not None for v in values):
            ok = all(_cmp_const(op, a, b)
                     for op, a, b in zip(e.ops, values, values[1:]))
            return BoolLit(ok)
        return Cmp(operands, e.ops)
    if isinstance(e, Ite):
        cond, then, other = fold(e.cond), fold(e.then), fold(e.other)
        if isinstance(cond, BoolLit):
            return then if cond.value else other
        if print_expr(then) == print_expr(other):
            return then
        return Ite(cond, then, other)
    return e


def _fold_bool(op: str, left: Expr, right: Expr) -> Expr:
    lt = left.value if isinstance(left, BoolLit) else None
    rt = right.value if isinstance(right, BoolLit) else None
    if op == "&":
        if lt is True:
            return right
        if rt is True:
            return left
        if lt is False or rt is False:
            return BoolLit(False)
    elif op == "|":
        if lt is True or rt is True:
            return BoolLit(True)
        if lt is False:
            return right
        if rt is False:
            return left
    elif op == "=>":
        if lt is True:
            return right
        if lt is False or rt is True:
            return BoolLit(True)
        if rt is False:
            return fold(Not(left))
    else:  # <=>
        if lt is True:
            return right
        if rt is True:
            return left
        if lt is False:
            return fold(Not(right))
        if rt is False:
            return fold(Not(left))
    return BinOp(op, left, right)


def substitute(e: Expr, atom_facts: dict[str, bool],
               term_values: dict[TermKey, Value]) -> Expr:
    """Replace known atoms by their truth value and valued terms by their
    value; no folding (callers fold afterwards)."""
    if isinstance(e, Apply):
        key = (e.symbol, tuple(node_value(a) for a in e.args))
        if None not in key[1]:
            if key in term_values:
                return value_node(term_values[key])
            text = print_expr(e)
            if text in atom_facts:
                return BoolLit(atom_facts[text])
        return Apply(e.symbol,
                     tuple(substitute(a, atom_facts, term_values) for a in e.args))
    if isinstance(e, Cmp):
        text = print_expr(e)
        if text in atom_facts:
            return BoolLit(atom_facts[text])
        return Cmp(tuple(substitute(o, atom_facts, term_values)
                         for o in e.operands), e.ops)
    if isinstance(e, Not):
        return Not(substitute(e.arg, atom_facts, term_values))
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, atom_facts, term_values))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, atom_facts, term_values),
                     substitute(e.right, atom_facts, term_values))
    if isinstance(e, Ite):
        return Ite(substitute(e.cond, atom_facts, term_values),
                   substitute(e.then, atom_facts, term_values),
                   substitute(e.other, atom_facts, term_values))
    return e


def simplify(ground: GroundTheory, atom_facts: dict[str, bool] | None = None,
             term_values: dict[TermKey, Value] | None = None) -> GroundTheory:
    """Substitute known consequences into every assertion and fold.

    Assertions reduced to `true` are dropped; a contradiction surfaces as an
    assertion reduced to `false` and is kept as-is. Atom pool and symbol
    tables are shared with the input theory.
    """
    atom_facts = atom_facts or {}
    term_values = term_values or {}
    out = GroundTheory(atom_pool=ground.atom_pool,
                       atoms_by_text=ground.atoms_by_text,
                       terms=ground.terms, sorts=ground.sorts)
    for a in ground.assertions:
        expr = fold(substitute(a.expr, atom_facts, term_values))
        if isinstance(expr, BoolLit) and expr.value:
            continue
        out.add_assertion(GroundAssertion(a.label, expr, a.kind, a.soft,
                                          a.source, a.span))
    return out


def atoms_in(e: Expr, out: set[str] | None = None) -> set[str]:
    """Canonical texts of all pool-shaped atoms occurring in a ground expr."""
    if out is None:
        out = set()
    if isinstance(e, Apply):
        out.add(print_expr(e))
        return out
    if isinstance(e, Cmp) and len(e.ops) == 1:
        out.add(print_expr(e))
        for o in e.operands:
            _subterm_atoms(o, out)
        return out
    for c in _children(e):
        atoms_in(c, out)
    return out


def _subterm_atoms(e: Expr, out: set[str]) -> None:
    if isinstance(e, Apply):
        out.add(print_expr(e))
    for c in _children(e):
        _subterm_atoms(c, out)


def _children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Not, Neg)):
        return (e.arg,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Cmp):
        return e.operands
    if isinstance(e, Ite):
        return (e.cond, e.then, e.other)
    if isinstance(e, Apply):
        return e.args
    return ()
