"""Pretty-printer; output re-parses to a structurally identical tree."""

from __future__ import annotations

from ..values import Value, value_text
from .ast import (
    Agg, Apply, Axiom, BinOp, BoolLit, Card, Cmp, ConceptLit, Definition,
    DollarApp, ElemLit, Enumeration, Expr, IntLit, Ite, KnowledgeBase,
    NameRef, Neg, Not, Quant, RealLit, Rule, StructureBlock, SymbolDecl,
    Theory, TypeDecl, TypeRef, Variable, Vocabulary,
)

# precedence levels: higher binds tighter
_PREC = {"<=>": 0, "=>": 1, "|": 2, "&": 3, "+": 5, "-": 5, "*": 6, "/": 6}
_CMP_PREC = 4
_UNARY_PREC = 7
_ATOM_PREC = 8


def print_expr(e: Expr) -> str:
    return _expr(e, 0)


def _expr(e: Expr, ctx: int) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RealLit):
        return value_text(e.value)
    if isinstance(e, (NameRef, Variable)):
        return e.name
    if isinstance(e, ElemLit):
        return value_text(e.value)
    if isinstance(e, ConceptLit):
        return "`" + e.name
    if isinstance(e, Apply):
        return f"{e.symbol}({', '.join(_expr(a, 0) for a in e.args)})"
    if isinstance(e, DollarApp):
        inner = _expr(e.concept, 0)
        return f"$({inner})({', '.join(_expr(a, 0) for a in e.args)})"
    if isinstance(e, Not):
        return _wrap(f"~{_expr(e.arg, _ATOM_PREC)}", _UNARY_PREC, ctx)
    if isinstance(e, Neg):
        return _wrap(f"-{_expr(e.arg, _ATOM_PREC)}", _UNARY_PREC, ctx)
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        right_assoc = e.op == "=>"
        # a left operand is never trailing, so its context stays >= 1 to
        # force parentheses around open-ended constructs (binders, if/else)
        left = _expr(e.left, prec + 1 if right_assoc else max(prec, 1))
        right = _expr(e.right, max(prec, 1) if right_assoc else prec + 1)
        return _wrap(f"{left} {e.op} {right}", prec, ctx)
    if isinstance(e, Cmp):
        parts = [_expr(e.operands[0], _CMP_PREC + 1)]
        for op, operand in zip(e.ops, e.operands[1:]):
            parts.append(op)
            parts.append(_expr(operand, _CMP_PREC + 1))
        return _wrap(" ".join(parts), _CMP_PREC, ctx)
    if isinstance(e, Quant):
        body = _expr(e.body, 0)
        return _wrap(f"{e.kind}{e.var} in {e.var_type}: {body}", 0, ctx, open_right=True)
    if isinstance(e, Card):
        return f"#{{{e.var} in {e.var_type}: {_expr(e.body, 0)}}}"
    if isinstance(e, Agg):
        return f"{e.kind}(lambda {e.var} in {e.var_type}: {_expr(e.term, 0)})"
    if isinstance(e, Ite):
        text = f"if {_expr(e.cond, 0)} then {_expr(e.then, 0)} else {_expr(e.other, 0)}"
        return _wrap(text, 0, ctx, open_right=True)
    raise TypeError(f"cannot print {type(e).__name__}")


def _wrap(text: str, prec: int, ctx: int, open_right: bool = False) -> str:
    # open-ended constructs (binders, if/then/else) swallow everything to
    # their right, so they need parens in any operator context
    if prec < ctx or (open_right and ctx > 0):
        return f"({text})"
    return text


# -- blocks --------------------------------------------------------------------


def _entry_args(args: tuple[Value, ...]) -> str:
    if len(args) == 1:
        return value_text(args[0])
    return "(" + ", ".join(value_text(a) for a in args) + ")"


def print_enumeration(en: Enumeration) -> str:
    if en.kind == "value":
        return f"{en.target} := {value_text(en.items)}."
    if en.kind == "range":
        lo, hi = en.items
        return f"{en.target} := {{{lo}..{hi}}}."
    if en.kind == "set":
        inner = ", ".join(_entry_args(t) for t in en.items)
        return f"{en.target} := {{{inner}}}."
    inner = ", ".join(f"{_entry_args(a)} -> {value_text(v)}" for a, v in en.items)
    return f"{en.target} := {{{inner}}}."


def print_rule(r: Rule) -> str:
    binders = "".join(f"!{v} in {t}: " for v, t in r.binders)
    head = _expr(r.head, 0)
    if r.value is not None:
        head = f"{head} = {_expr(r.value, _CMP_PREC + 1)}"
    if r.body == BoolLit(True):
        return f"{binders}{head}."
    return f"{binders}{head} <- {_expr(r.body, 0)}."


def _print_typedecl(d: TypeDecl) -> str:
    if d.int_range is not None:
        return f"type {d.name} := {{{d.int_range[0]}..{d.int_range[1]}}}"
    if d.elements is not None:
        return f"type {d.name} := {{{', '.join(value_text(e) for e in d.elements)}}}"
    return f"type {d.name}"


def _print_symboldecl(d: SymbolDecl) -> str:
    args = " * ".join(str(t) for t in d.arg_types) if d.arg_types else "()"
    return f"{d.name}: {args} -> {d.result}"


def print_kb(kb: KnowledgeBase) -> str:
    out: list[str] = []
    for v in kb.vocabularies:
        out.append(f"vocabulary {v.name} {{")
        for d in v.decls:
            out.append("    " + (_print_typedecl(d) if isinstance(d, TypeDecl)
                                 else _print_symboldecl(d)))
        out.append("}")
    for t in kb.theories:
        out.append(f"theory {t.name} : {t.vocab_name} {{")
        for a in t.assertions:
            if isinstance(a, Axiom):
                out.append(f"    {_expr(a.expr, 0)}.")
            else:
                out.append("    {")
                for r in a.rules:
                    out.append(f"        {print_rule(r)}")
                out.append("    }")
        out.append("}")
    for s in kb.structures:
        out.append(f"structure {s.name} : {s.vocab_name} {{")
        for en in s.enums:
            out.append(f"    {print_enumeration(en)}")
        out.append("}")
    return "\n".join(out) + "\n"
