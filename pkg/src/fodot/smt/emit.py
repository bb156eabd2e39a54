"""Render ground theories as SMT-LIB 2 commands."""

from __future__ import annotations

from fractions import Fraction

from ..errors import GroundingError
from ..lang import ast
from ..lang.ast import (
    Apply, BinOp, BoolLit, Cmp, ConceptLit, ElemLit, Expr, IntLit, Ite, Neg,
    Not, RealLit, Sig, TypeRef,
)
from ..typecheck import VocabIndex
from ..values import SymRef, Value
from .sexpr import quote_symbol
from .theory_names import concept_sort_name
from ..ground.theory import (
    GroundTheory, SortInfo, TermInfo, element_smt_name, node_value,
)

_CMP_OPS = {"=": "=", "<": "<", "=<": "<=", ">": ">", ">=": ">="}


def literal_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        sign = v < 0
        v = abs(v)
        body = f"{v.numerator}.0" if v.denominator == 1 \
            else f"(/ {v.numerator} {v.denominator})"
        return f"(- {body})" if sign else body
    if isinstance(v, int):
        return str(v) if v >= 0 else f"(- {-v})"
    raise TypeError(f"no direct SMT literal for {v!r}")


class Emitter:
    def __init__(self, gt: GroundTheory, idx: VocabIndex, named: bool = True):
        self.gt = gt
        self.idx = idx
        self.named = named

    def sort_name(self, t: TypeRef) -> str:
        if t.name in (ast.BOOL, ast.INT, ast.REAL):
            return t.name
        if t.name == ast.CONCEPT:
            return quote_symbol(concept_sort_name(t))
        info = self.gt.sorts.get(t.name)
        if info is not None and info.kind in ("int", "real"):
            return "Int" if info.kind == "int" else "Real"
        return quote_symbol(t.name)

    def element(self, sort: SortInfo, v: Value) -> str:
        if sort.kind in ("int", "real"):
            return literal_value(v)
        return quote_symbol(element_smt_name(sort.smt_sort, v))

    def term_name(self, key) -> str:
        return quote_symbol(self.gt.terms[key].smt_name)

    def expr(self, e: Expr) -> str:
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, (IntLit, RealLit)):
            return literal_value(e.value)
        if isinstance(e, ElemLit):
            sort = self.gt.sorts.get(e.type_name)
            if sort is None or sort.kind in ("int", "real"):
                return literal_value(e.value)
            return self.element(sort, e.value)
        if isinstance(e, ConceptLit):
            decl = self.idx.symbols[e.name]
            tref = TypeRef(ast.CONCEPT, Sig(decl.arg_types, decl.result))
            sort = concept_sort_name(tref)
            return quote_symbol(element_smt_name(sort, SymRef(e.name)))
        if isinstance(e, Apply):
            key = (e.symbol, tuple(node_value(a) for a in e.args))
            return self.term_name(key)
        if isinstance(e, Not):
            return f"(not {self.expr(e.arg)})"
        if isinstance(e, Neg):
            return f"(- {self.expr(e.arg)})"
        if isinstance(e, BinOp):
            if e.op == "&":
                return f"(and {self.expr(e.left)} {self.expr(e.right)})"
            if e.op == "|":
                return f"(or {self.expr(e.left)} {self.expr(e.right)})"
            if e.op == "=>":
                return f"(=> {self.expr(e.left)} {self.expr(e.right)})"
            if e.op == "<=>":
                return f"(= {self.expr(e.left)} {self.expr(e.right)})"
            if e.op == "/":
                if node_value(e.right) is None:
                    raise GroundingError(
                        "non-linear arithmetic: division by a non-constant term")
            if e.op == "*":
                if node_value(e.left) is None and node_value(e.right) is None:
                    raise GroundingError(
                        "non-linear arithmetic: product of two non-constant terms")
            return f"({e.op} {self.expr(e.left)} {self.expr(e.right)})"
        if isinstance(e, Cmp):
            parts = [f"({_CMP_OPS[op]} {self.expr(a)} {self.expr(b)})"
                     for op, a, b in zip(e.ops, e.operands, e.operands[1:])]
            return parts[0] if len(parts) == 1 else "(and " + " ".join(parts) + ")"
        if isinstance(e, Ite):
            return (f"(ite {self.expr(e.cond)} {self.expr(e.then)} "
                    f"{self.expr(e.other)})")
        raise TypeError(f"cannot emit {type(e).__name__}")

    def assertion(self, label: str, expr: Expr) -> str:
        if not self.named:
            return f"(assert {self.expr(expr)})"
        return f"(assert (! {self.expr(expr)} :named {quote_symbol(label)}))"

    def _named_assert(self, body: str, label: str) -> str:
        if not self.named:
            return f"(assert {body})"
        return f"(assert (! {body} :named {quote_symbol(label)}))"

    def declarations(self) -> list[str]:
        """Sort declarations, element constants with UNA axioms per sort,
        term constants, and per-term domain-closure axioms."""
        out: list[str] = []
        for sort in self.gt.sorts.values():
            if sort.kind in ("int", "real"):
                continue
            name = quote_symbol(sort.smt_sort)
            out.append(f"(declare-sort {name} 0)")
            elems = [self.element(sort, v) for v in sort.elements]
            for e in elems:
                out.append(f"(declare-fun {e} () {name})")
            if len(elems) >= 2:
                out.append(self._named_assert(
                    f"(distinct {' '.join(elems)})", f"una:{sort.name}"))
        for info in self.gt.terms.values():
            out.append(f"(declare-fun {quote_symbol(info.smt_name)} () "
                       f"{self.sort_name(info.result)})")
        for info in self.gt.terms.values():
            if info.internal or info.extension is None \
                    or info.result.name == ast.BOOL:
                continue
            name = quote_symbol(info.smt_name)
            sort = self.gt.sorts.get(info.result.name) or \
                self.gt.sorts.get(concept_sort_name(info.result))
            if sort is None:
                continue
            disj = " ".join(f"(= {name} {self.element(sort, v)})"
                            for v in info.extension)
            body = disj if len(info.extension) == 1 else f"(or {disj})"
            out.append(self._named_assert(body, f"dca:{info.smt_name}"))
        return out
