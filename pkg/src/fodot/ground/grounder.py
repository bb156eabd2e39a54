"""Grounding: expand quantifiers, aggregates, cardinalities and concept
applications over finite extensions; fold enumeration-origin assignments;
reduce definitions; assemble the atom pool."""

from __future__ import annotations

import itertools

from ..errors import InfiniteQuantification, MissingExtension, ValueOutsideType
from ..lang import ast
from ..lang.ast import (
    Agg, Apply, Axiom, BinOp, BoolLit, Card, Cmp, ConceptLit, Definition,
    DollarApp, ElemLit, Expr, IntLit, Ite, Neg, Not, Quant, RealLit, TypeRef,
    Variable,
)
from ..lang.printer import print_expr
from ..structure import PartialStructure, TermKey, extension_of, ground_terms_of, term_text
from ..typecheck import TypedKB, VocabIndex
from ..values import Value, value_text
from . import definitions
from .simplify import fold
from .theory import (
    AXIOM, DOMAIN, FACT, GroundAssertion, GroundTheory, SortInfo, TermInfo,
    element_smt_name, is_constant, make_atom, node_value, normalize_cmp,
    term_smt_name, value_node,
)

Env = dict[str, Value]


class Grounder:
    def __init__(self, tkb: TypedKB, struct: PartialStructure):
        self.tkb = tkb
        self.struct = struct
        self.idx: VocabIndex = tkb.single_vocab()
        self.gt = GroundTheory()
        self._aux: list[Expr] = []
        self._fresh = itertools.count()
        self._register_sorts()

    # -- sorts and terms ------------------------------------------------------

    def _register_sorts(self) -> None:
        for decl in self.idx.vocab.type_decls():
            ext = extension_of(TypeRef(decl.name), self.idx, self.struct)
            if ext is None:
                continue
            kind = self.idx.type_kinds.get(decl.name, "identifier")
            if kind == "unknown":
                kind = "identifier"
            self.gt.sorts[decl.name] = SortInfo(decl.name, kind, ext, decl.name)

    def sort_for(self, t: TypeRef) -> SortInfo | None:
        if t.name in (ast.BOOL, ast.INT, ast.REAL):
            return None
        if t.name == ast.CONCEPT:
            name = str(t)
            if name not in self.gt.sorts:
                ext = extension_of(t, self.idx, self.struct)
                self.gt.sorts[name] = SortInfo(name, "concept", ext or (), name)
            return self.gt.sorts[name]
        return self.gt.sorts.get(t.name)

    def term_info(self, key: TermKey) -> TermInfo:
        info = self.gt.terms.get(key)
        if info is None:
            decl = self.idx.symbols[key[0]]
            self.sort_for(decl.result)
            for t in decl.arg_types:
                self.sort_for(t)
            ext = extension_of(decl.result, self.idx, self.struct)
            info = TermInfo(key, term_smt_name(key), decl.result, ext)
            self.gt.terms[key] = info
        return info

    def fresh_const(self, result: TypeRef, prefix: str) -> Apply:
        name = f"{prefix}{next(self._fresh)}"
        while name in self.idx.symbols:
            name = f"{prefix}{next(self._fresh)}"
        self.gt.terms[(name, ())] = TermInfo((name, ()), name, result, None,
                                             internal=True)
        return Apply(name, ())

    # -- expression grounding --------------------------------------------------

    def extension(self, t: TypeRef, why: str) -> tuple[Value, ...]:
        ext = extension_of(t, self.idx, self.struct)
        if ext is None:
            raise InfiniteQuantification(
                f"{why} ranges over {t}, which has no finite extension")
        return ext

    def ground_assertion(self, expr: Expr, env: Env | None = None) -> Expr:
        """Ground a top-level formula, conjoining any auxiliary constraints
        introduced for min/max aggregates."""
        self._aux = []
        out = self.ground(expr, env or {})
        for aux in self._aux:
            out = fold(BinOp("&", out, aux))
        self._aux = []
        return out

    def ground(self, e: Expr, env: Env) -> Expr:
        if isinstance(e, (BoolLit, IntLit, RealLit, ElemLit, ConceptLit)):
            return e
        if isinstance(e, Variable):
            return value_node(env[e.name], e.typ.name if e.typ else None)
        if isinstance(e, Apply):
            args = [self.ground(a, env) for a in e.args]
            return self.ground_apply(e.symbol, args)
        if isinstance(e, DollarApp):
            return self.ground_dollar(e, env)
        if isinstance(e, Not):
            return fold(Not(self.ground(e.arg, env)))
        if isinstance(e, Neg):
            return fold(Neg(self.ground(e.arg, env)))
        if isinstance(e, BinOp):
            return fold(BinOp(e.op, self.ground(e.left, env),
                              self.ground(e.right, env)))
        if isinstance(e, Cmp):
            return self.ground_cmp(e, env)
        if isinstance(e, Quant):
            ext = self.extension(e.var_type, "quantifier")
            unit = BoolLit(e.kind == "!")
            op = "&" if e.kind == "!" else "|"
            out: Expr = unit
            for v in ext:
                out = fold(BinOp(op, out, self.ground(e.body, {**env, e.var: v})))
            return out
        if isinstance(e, Card):
            ext = self.extension(e.var_type, "cardinality")
            out: Expr = IntLit(0)
            for v in ext:
                cond = self.ground(e.body, {**env, e.var: v})
                out = fold(BinOp("+", out, fold(Ite(cond, IntLit(1), IntLit(0)))))
            return out
        if isinstance(e, Agg):
            return self.ground_agg(e, env)
        if isinstance(e, Ite):
            return fold(Ite(self.ground(e.cond, env), self.ground(e.then, env),
                            self.ground(e.other, env)))
        raise TypeError(f"cannot ground {type(e).__name__}")

    def ground_apply(self, symbol: str, args: list[Expr]) -> Expr:
        decl = self.idx.symbols[symbol]
        values = [node_value(a) for a in args]
        for i, (v, t) in enumerate(zip(values, decl.arg_types)):
            if v is None:
                continue
            ext = extension_of(t, self.idx, self.struct)
            if ext is not None and v not in ext:
                raise ValueOutsideType(
                    f"argument {value_text(v)} of {symbol!r} is outside type {t}")
            if ext is None and t.name not in (ast.INT, ast.REAL, ast.BOOL,
                                              ast.CONCEPT):
                raise MissingExtension(f"type {t} has no extension")
        if all(v is not None for v in values):
            key = (symbol, tuple(values))
            enum = self.struct.assignments.get(key)
            if enum is not None and enum.origin == "enumeration":
                return value_node(enum.value, decl.result.name)
            self.term_info(key)
            arg_nodes = tuple(value_node(v, t.name)
                              for v, t in zip(values, decl.arg_types))
            return Apply(symbol, arg_nodes)
        # expand the first non-constant argument over its type's extension
        i = next(i for i, v in enumerate(values) if v is None)
        t = decl.arg_types[i]
        ext = extension_of(t, self.idx, self.struct)
        if ext is None:
            raise InfiniteQuantification(
                f"argument {i + 1} of {symbol!r} is a computed {t} term; "
                f"grounding needs a finite extension")
        if not ext:
            raise MissingExtension(f"type {t} has an empty extension")
        branches = []
        for v in ext:
            cond = fold(normalize_cmp("=", args[i], value_node(v, t.name)))
            inner = self.ground_apply(symbol,
                                      args[:i] + [value_node(v, t.name)] + args[i + 1:])
            branches.append((cond, inner))
        out = branches[-1][1]
        for cond, inner in reversed(branches[:-1]):
            out = fold(Ite(cond, inner, out))
        return out

    def ground_dollar(self, e: DollarApp, env: Env) -> Expr:
        concept = self.ground(e.concept, env)
        args = [self.ground(a, env) for a in e.args]
        symbols = [s.name for s in
                   self.extension(e.concept.typ, "concept application")]
        if isinstance(concept, ConceptLit):
            return self.ground_apply(concept.name, args)
        if not symbols:
            raise MissingExtension(
                f"no declared symbol has signature {e.concept.typ}")
        if e.typ is not None and e.typ.name == ast.BOOL:
            out: Expr = BoolLit(False)
            for sym in symbols:
                eq = fold(normalize_cmp("=", concept, ConceptLit(sym)))
                out = fold(BinOp("|", out,
                                 fold(BinOp("&", eq, self.ground_apply(sym, args)))))
            return out
        out = self.ground_apply(symbols[-1], args)
        for sym in reversed(symbols[:-1]):
            eq = fold(normalize_cmp("=", concept, ConceptLit(sym)))
            out = fold(Ite(eq, self.ground_apply(sym, args), out))
        return out

    def ground_cmp(self, e: Cmp, env: Env) -> Expr:
        operands = [self.ground(o, env) for o in e.operands]
        out: Expr = BoolLit(True)
        for op, (left, lnode), (right, rnode) in zip(
                e.ops,
                zip(operands, e.operands),
                zip(operands[1:], e.operands[1:])):
            if lnode.typ is not None and lnode.typ.name == ast.BOOL:
                pair: Expr = fold(BinOp("<=>", left, right))
                if op == "~=":
                    pair = fold(Not(pair))
            else:
                pair = fold(normalize_cmp(op, left, right))
            out = fold(BinOp("&", out, pair))
        return out

    def ground_agg(self, e: Agg, env: Env) -> Expr:
        ext = self.extension(e.var_type, "aggregate")
        terms = [self.ground(e.term, {**env, e.var: v}) for v in ext]
        if e.kind == "sum":
            out: Expr = IntLit(0)
            for t in terms:
                out = fold(BinOp("+", out, t))
            return out
        if not terms:
            raise MissingExtension(f"{e.kind} over empty type {e.var_type}")
        if all(is_constant(t) for t in terms):
            vals = [node_value(t) for t in terms]
            return value_node(min(vals) if e.kind == "min" else max(vals))
        result = e.typ if e.typ is not None else ast.T_REAL
        m = self.fresh_const(result, "agg")
        self.gt.terms[(m.symbol, ())].smt_name = m.symbol
        achieved: Expr = BoolLit(False)
        bound: Expr = BoolLit(True)
        for t in terms:
            achieved = fold(BinOp("|", achieved, fold(normalize_cmp("=", m, t))))
            cmp = normalize_cmp("=<", m, t) if e.kind == "min" \
                else normalize_cmp("=<", t, m)
            bound = fold(BinOp("&", bound, fold(cmp)))
        self._aux.append(fold(BinOp("&", achieved, bound)))
        return m


# -- whole-theory grounding -----------------------------------------------------


def fact_expr(tkb: TypedKB, struct: PartialStructure, key: TermKey,
              value: Value) -> Expr:
    """Unit ground formula expressing `term = value`."""
    idx = tkb.single_vocab()
    decl = idx.symbols[key[0]]
    node = Apply(key[0], tuple(value_node(v, t.name)
                               for v, t in zip(key[1], decl.arg_types)))
    if decl.result.name == ast.BOOL:
        return node if value else Not(node)
    return normalize_cmp("=", node, value_node(value, decl.result.name))


def collect_assertion_atoms(g: GroundTheory, idx: VocabIndex) -> None:
    """Add comparison/equality/propositional atoms occurring in assertions to
    the pool, skipping anything that touches internal constants."""

    def is_internal(e: Expr) -> bool:
        if isinstance(e, Apply):
            info = g.terms.get((e.symbol, tuple(node_value(a) for a in e.args)))
            if info is not None and info.internal:
                return True
            return any(is_internal(a) for a in e.args)
        if isinstance(e, (Not, Neg)):
            return is_internal(e.arg)
        if isinstance(e, BinOp):
            return is_internal(e.left) or is_internal(e.right)
        if isinstance(e, Cmp):
            return any(is_internal(o) for o in e.operands)
        if isinstance(e, Ite):
            return any(is_internal(x) for x in (e.cond, e.then, e.other))
        return False

    def simple_term(e: Expr) -> bool:
        """Term free of nested formulas: applied terms, literals, arithmetic."""
        if isinstance(e, Apply):
            decl = idx.symbols.get(e.symbol)
            if decl is not None and decl.is_predicate:
                return False
            return all(simple_term(a) for a in e.args)
        if isinstance(e, Neg):
            return simple_term(e.arg)
        if isinstance(e, BinOp):
            return e.op in ("+", "-", "*", "/") and simple_term(e.left) \
                and simple_term(e.right)
        return not isinstance(e, (Cmp, Not, Ite))

    def visit(e: Expr) -> None:
        if isinstance(e, Apply):
            decl = idx.symbols.get(e.symbol)
            if decl is not None and decl.is_predicate and not is_internal(e):
                g.add_atom(make_atom(e))
            for a in e.args:
                visit(a)
            return
        if isinstance(e, Cmp):
            if not is_internal(e) and all(simple_term(o) for o in e.operands):
                g.add_atom(make_atom(e))
            for o in e.operands:
                visit(o)
            return
        for c in _children(e):
            visit(c)

    for a in g.assertions:
        visit(a.expr)


def _applies_in(e: Expr) -> list[Apply]:
    out = []
    if isinstance(e, Apply):
        out.append(e)
    for c in _children(e):
        out.extend(_applies_in(c))
    return out


def _children(e: Expr):
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


def ground_theory(tkb: TypedKB, struct: PartialStructure, *,
                  include_facts: bool = True,
                  force_levels: bool = False) -> GroundTheory:
    """Produce an equisatisfiable ground theory: quantifier-free labeled
    assertions plus the atom pool over which propagation is defined."""
    g = Grounder(tkb, struct)
    idx = g.idx
    n_axiom = 0
    n_def = 0
    for theory in tkb.theories:
        for a in theory.assertions:
            if isinstance(a, Axiom):
                grounded = g.ground_assertion(a.expr)
                g.gt.add_assertion(GroundAssertion(
                    f"ax{n_axiom}", grounded, AXIOM, True,
                    print_expr(a.expr) + ".", a.span))
                n_axiom += 1
            else:
                definitions.reduce_definition(g, a, n_def,
                                              force_levels=force_levels)
                n_def += 1
    if include_facts:
        for n, (key, value) in enumerate(struct.user_facts().items()):
            expr = fact_expr(tkb, struct, key, value)
            g.term_info(key)
            g.gt.add_assertion(GroundAssertion(
                f"fact{n}", expr, FACT, True,
                f"{term_text(key)} = {value_text(value)}"))
    # atom pool: every buildable applied term of the vocabulary, then atoms
    # occurring in assertions
    for decl in idx.vocab.symbol_decls():
        terms = ground_terms_of(decl, idx, struct)
        if terms is None:
            continue
        for key in terms:
            assigned = struct.assignments.get(key)
            if assigned is not None and assigned.origin == "enumeration":
                continue
            info = g.term_info(key)
            node = Apply(key[0], tuple(value_node(v, t.name)
                                       for v, t in zip(key[1], decl.arg_types)))
            if decl.result.name == ast.BOOL:
                g.gt.add_atom(make_atom(node))
            elif info.extension is not None:
                for v in info.extension:
                    g.gt.add_atom(make_atom(
                        normalize_cmp("=", node, value_node(v, decl.result.name))))
    collect_assertion_atoms(g.gt, idx)
    return g.gt
