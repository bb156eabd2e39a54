"""Type checking: validates theories and structures against their vocabulary
and rewrites expressions with resolved names and type annotations.

Collects the complete list of errors rather than stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import Diagnostic, Span, TypeErrors
from .lang import ast
from .lang.ast import (
    Agg, Apply, Axiom, BinOp, BoolLit, Card, Cmp, ConceptLit, Definition,
    DollarApp, ElemLit, Expr, IntLit, Ite, KnowledgeBase, NameRef, Neg, Not,
    Quant, RealLit, Rule, Sig, StructureBlock, SymbolDecl, Theory, TypeDecl,
    TypeRef, Variable, typed,
)
from .values import Ident, Value

T_ERROR = TypeRef("<error>")

NUMERIC_CMP = ("<", ">", "=<", ">=")


@dataclass
class VocabIndex:
    """Resolved view of one vocabulary plus the extensions visible in the KB."""

    vocab: ast.Vocabulary
    types: dict[str, TypeDecl] = field(default_factory=dict)
    symbols: dict[str, SymbolDecl] = field(default_factory=dict)
    # 'identifier' | 'int' | 'real' | 'unknown' — from vocab and structure blocks
    type_kinds: dict[str, str] = field(default_factory=dict)
    # identifier element name -> type names it belongs to
    element_types: dict[str, list[str]] = field(default_factory=dict)

    def symbols_with_sig(self, sig: Sig) -> list[str]:
        out = []
        for d in self.vocab.symbol_decls():
            if tuple(t.name for t in d.arg_types) == tuple(t.name for t in sig.args) \
                    and d.result.name == sig.result.name:
                out.append(d.name)
        return out


@dataclass
class TypedKB:
    """A knowledge base whose theories passed type checking.

    Theories are rebuilt with every expression annotated (`node.typ`) and all
    bare names resolved to variables or domain elements.
    """

    kb: KnowledgeBase
    vocabs: dict[str, VocabIndex]
    theories: tuple[Theory, ...]
    structures: tuple[StructureBlock, ...]

    def vocab_for(self, vocab_name: str) -> VocabIndex:
        return self.vocabs[vocab_name]

    def single_vocab(self) -> VocabIndex:
        names = {t.vocab_name for t in self.theories} | \
                {s.vocab_name for s in self.structures}
        if not names:
            names = set(self.vocabs)
        if len(names) != 1:
            raise TypeErrors([Diagnostic(
                "reasoning tasks require all blocks to share one vocabulary")])
        return self.vocabs[names.pop()]


def _value_kind(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, Fraction):
        return "real"
    if isinstance(v, Ident):
        return "identifier"
    return "concept"


class Checker:
    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.diags: list[Diagnostic] = []

    def err(self, message: str, span: Span) -> TypeRef:
        self.diags.append(Diagnostic(message, span))
        return T_ERROR

    # -- vocabulary indexing ----------------------------------------------

    def build_index(self, vocab: ast.Vocabulary) -> VocabIndex:
        idx = VocabIndex(vocab)
        for d in vocab.type_decls():
            if d.name in ast.BUILTIN_TYPES:
                self.err(f"built-in type {d.name!r} cannot be redeclared", d.span)
                continue
            if d.name in idx.types:
                self.err(f"duplicate type {d.name!r}", d.span)
            idx.types[d.name] = d
            idx.type_kinds[d.name] = "unknown"
            if d.elements is not None:
                kinds = {_value_kind(e) for e in d.elements}
                if kinds <= {"int"}:
                    idx.type_kinds[d.name] = "int"
                elif kinds <= {"int", "real"}:
                    idx.type_kinds[d.name] = "real"
                elif kinds == {"identifier"}:
                    idx.type_kinds[d.name] = "identifier"
                elif kinds:
                    self.err(f"type {d.name!r} mixes identifiers and numbers", d.span)
        for d in vocab.symbol_decls():
            if d.name in idx.symbols or d.name in idx.types:
                self.err(f"duplicate symbol {d.name!r}", d.span)
            idx.symbols[d.name] = d
            for t in (*d.arg_types, d.result):
                self.check_typeref(t, idx)
        # structure enumerations contribute extensions/kinds for resolution
        for block in self.kb.structures:
            if block.vocab_name != vocab.name:
                continue
            for en in block.enums:
                if en.target in idx.types:
                    if en.kind == "range":
                        self._merge_kind(idx, en.target, "int", en.span)
                    elif en.kind == "set":
                        kinds = {_value_kind(v) for t in en.items for v in t}
                        if kinds == {"identifier"}:
                            self._merge_kind(idx, en.target, "identifier", en.span)
                            for t in en.items:
                                for v in t:
                                    idx.element_types.setdefault(v.name, [])
                                    if en.target not in idx.element_types[v.name]:
                                        idx.element_types[v.name].append(en.target)
                        elif kinds <= {"int"}:
                            self._merge_kind(idx, en.target, "int", en.span)
                        elif kinds <= {"int", "real"}:
                            self._merge_kind(idx, en.target, "real", en.span)
        for d in vocab.type_decls():
            if d.elements is None:
                continue
            for e in d.elements:
                if isinstance(e, Ident):
                    idx.element_types.setdefault(e.name, [])
                    if d.name not in idx.element_types[e.name]:
                        idx.element_types[e.name].append(d.name)
        return idx

    def _merge_kind(self, idx: VocabIndex, type_name: str, kind: str, span: Span) -> None:
        cur = idx.type_kinds.get(type_name, "unknown")
        if cur == "unknown":
            idx.type_kinds[type_name] = kind
        elif cur != kind and {cur, kind} != {"int", "real"}:
            self.err(f"type {type_name!r} enumerated with conflicting kinds", span)

    def check_typeref(self, t: TypeRef, idx: VocabIndex) -> None:
        if t.name in ast.BUILTIN_TYPES:
            if t.sig is not None:
                for a in (*t.sig.args, t.sig.result):
                    self.check_typeref(a, idx)
            return
        if t.name not in idx.types:
            self.err(f"unknown type {t.name!r}", t.span)

    # -- expression checking ------------------------------------------------

    def is_numeric(self, t: TypeRef, idx: VocabIndex) -> bool:
        if t.name in (ast.INT, ast.REAL):
            return True
        return idx.type_kinds.get(t.name) in ("int", "real")

    def is_int_like(self, t: TypeRef, idx: VocabIndex) -> bool:
        if t.name == ast.INT:
            return True
        return idx.type_kinds.get(t.name) == "int"

    def compatible(self, expected: TypeRef, found: TypeRef, idx: VocabIndex,
                   arg: Expr | None = None) -> bool:
        if T_ERROR in (expected, found):
            return True
        if expected.name == found.name:
            if expected.name == ast.CONCEPT:
                return self._same_sig(expected.sig, found.sig)
            return True
        if expected.name == ast.REAL and self.is_numeric(found, idx):
            return True
        if expected.name == ast.INT and self.is_int_like(found, idx):
            return True
        # numeric literal where a numeric custom type is expected: membership
        # is validated at grounding time against the actual extension
        if idx.type_kinds.get(expected.name) in ("int", "real") \
                and self.is_numeric(found, idx) and self._is_literal(arg):
            return True
        return False

    @staticmethod
    def _is_literal(e: Expr | None) -> bool:
        if isinstance(e, Neg):
            e = e.arg
        return isinstance(e, (IntLit, RealLit, ElemLit))

    @staticmethod
    def _same_sig(a: Sig | None, b: Sig | None) -> bool:
        if a is None or b is None:
            return a is b
        return (tuple(t.name for t in a.args) == tuple(t.name for t in b.args)
                and a.result.name == b.result.name)

    def join_numeric(self, a: TypeRef, b: TypeRef, idx: VocabIndex) -> TypeRef:
        if self.is_int_like(a, idx) and self.is_int_like(b, idx):
            return ast.T_INT
        return ast.T_REAL

    def check_expr(self, e: Expr, env: dict[str, TypeRef], idx: VocabIndex) -> Expr:
        if isinstance(e, BoolLit):
            return typed(BoolLit(e.value).at(e.span), ast.T_BOOL)
        if isinstance(e, IntLit):
            return typed(IntLit(e.value).at(e.span), ast.T_INT)
        if isinstance(e, RealLit):
            return typed(RealLit(e.value).at(e.span), ast.T_REAL)
        if isinstance(e, ElemLit):
            return typed(ElemLit(e.value, e.type_name).at(e.span), TypeRef(e.type_name))
        if isinstance(e, (NameRef, Variable)):
            if e.name in env:
                return typed(Variable(e.name).at(e.span), env[e.name])
            owners = idx.element_types.get(e.name, [])
            if len(owners) == 1:
                return typed(ElemLit(Ident(e.name), owners[0]).at(e.span),
                             TypeRef(owners[0]))
            if len(owners) > 1:
                self.err(f"identifier {e.name!r} belongs to several types "
                         f"({', '.join(owners)})", e.span)
                return typed(NameRef(e.name).at(e.span), T_ERROR)
            self.err(f"unknown identifier {e.name!r}", e.span)
            return typed(NameRef(e.name).at(e.span), T_ERROR)
        if isinstance(e, ConceptLit):
            decl = idx.symbols.get(e.name)
            if decl is None:
                self.err(f"`{e.name} does not name a declared symbol", e.span)
                return typed(ConceptLit(e.name).at(e.span), T_ERROR)
            sig = Sig(decl.arg_types, decl.result)
            return typed(ConceptLit(e.name).at(e.span), TypeRef(ast.CONCEPT, sig))
        if isinstance(e, Apply):
            return self.check_apply(e, env, idx)
        if isinstance(e, DollarApp):
            return self.check_dollar(e, env, idx)
        if isinstance(e, Not):
            arg = self.check_expr(e.arg, env, idx)
            if arg.typ not in (ast.T_BOOL, T_ERROR):
                self.err(f"'~' expects Bool, found {arg.typ}", e.span)
            return typed(Not(arg).at(e.span), ast.T_BOOL)
        if isinstance(e, Neg):
            arg = self.check_expr(e.arg, env, idx)
            if arg.typ != T_ERROR and not self.is_numeric(arg.typ, idx):
                self.err(f"'-' expects a numeric operand, found {arg.typ}", e.span)
                return typed(Neg(arg).at(e.span), T_ERROR)
            t = ast.T_INT if arg.typ != T_ERROR and self.is_int_like(arg.typ, idx) \
                else ast.T_REAL
            return typed(Neg(arg).at(e.span), t)
        if isinstance(e, BinOp):
            return self.check_binop(e, env, idx)
        if isinstance(e, Cmp):
            return self.check_cmp(e, env, idx)
        if isinstance(e, Quant):
            self.check_quantifiable(e.var_type, idx, e.span)
            body = self.check_expr(e.body, {**env, e.var: e.var_type}, idx)
            if body.typ not in (ast.T_BOOL, T_ERROR):
                self.err(f"quantified body must be Bool, found {body.typ}", e.span)
            return typed(Quant(e.kind, e.var, e.var_type, body).at(e.span), ast.T_BOOL)
        if isinstance(e, Card):
            self.check_quantifiable(e.var_type, idx, e.span)
            body = self.check_expr(e.body, {**env, e.var: e.var_type}, idx)
            if body.typ not in (ast.T_BOOL, T_ERROR):
                self.err(f"cardinality condition must be Bool, found {body.typ}", e.span)
            return typed(Card(e.var, e.var_type, body).at(e.span), ast.T_INT)
        if isinstance(e, Agg):
            self.check_quantifiable(e.var_type, idx, e.span)
            term = self.check_expr(e.term, {**env, e.var: e.var_type}, idx)
            if term.typ != T_ERROR and not self.is_numeric(term.typ, idx):
                self.err(f"{e.kind} expects a numeric term, found {term.typ}", e.span)
                return typed(Agg(e.kind, e.var, e.var_type, term).at(e.span), T_ERROR)
            t = ast.T_INT if term.typ == T_ERROR or self.is_int_like(term.typ, idx) \
                else ast.T_REAL
            return typed(Agg(e.kind, e.var, e.var_type, term).at(e.span), t)
        if isinstance(e, Ite):
            cond = self.check_expr(e.cond, env, idx)
            if cond.typ not in (ast.T_BOOL, T_ERROR):
                self.err(f"'if' condition must be Bool, found {cond.typ}", e.span)
            then = self.check_expr(e.then, env, idx)
            other = self.check_expr(e.other, env, idx)
            t = self._unify_branches(then, other, idx, e.span)
            return typed(Ite(cond, then, other).at(e.span), t)
        raise TypeError(f"unexpected node {type(e).__name__}")

    def check_quantifiable(self, t: TypeRef, idx: VocabIndex, span: Span) -> None:
        self.check_typeref(t, idx)
        # Int/Real binders are accepted here; grounding requires an extension

    def _unify_branches(self, then: Expr, other: Expr, idx: VocabIndex,
                        span: Span) -> TypeRef:
        a, b = then.typ, other.typ
        if T_ERROR in (a, b):
            return T_ERROR
        if a.name == b.name and self._same_sig(a.sig, b.sig):
            return a
        if self.is_numeric(a, idx) and self.is_numeric(b, idx):
            return self.join_numeric(a, b, idx)
        self.err(f"'if' branches have incompatible types {a} and {b}", span)
        return T_ERROR

    def check_apply(self, e: Apply, env: dict[str, TypeRef], idx: VocabIndex) -> Expr:
        decl = idx.symbols.get(e.symbol)
        args = tuple(self.check_expr(a, env, idx) for a in e.args)
        if decl is None:
            self.err(f"unknown symbol {e.symbol!r}", e.span)
            return typed(Apply(e.symbol, args).at(e.span), T_ERROR)
        if len(args) != decl.arity:
            self.err(f"{e.symbol!r} expects {decl.arity} argument(s), got {len(args)}",
                     e.span)
            return typed(Apply(e.symbol, args).at(e.span), T_ERROR)
        for expected, arg in zip(decl.arg_types, args):
            if not self.compatible(expected, arg.typ, idx, arg):
                self.err(f"argument of {e.symbol!r}: expected {expected}, "
                         f"found {arg.typ}", arg.span or e.span)
        return typed(Apply(e.symbol, args).at(e.span), decl.result)

    def check_dollar(self, e: DollarApp, env: dict[str, TypeRef],
                     idx: VocabIndex) -> Expr:
        concept = self.check_expr(e.concept, env, idx)
        args = tuple(self.check_expr(a, env, idx) for a in e.args)
        t = concept.typ
        if t == T_ERROR:
            return typed(DollarApp(concept, args).at(e.span), T_ERROR)
        if t.name != ast.CONCEPT or t.sig is None:
            self.err("'$' expects a term of a parameterized Concept type "
                     f"(Concept[...]), found {t}", e.span)
            return typed(DollarApp(concept, args).at(e.span), T_ERROR)
        if len(args) != len(t.sig.args):
            self.err(f"'$' application expects {len(t.sig.args)} argument(s), "
                     f"got {len(args)}", e.span)
            return typed(DollarApp(concept, args).at(e.span), T_ERROR)
        for expected, arg in zip(t.sig.args, args):
            if not self.compatible(expected, arg.typ, idx, arg):
                self.err(f"'$' argument: expected {expected}, found {arg.typ}",
                         arg.span or e.span)
        return typed(DollarApp(concept, args).at(e.span), t.sig.result)

    def check_binop(self, e: BinOp, env: dict[str, TypeRef], idx: VocabIndex) -> Expr:
        left = self.check_expr(e.left, env, idx)
        right = self.check_expr(e.right, env, idx)
        if e.op in ("&", "|", "=>", "<=>"):
            for side in (left, right):
                if side.typ not in (ast.T_BOOL, T_ERROR):
                    self.err(f"{e.op!r} expects Bool operands, found {side.typ}",
                             side.span or e.span)
            return typed(BinOp(e.op, left, right).at(e.span), ast.T_BOOL)
        for side in (left, right):
            if side.typ != T_ERROR and not self.is_numeric(side.typ, idx):
                self.err(f"{e.op!r} expects numeric operands, found {side.typ}",
                         side.span or e.span)
                return typed(BinOp(e.op, left, right).at(e.span), T_ERROR)
        if e.op == "/":
            t = ast.T_REAL  # division is real regardless of operand types
        elif T_ERROR in (left.typ, right.typ):
            t = T_ERROR
        else:
            t = self.join_numeric(left.typ, right.typ, idx)
        return typed(BinOp(e.op, left, right).at(e.span), t)

    def check_cmp(self, e: Cmp, env: dict[str, TypeRef], idx: VocabIndex) -> Expr:
        operands = tuple(self.check_expr(o, env, idx) for o in e.operands)
        for op, a, b in zip(e.ops, operands, operands[1:]):
            ta, tb = a.typ, b.typ
            if T_ERROR in (ta, tb):
                continue
            if op in NUMERIC_CMP:
                for side in (a, b):
                    if not self.is_numeric(side.typ, idx):
                        self.err(f"{op!r} expects numeric operands, found {side.typ}",
                                 side.span or e.span)
            else:
                if not (self.compatible(ta, tb, idx, b) or self.compatible(tb, ta, idx, a)):
                    self.err(f"cannot compare {ta} with {tb}", e.span)
        return typed(Cmp(operands, e.ops).at(e.span), ast.T_BOOL)

    # -- blocks ------------------------------------------------------------

    def check_theory(self, t: Theory, idx: VocabIndex) -> Theory:
        assertions: list = []
        for a in t.assertions:
            if isinstance(a, Axiom):
                expr = self.check_expr(a.expr, {}, idx)
                if expr.typ not in (ast.T_BOOL, T_ERROR):
                    self.err(f"axiom must be Bool, found {expr.typ}", a.span)
                assertions.append(Axiom(expr).at(a.span))
            else:
                assertions.append(self.check_definition(a, idx))
        return Theory(t.name, t.vocab_name, tuple(assertions)).at(t.span)

    def check_definition(self, d: Definition, idx: VocabIndex) -> Definition:
        rules = tuple(self.check_rule(r, idx) for r in d.rules)
        return Definition(rules).at(d.span)

    def check_rule(self, r: Rule, idx: VocabIndex) -> Rule:
        decl = idx.symbols.get(r.head.symbol)
        if decl is None:
            self.err(f"rule head symbol {r.head.symbol!r} is not declared", r.span)
            return r
        env: dict[str, TypeRef] = {}
        for var, typeref in r.binders:
            self.check_typeref(typeref, idx)
            env[var] = typeref
        if len(r.head.args) != decl.arity:
            self.err(f"rule head {r.head.symbol!r} expects {decl.arity} "
                     f"argument(s), got {len(r.head.args)}", r.span)
            return r
        # bare names in head args that are not declared elements become
        # implicitly quantified variables, typed by the head signature
        for pos, arg in enumerate(r.head.args):
            if isinstance(arg, NameRef) and arg.name not in env \
                    and arg.name not in idx.element_types:
                env[arg.name] = decl.arg_types[pos]
        head_args = []
        for expected, arg in zip(decl.arg_types, r.head.args):
            for node in ast.walk(arg):
                if isinstance(node, (Apply, DollarApp)):
                    self.err("rule head arguments must be variables or "
                             "constants", r.span)
                    break
            checked = self.check_expr(arg, env, idx)
            if not self.compatible(expected, checked.typ, idx, checked):
                self.err(f"rule head argument: expected {expected}, found "
                         f"{checked.typ}", checked.span or r.span)
            head_args.append(checked)
        head = typed(Apply(r.head.symbol, tuple(head_args)).at(r.head.span),
                     decl.result)
        value = None
        if r.value is not None:
            if decl.is_predicate:
                self.err(f"predicate rule head {r.head.symbol!r} cannot carry "
                         "'= term'", r.span)
            value = self.check_expr(r.value, env, idx)
            if value.typ != T_ERROR and not self.compatible(decl.result, value.typ,
                                                            idx, value):
                self.err(f"rule value: expected {decl.result}, found {value.typ}",
                         value.span or r.span)
        elif not decl.is_predicate:
            self.err(f"function rule head {r.head.symbol!r} needs '= term'", r.span)
        body = self.check_expr(r.body, env, idx)
        if body.typ not in (ast.T_BOOL, T_ERROR):
            self.err(f"rule body must be Bool, found {body.typ}", r.span)
        binders = tuple((v, env[v]) for v in env)
        return Rule(binders, head, value, body).at(r.span)

    def check_structure(self, block: StructureBlock, idx: VocabIndex) -> None:
        for en in block.enums:
            if en.target in idx.types:
                if en.kind not in ("set", "range"):
                    self.err(f"type {en.target!r} must be enumerated with a set "
                             "of elements", en.span)
                continue
            decl = idx.symbols.get(en.target)
            if decl is None:
                self.err(f"enumeration target {en.target!r} is not declared", en.span)
                continue
            if en.kind == "value":
                if decl.arity != 0:
                    self.err(f"{en.target!r} has arity {decl.arity}; enumerate it "
                             "with tuples", en.span)
            elif en.kind == "range":
                self.err(f"symbol {en.target!r} cannot be enumerated with a range",
                         en.span)
            elif en.kind == "set":
                if not decl.is_predicate:
                    self.err(f"function {en.target!r} needs '->' entries", en.span)
                for entry in en.items:
                    if len(entry) != decl.arity:
                        self.err(f"enumeration of {en.target!r}: expected "
                                 f"{decl.arity}-tuples", en.span)
                        break
            elif en.kind == "map":
                if decl.is_predicate:
                    self.err(f"predicate {en.target!r} takes plain tuples, "
                             "not '->' entries", en.span)
                for entry_args, _ in en.items:
                    if len(entry_args) != decl.arity:
                        self.err(f"enumeration of {en.target!r}: expected "
                                 f"{decl.arity}-tuples", en.span)
                        break

    def run(self) -> TypedKB:
        vocabs: dict[str, VocabIndex] = {}
        for v in self.kb.vocabularies:
            vocabs[v.name] = self.build_index(v)
        theories = []
        for t in self.kb.theories:
            theories.append(self.check_theory(t, vocabs[t.vocab_name]))
        for s in self.kb.structures:
            self.check_structure(s, vocabs[s.vocab_name])
        if self.diags:
            raise TypeErrors(self.diags)
        return TypedKB(self.kb, vocabs, tuple(theories), self.kb.structures)


def check(kb: KnowledgeBase) -> TypedKB:
    """Type-check a parsed KB; raises TypeErrors with all problems found."""
    return Checker(kb).run()


def check_expression(tkb: TypedKB, expr: Expr,
                     vocab_name: str | None = None) -> Expr:
    """Type-check a standalone closed expression against a vocabulary of an
    already-checked KB (CLI asserts, API literals, DMN cells)."""
    if vocab_name is None:
        idx = tkb.single_vocab()
    else:
        idx = tkb.vocabs[vocab_name]
    checker = Checker(tkb.kb)
    checked = checker.check_expr(expr, {}, idx)
    if checker.diags:
        raise TypeErrors(checker.diags)
    return checked
