"""Recursive-descent parser for FO-dot source text.

Grammar reference: docs/grammar.ebnf. Binders (!x in T:, ?x in T:) extend
maximally to the right; comparison operators chain into a single Cmp node.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import Diagnostic, ParseErrors, Span
from ..values import Ident, SymRef, Value
from . import ast
from .ast import (
    Agg, Apply, Axiom, BinOp, BoolLit, Card, Cmp, ConceptLit, Definition,
    DollarApp, Enumeration, Expr, IntLit, Ite, KnowledgeBase, NameRef, Neg,
    Not, Quant, RealLit, Rule, Sig, StructureBlock, SymbolDecl, Theory,
    TypeDecl, TypeRef, Vocabulary,
)
from .lexer import DECIMAL, EOF, IDENT, INT, KW, OP, Token, tokenize

CMP_OPS = ("=", "~=", "<", ">", "=<", ">=")
AGG_KINDS = ("sum", "min", "max")


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if self.at(kind, text):
            return self.next()
        expected = what or (repr(text) if text else kind)
        raise self.error(f"expected {expected}, found {tok.text!r}" if tok.text
                         else f"expected {expected}, found end of input", tok.span)

    def error(self, message: str, span: Span) -> ParseErrors:
        return ParseErrors([Diagnostic(message, span)])

    # -- blocks -----------------------------------------------------------

    def parse_kb(self) -> KnowledgeBase:
        vocabularies: list[Vocabulary] = []
        theories: list[Theory] = []
        structures: list[StructureBlock] = []
        while not self.at(EOF):
            tok = self.peek()
            if self.at(KW, "vocabulary"):
                vocabularies.append(self.parse_vocabulary())
            elif self.at(KW, "theory"):
                theories.append(self.parse_theory())
            elif self.at(KW, "structure"):
                structures.append(self.parse_structure())
            else:
                raise self.error(
                    f"expected 'vocabulary', 'theory' or 'structure', found {tok.text!r}",
                    tok.span)
        kb = KnowledgeBase(tuple(vocabularies), tuple(theories), tuple(structures))
        self._validate_blocks(kb)
        return kb

    def _validate_blocks(self, kb: KnowledgeBase) -> None:
        diags: list[Diagnostic] = []
        for blocks, kind in ((kb.vocabularies, "vocabulary"),
                             (kb.theories, "theory"),
                             (kb.structures, "structure")):
            seen: set[str] = set()
            for b in blocks:
                if b.name in seen:
                    diags.append(Diagnostic(f"duplicate {kind} name {b.name!r}", b.span))
                seen.add(b.name)
        vnames = {v.name for v in kb.vocabularies}
        for b in (*kb.theories, *kb.structures):
            if b.vocab_name not in vnames:
                diags.append(Diagnostic(
                    f"block {b.name!r} references undeclared vocabulary {b.vocab_name!r}",
                    b.span))
        if diags:
            raise ParseErrors(diags)

    def parse_vocabulary(self) -> Vocabulary:
        start = self.expect(KW, "vocabulary")
        name = self.expect(IDENT, what="vocabulary name").text
        self.expect(OP, "{")
        decls: list = []
        while not self.at(OP, "}"):
            if self.at(KW, "type"):
                decls.append(self.parse_type_decl())
            else:
                decls.append(self.parse_symbol_decl())
        self.expect(OP, "}")
        return Vocabulary(name, tuple(decls)).at(start.span)

    def parse_type_decl(self) -> TypeDecl:
        start = self.expect(KW, "type")
        name = self.expect(IDENT, what="type name").text
        elements = None
        int_range = None
        if self.accept(OP, ":="):
            elements, int_range = self.parse_element_set()
        self.accept(OP, ".")
        return TypeDecl(name, elements, int_range).at(start.span)

    def parse_element_set(self) -> tuple[tuple[Value, ...], tuple[int, int] | None]:
        self.expect(OP, "{")
        if self.accept(OP, "}"):
            return (), None
        first = self.parse_value()
        if self.at(OP, ".."):
            self.next()
            hi_tok = self.peek()
            hi = self.parse_value()
            if not isinstance(first, int) or not isinstance(hi, int) or isinstance(first, bool):
                raise self.error("range bounds must be integer literals", hi_tok.span)
            self.expect(OP, "}")
            return tuple(range(first, hi + 1)), (first, hi)
        values = [first]
        while self.accept(OP, ","):
            values.append(self.parse_value())
        self.expect(OP, "}")
        return tuple(values), None

    def parse_value(self) -> Value:
        tok = self.peek()
        if self.accept(OP, "-"):
            num = self.parse_value()
            if isinstance(num, bool) or not isinstance(num, (int, Fraction)):
                raise self.error("expected a number after '-'", tok.span)
            return -num
        if tok.kind == INT:
            self.next()
            return int(tok.text)
        if tok.kind == DECIMAL:
            self.next()
            return Fraction(tok.text)
        if tok.kind == KW and tok.text in ("true", "false"):
            self.next()
            return tok.text == "true"
        if self.accept(OP, "`"):
            return SymRef(self.expect(IDENT, what="symbol name").text)
        if tok.kind == IDENT:
            self.next()
            return Ident(tok.text)
        raise self.error(f"expected a value, found {tok.text!r}", tok.span)

    def parse_symbol_decl(self) -> SymbolDecl:
        name_tok = self.expect(IDENT, what="symbol name")
        self.expect(OP, ":")
        args, result = self.parse_signature()
        return SymbolDecl(name_tok.text, args, result).at(name_tok.span)

    def parse_signature(self) -> tuple[tuple[TypeRef, ...], TypeRef]:
        args: list[TypeRef] = []
        if self.accept(OP, "("):
            self.expect(OP, ")")
        else:
            args.append(self.parse_typeref())
            while self.accept(OP, "*"):
                args.append(self.parse_typeref())
        self.expect(OP, "->")
        return tuple(args), self.parse_typeref()

    def parse_typeref(self) -> TypeRef:
        tok = self.expect(IDENT, what="type name")
        sig = None
        if tok.text == ast.CONCEPT and self.accept(OP, "["):
            args, result = self.parse_signature()
            sig = Sig(args, result)
            self.expect(OP, "]")
        return TypeRef(tok.text, sig).at(tok.span)

    def parse_theory(self) -> Theory:
        start = self.expect(KW, "theory")
        name = self.expect(IDENT, what="theory name").text
        self.expect(OP, ":")
        vocab = self.expect(IDENT, what="vocabulary name").text
        self.expect(OP, "{")
        assertions: list = []
        while not self.at(OP, "}"):
            if self.at(OP, "{"):
                assertions.append(self.parse_definition())
            else:
                span = self.peek().span
                expr = self.parse_expr()
                self.expect(OP, ".", what="'.' after axiom")
                assertions.append(Axiom(expr).at(span))
        self.expect(OP, "}")
        return Theory(name, vocab, tuple(assertions)).at(start.span)

    def parse_definition(self) -> Definition:
        start = self.expect(OP, "{")
        rules: list[Rule] = []
        while not self.at(OP, "}"):
            rules.append(self.parse_rule())
        if not rules:
            raise self.error("definition must contain at least one rule", start.span)
        self.expect(OP, "}")
        return Definition(tuple(rules)).at(start.span)

    def parse_rule(self) -> Rule:
        span = self.peek().span
        binders: list[tuple[str, TypeRef]] = []
        while self.accept(OP, "!"):
            var = self.expect(IDENT, what="variable name").text
            self.expect(KW, "in")
            binders.append((var, self.parse_typeref()))
            self.expect(OP, ":")
        head_expr = self.parse_expr()
        body: Expr = BoolLit(True)
        if self.accept(OP, "<-"):
            body = self.parse_expr()
        self.expect(OP, ".", what="'.' after rule")
        head, value = self._destructure_head(head_expr, span)
        return Rule(tuple(binders), head, value, body).at(span)

    def _destructure_head(self, expr: Expr, span: Span) -> tuple[Apply, Expr | None]:
        if isinstance(expr, BinOp) and expr.op == "|":
            raise self.error("rule head must be a single atom, not a disjunction", span)
        if isinstance(expr, Apply):
            return expr, None
        if (isinstance(expr, Cmp) and expr.ops == ("=",)
                and isinstance(expr.operands[0], Apply)):
            return expr.operands[0], expr.operands[1]
        raise self.error("rule head must be an applied symbol, optionally '= term'", span)

    def parse_structure(self) -> StructureBlock:
        start = self.expect(KW, "structure")
        name = self.expect(IDENT, what="structure name").text
        self.expect(OP, ":")
        vocab = self.expect(IDENT, what="vocabulary name").text
        self.expect(OP, "{")
        enums: list[Enumeration] = []
        while not self.at(OP, "}"):
            enums.append(self.parse_enumeration())
        self.expect(OP, "}")
        return StructureBlock(name, vocab, tuple(enums)).at(start.span)

    def parse_enumeration(self) -> Enumeration:
        name_tok = self.expect(IDENT, what="symbol or type name")
        self.expect(OP, ":=")
        if not self.at(OP, "{"):
            value = self.parse_value()
            self.accept(OP, ".")
            return Enumeration(name_tok.text, "value", value).at(name_tok.span)
        self.expect(OP, "{")
        if self.accept(OP, "}"):
            self.accept(OP, ".")
            return Enumeration(name_tok.text, "set", ()).at(name_tok.span)
        entries: list = []
        kind = "set"
        first = True
        while True:
            args = self.parse_entry_args()
            if first and len(args) == 1 and isinstance(args[0], int) and self.at(OP, ".."):
                self.next()
                hi = self.parse_value()
                if not isinstance(hi, int) or isinstance(hi, bool):
                    raise self.error("range bounds must be integer literals", self.peek().span)
                self.expect(OP, "}")
                self.accept(OP, ".")
                return Enumeration(name_tok.text, "range", (args[0], hi)).at(name_tok.span)
            if self.accept(OP, "->"):
                if first:
                    kind = "map"
                elif kind != "map":
                    raise self.error("cannot mix plain tuples and '->' entries", self.peek().span)
                entries.append((args, self.parse_value()))
            else:
                if kind == "map":
                    raise self.error("cannot mix plain tuples and '->' entries", self.peek().span)
                entries.append(args)
            first = False
            if not self.accept(OP, ","):
                break
        self.expect(OP, "}")
        self.accept(OP, ".")
        return Enumeration(name_tok.text, kind, tuple(entries)).at(name_tok.span)

    def parse_entry_args(self) -> tuple[Value, ...]:
        if self.accept(OP, "("):
            args = [self.parse_value()]
            while self.accept(OP, ","):
                args.append(self.parse_value())
            self.expect(OP, ")")
            return tuple(args)
        return (self.parse_value(),)

    # -- expressions --------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_iff()

    def parse_iff(self) -> Expr:
        left = self.parse_implies()
        while self.at(OP, "<=>"):
            span = self.next().span
            left = BinOp("<=>", left, self.parse_implies()).at(span)
        return left

    def parse_implies(self) -> Expr:
        left = self.parse_or()
        if self.at(OP, "=>"):
            span = self.next().span
            return BinOp("=>", left, self.parse_implies()).at(span)
        return left

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.at(OP, "|"):
            span = self.next().span
            left = BinOp("|", left, self.parse_and()).at(span)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_cmp()
        while self.at(OP, "&"):
            span = self.next().span
            left = BinOp("&", left, self.parse_cmp()).at(span)
        return left

    def parse_cmp(self) -> Expr:
        first = self.parse_sum()
        operands = [first]
        ops: list[str] = []
        span = None
        while self.peek().kind == OP and self.peek().text in CMP_OPS:
            tok = self.next()
            span = span or tok.span
            ops.append(tok.text)
            operands.append(self.parse_sum())
        if not ops:
            return first
        return Cmp(tuple(operands), tuple(ops)).at(span)

    def parse_sum(self) -> Expr:
        left = self.parse_prod()
        while self.peek().kind == OP and self.peek().text in ("+", "-"):
            tok = self.next()
            left = BinOp(tok.text, left, self.parse_prod()).at(tok.span)
        return left

    def parse_prod(self) -> Expr:
        left = self.parse_unary()
        while self.peek().kind == OP and self.peek().text in ("*", "/"):
            tok = self.next()
            left = BinOp(tok.text, left, self.parse_unary()).at(tok.span)
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if self.accept(OP, "~"):
            return Not(self.parse_unary()).at(tok.span)
        if self.accept(OP, "-"):
            return Neg(self.parse_unary()).at(tok.span)
        return self.parse_primary()

    def parse_binder_intro(self) -> tuple[str, TypeRef]:
        var = self.expect(IDENT, what="variable name").text
        self.expect(KW, "in")
        typeref = self.parse_typeref()
        self.expect(OP, ":")
        return var, typeref

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == OP and tok.text in ("!", "?"):
            self.next()
            var, typeref = self.parse_binder_intro()
            return Quant(tok.text, var, typeref, self.parse_expr()).at(tok.span)
        if self.accept(OP, "#"):
            self.expect(OP, "{")
            var, typeref = self.parse_binder_intro()
            body = self.parse_expr()
            self.expect(OP, "}")
            return Card(var, typeref, body).at(tok.span)
        if tok.kind == KW and tok.text in AGG_KINDS:
            self.next()
            self.expect(OP, "(")
            self.expect(KW, "lambda")
            var, typeref = self.parse_binder_intro()
            term = self.parse_expr()
            self.expect(OP, ")")
            return Agg(tok.text, var, typeref, term).at(tok.span)
        if self.accept(KW, "if"):
            cond = self.parse_expr()
            self.expect(KW, "then")
            then = self.parse_expr()
            self.expect(KW, "else")
            return Ite(cond, then, self.parse_expr()).at(tok.span)
        if self.accept(OP, "$"):
            self.expect(OP, "(")
            concept = self.parse_expr()
            self.expect(OP, ")")
            self.expect(OP, "(")
            args = self.parse_call_args()
            return DollarApp(concept, args).at(tok.span)
        if self.accept(OP, "`"):
            return ConceptLit(self.expect(IDENT, what="symbol name").text).at(tok.span)
        if self.accept(OP, "("):
            expr = self.parse_expr()
            self.expect(OP, ")")
            return expr
        if tok.kind == INT:
            self.next()
            return IntLit(int(tok.text)).at(tok.span)
        if tok.kind == DECIMAL:
            self.next()
            return RealLit(Fraction(tok.text)).at(tok.span)
        if tok.kind == KW and tok.text in ("true", "false"):
            self.next()
            return BoolLit(tok.text == "true").at(tok.span)
        if tok.kind == IDENT:
            self.next()
            if self.accept(OP, "("):
                return Apply(tok.text, self.parse_call_args()).at(tok.span)
            return NameRef(tok.text).at(tok.span)
        raise self.error(f"expected an expression, found {tok.text!r}"
                         if tok.text else "expected an expression, found end of input",
                         tok.span)

    def parse_call_args(self) -> tuple[Expr, ...]:
        if self.accept(OP, ")"):
            return ()
        args = [self.parse_expr()]
        while self.accept(OP, ","):
            args.append(self.parse_expr())
        self.expect(OP, ")")
        return tuple(args)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse FO-dot source into a KnowledgeBase; raises ParseErrors."""
    return Parser(tokenize(text)).parse_kb()


def parse_expr_text(text: str) -> Expr:
    """Parse a standalone expression (CLI asserts, DMN cells, tests)."""
    parser = Parser(tokenize(text))
    expr = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != EOF:
        raise parser.error(f"unexpected trailing input {tok.text!r}", tok.span)
    return expr
