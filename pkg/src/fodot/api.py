"""Shared plumbing for the CLI and the HTTP service: loading KBs, parsing
facts and literals, and describing vocabularies for generic clients."""

from __future__ import annotations

from fractions import Fraction

from .errors import TypeMismatch
from .lang import ast, parse_kb
from .lang.ast import Apply, Cmp, Expr, KnowledgeBase, Not
from .lang.parser import parse_expr_text
from .lang.printer import print_expr
from .oracle import Undefined, eval_expr
from .structure import (
    PartialStructure, TermKey, assert_fact, build_structure, empty_structure,
    extension_of,
)
from .typecheck import TypedKB, check, check_expression
from .values import Ident, SymRef, Value


def load_kb(source: str) -> tuple[KnowledgeBase, TypedKB]:
    kb = parse_kb(source)
    return kb, check(kb)


def base_structure(tkb: TypedKB) -> PartialStructure:
    """Structure from the KB's structure blocks (merged), or an empty one."""
    idx = tkb.single_vocab()
    blocks = [b for b in tkb.structures if b.vocab_name == idx.vocab.name]
    if not blocks:
        return empty_structure(tkb, idx.vocab.name)
    merged = build_structure(tkb, blocks[0])
    for block in blocks[1:]:
        other = build_structure(tkb, block)
        extensions = dict(merged.type_extensions)
        for name, ext in other.type_extensions.items():
            if name in extensions and extensions[name] != ext:
                raise TypeMismatch(
                    f"type {name!r} enumerated differently in two blocks")
            extensions[name] = ext
        assignments = dict(merged.assignments)
        for key, a in other.assignments.items():
            if key in assignments and assignments[key] != a:
                raise TypeMismatch(
                    f"{key} enumerated differently in two blocks")
            assignments[key] = a
        merged = PartialStructure(merged.vocab_name, extensions, assignments)
    return merged


def pure_value(tkb: TypedKB, node: Expr) -> Value:
    idx = tkb.single_vocab()
    struct = empty_structure(tkb, idx.vocab.name)
    try:
        return eval_expr(node, {}, None, idx, struct)
    except Undefined:
        raise TypeMismatch(f"{print_expr(node)} is not a constant value")


def term_key(tkb: TypedKB, node: Expr) -> TermKey:
    if not isinstance(node, Apply):
        raise TypeMismatch(f"{print_expr(node)} is not an applied symbol")
    return (node.symbol, tuple(pure_value(tkb, a) for a in node.args))


def parse_fact(tkb: TypedKB, text: str) -> tuple[TermKey, Value]:
    """`term = value`, bare `term` (true) or `~term` (false)."""
    expr = check_expression(tkb, parse_expr_text(text))
    if isinstance(expr, Cmp) and expr.ops == ("=",):
        return term_key(tkb, expr.operands[0]), \
            pure_value(tkb, expr.operands[1])
    if isinstance(expr, Not):
        return term_key(tkb, expr.arg), False
    return term_key(tkb, expr), True


def parse_term(tkb: TypedKB, text: str) -> Expr:
    return check_expression(tkb, parse_expr_text(text))


def json_to_value(raw) -> Value:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        return Fraction(str(raw))
    if isinstance(raw, str):
        text = raw.strip()
        if text in ("true", "false"):
            return text == "true"
        try:
            return int(text)
        except ValueError:
            pass
        try:
            return Fraction(text)
        except ValueError:
            pass
        if text.startswith("`"):
            return SymRef(text[1:])
        return Ident(text)
    raise TypeMismatch(f"cannot interpret value {raw!r}")


def value_to_json(v: Value):
    if isinstance(v, bool) or isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return float(v) if v.denominator != 1 else int(v)
    return str(v)


def vocabulary_meta(tkb: TypedKB) -> dict:
    """Per symbol: name, signature and finite result extension. Enough for a
    client to render an input form with no KB-specific code."""
    idx = tkb.single_vocab()
    struct = base_structure(tkb)
    symbols = []
    for decl in idx.vocab.symbol_decls():
        ext = extension_of(decl.result, idx, struct)
        entry = {
            "name": decl.name,
            "args": [str(t) for t in decl.arg_types],
            "result": str(decl.result),
        }
        if ext is not None:
            entry["extension"] = [value_to_json(v) for v in ext]
        symbols.append(entry)
    types = {}
    for t in idx.vocab.type_decls():
        ext = extension_of(ast.TypeRef(t.name), idx, struct)
        types[t.name] = [value_to_json(v) for v in ext] if ext else None
    return {"vocabulary": idx.vocab.name, "symbols": symbols, "types": types}
