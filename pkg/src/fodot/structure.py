"""Partial structures: finite type extensions plus assignments of applied
ground terms, built from enumerations (under UNA/DCA/CA) and user facts.

Structures are immutable; assert/retract return new values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import (
    IncompleteEnumeration, MissingExtension, NotUserFact, OverwriteEnumeration,
    TypeMismatch, ValueOutsideType,
)
from .lang import ast
from .lang.ast import StructureBlock, SymbolDecl, TypeRef
from .typecheck import TypedKB, VocabIndex
from .values import SymRef, Value, value_text

ENUM = "enumeration"
USER = "user"

# an applied ground term: symbol name plus element arguments
TermKey = tuple[str, tuple[Value, ...]]


def term_text(key: TermKey) -> str:
    sym, args = key
    return f"{sym}({', '.join(value_text(a) for a in args)})"


@dataclass(frozen=True)
class Assignment:
    value: Value
    origin: str  # ENUM or USER


@dataclass(frozen=True)
class PartialStructure:
    vocab_name: str
    type_extensions: dict[str, tuple[Value, ...]] = field(default_factory=dict)
    assignments: dict[TermKey, Assignment] = field(default_factory=dict)

    def lookup(self, key: TermKey) -> Value | None:
        a = self.assignments.get(key)
        return a.value if a else None

    def origin(self, key: TermKey) -> str | None:
        a = self.assignments.get(key)
        return a.origin if a else None

    def user_facts(self) -> dict[TermKey, Value]:
        return {k: a.value for k, a in self.assignments.items() if a.origin == USER}

    def enum_facts(self) -> dict[TermKey, Value]:
        return {k: a.value for k, a in self.assignments.items() if a.origin == ENUM}


def extension_of(t: TypeRef, idx: VocabIndex,
                 struct: PartialStructure | None) -> tuple[Value, ...] | None:
    """Finite extension of a type, or None for unbounded Int/Real."""
    if t.name == ast.BOOL:
        return (False, True)
    if t.name in (ast.INT, ast.REAL):
        return None
    if t.name == ast.CONCEPT:
        if t.sig is not None:
            return tuple(SymRef(n) for n in idx.symbols_with_sig(t.sig))
        return tuple(SymRef(d.name) for d in idx.vocab.symbol_decls())
    if struct is not None and t.name in struct.type_extensions:
        return struct.type_extensions[t.name]
    decl = idx.types.get(t.name)
    if decl is not None and decl.elements is not None:
        return decl.elements
    return None


def ordinal_of(value: Value, ext: tuple[Value, ...]) -> int:
    return ext.index(value)


def _validate_value(value: Value, t: TypeRef, idx: VocabIndex,
                    extensions: dict[str, tuple[Value, ...]]) -> Value:
    if t.name == ast.BOOL:
        if not isinstance(value, bool):
            raise TypeMismatch(f"expected Bool, got {value_text(value)}")
        return value
    if t.name == ast.INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(f"expected Int, got {value_text(value)}")
        return value
    if t.name == ast.REAL:
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeMismatch(f"expected Real, got {value_text(value)}")
        return value
    if t.name == ast.CONCEPT:
        if not isinstance(value, SymRef) or value.name not in idx.symbols:
            raise TypeMismatch(f"expected a concept, got {value_text(value)}")
        return value
    ext = extensions.get(t.name)
    if ext is None:
        decl = idx.types.get(t.name)
        ext = decl.elements if decl else None
    if ext is None:
        raise MissingExtension(f"type {t.name!r} has no extension")
    if value not in ext:
        raise ValueOutsideType(
            f"{value_text(value)} is not an element of type {t.name!r}")
    return value


def build_structure(tkb: TypedKB, block: StructureBlock) -> PartialStructure:
    """Interpret a structure block; enumerated symbols become totally assigned
    (completion), everything else stays unknown."""
    idx = tkb.vocab_for(block.vocab_name)
    extensions: dict[str, tuple[Value, ...]] = {}
    for decl in idx.vocab.type_decls():
        if decl.elements is not None:
            extensions[decl.name] = decl.elements
    for en in block.enums:
        if en.target not in idx.types:
            continue
        if en.kind == "range":
            lo, hi = en.items
            values: tuple[Value, ...] = tuple(range(lo, hi + 1))
        else:
            seen: list[Value] = []
            for entry in en.items:
                if entry[0] in seen:
                    raise ValueOutsideType(
                        f"type {en.target!r} lists {value_text(entry[0])} twice")
                seen.append(entry[0])
            values = tuple(seen)
        declared = idx.types[en.target].elements
        if declared is not None and tuple(declared) != values:
            raise ValueOutsideType(
                f"type {en.target!r} is enumerated differently in the vocabulary")
        extensions[en.target] = values

    assignments: dict[TermKey, Assignment] = {}

    def arg_space(decl: SymbolDecl) -> list[tuple[Value, ...]]:
        spaces = []
        for t in decl.arg_types:
            ext = extension_of(t, idx, PartialStructure(block.vocab_name, extensions))
            if ext is None:
                raise MissingExtension(
                    f"argument type {t.name!r} of {decl.name!r} has no finite extension")
            spaces.append(ext)
        return [tuple(c) for c in itertools.product(*spaces)]

    for en in block.enums:
        if en.target in idx.types:
            continue
        decl = idx.symbols[en.target]
        if en.kind == "value":
            value = _validate_value(en.items, decl.result, idx, extensions)
            assignments[(decl.name, ())] = Assignment(value, ENUM)
        elif en.kind == "set":
            listed = set()
            for entry in en.items:
                args = tuple(
                    _validate_value(v, t, idx, extensions)
                    for v, t in zip(entry, decl.arg_types))
                listed.add(args)
                assignments[(decl.name, args)] = Assignment(True, ENUM)
            for args in arg_space(decl):
                if args not in listed:
                    assignments[(decl.name, args)] = Assignment(False, ENUM)
        elif en.kind == "map":
            entries: dict[tuple[Value, ...], Value] = {}
            for entry_args, value in en.items:
                args = tuple(
                    _validate_value(v, t, idx, extensions)
                    for v, t in zip(entry_args, decl.arg_types))
                if args in entries:
                    raise ValueOutsideType(
                        f"function {decl.name!r} maps {args} twice")
                entries[args] = _validate_value(value, decl.result, idx, extensions)
            missing = [a for a in arg_space(decl) if a not in entries]
            if missing:
                raise IncompleteEnumeration(
                    f"function {decl.name!r} has no value for "
                    f"{term_text((decl.name, missing[0]))}")
            for args, value in entries.items():
                assignments[(decl.name, args)] = Assignment(value, ENUM)
    return PartialStructure(block.vocab_name, extensions, assignments)


def empty_structure(tkb: TypedKB, vocab_name: str) -> PartialStructure:
    idx = tkb.vocab_for(vocab_name)
    extensions = {d.name: d.elements for d in idx.vocab.type_decls()
                  if d.elements is not None}
    return PartialStructure(vocab_name, extensions, {})


def assert_fact(tkb: TypedKB, s: PartialStructure, key: TermKey,
                value: Value) -> PartialStructure:
    idx = tkb.vocab_for(s.vocab_name)
    decl = idx.symbols.get(key[0])
    if decl is None:
        raise TypeMismatch(f"unknown symbol {key[0]!r}")
    if len(key[1]) != decl.arity:
        raise TypeMismatch(f"{key[0]!r} expects {decl.arity} argument(s)")
    for v, t in zip(key[1], decl.arg_types):
        _validate_value(v, t, idx, s.type_extensions)
    value = _validate_value(value, decl.result, idx, s.type_extensions)
    existing = s.assignments.get(key)
    if existing is not None and existing.origin == ENUM:
        raise OverwriteEnumeration(
            f"{term_text(key)} is fixed by an enumeration and cannot be overwritten")
    assignments = dict(s.assignments)
    assignments[key] = Assignment(value, USER)
    return replace(s, assignments=assignments)


def retract_fact(s: PartialStructure, key: TermKey) -> PartialStructure:
    existing = s.assignments.get(key)
    if existing is None or existing.origin != USER:
        raise NotUserFact(f"{term_text(key)} carries no user assertion")
    assignments = dict(s.assignments)
    del assignments[key]
    return replace(s, assignments=assignments)


def ground_terms_of(decl: SymbolDecl, idx: VocabIndex,
                    s: PartialStructure) -> list[TermKey] | None:
    """All applied ground terms of a symbol, or None when an argument type
    has no finite extension."""
    spaces = []
    for t in decl.arg_types:
        ext = extension_of(t, idx, s)
        if ext is None:
            return None
        spaces.append(ext)
    return [(decl.name, tuple(args)) for args in itertools.product(*spaces)]
