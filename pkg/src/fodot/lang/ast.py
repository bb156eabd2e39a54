"""Abstract syntax for FO-dot knowledge bases.

All nodes are frozen dataclasses; equality and hashing are structural and
deliberately ignore source spans and type annotations, which are attached
out-of-band (see `Node.at` and `typed`). This makes parse/print round-trip
checks plain `==` comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from ..errors import Span
from ..values import Value

BOOL = "Bool"
INT = "Int"
REAL = "Real"
CONCEPT = "Concept"
BUILTIN_TYPES = (BOOL, INT, REAL, CONCEPT)


class Node:
    """Base for all AST nodes; carries span/typ outside dataclass fields."""

    span: Span = Span()
    typ: Optional["TypeRef"] = None

    def at(self, span: Span) -> "Node":
        object.__setattr__(self, "span", span)
        return self


def typed(node: "Expr", typ: "TypeRef") -> "Expr":
    object.__setattr__(node, "typ", typ)
    return node


# -- types ---------------------------------------------------------------------

@dataclass(frozen=True)
class Sig:
    args: tuple["TypeRef", ...]
    result: "TypeRef"


@dataclass(frozen=True)
class TypeRef(Node):
    """Reference to a type; `sig` is set only for Concept[...->...]."""

    name: str
    sig: Optional[Sig] = None

    def __str__(self) -> str:
        if self.sig is None:
            return self.name
        args = "*".join(str(a) for a in self.sig.args) if self.sig.args else "()"
        return f"{self.name}[{args}->{self.sig.result}]"


T_BOOL = TypeRef(BOOL)
T_INT = TypeRef(INT)
T_REAL = TypeRef(REAL)
T_CONCEPT = TypeRef(CONCEPT)


# -- expressions -----------------------------------------------------------------

class Expr(Node):
    pass


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class RealLit(Expr):
    value: Fraction


@dataclass(frozen=True)
class NameRef(Expr):
    """Bare identifier; resolved by the type checker to a variable or element."""

    name: str


@dataclass(frozen=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True)
class ElemLit(Expr):
    """A resolved domain element (identifier or number) of a named type."""

    value: Value
    type_name: str


@dataclass(frozen=True)
class ConceptLit(Expr):
    """`sym — a vocabulary symbol as a value."""

    name: str


@dataclass(frozen=True)
class Apply(Expr):
    symbol: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class DollarApp(Expr):
    """$(concept)(args): apply the interpretation of a concept-valued term."""

    concept: Expr
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    """op in & | => <=> + - * /"""

    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Cmp(Expr):
    """Comparison chain: operands o0 op0 o1 op1 o2 ...; ops in = ~= < > =< >=."""

    operands: tuple[Expr, ...]
    ops: tuple[str, ...]


@dataclass(frozen=True)
class Quant(Expr):
    """kind '!' (forall) or '?' (exists)."""

    kind: str
    var: str
    var_type: TypeRef
    body: Expr


@dataclass(frozen=True)
class Card(Expr):
    """#{v in T: condition}"""

    var: str
    var_type: TypeRef
    body: Expr


@dataclass(frozen=True)
class Agg(Expr):
    """kind in sum|min|max, over `lambda v in T: term`."""

    kind: str
    var: str
    var_type: TypeRef
    term: Expr


@dataclass(frozen=True)
class Ite(Expr):
    cond: Expr
    then: Expr
    other: Expr


# -- blocks -----------------------------------------------------------------------

@dataclass(frozen=True)
class TypeDecl(Node):
    name: str
    elements: Optional[tuple[Value, ...]] = None
    int_range: Optional[tuple[int, int]] = None  # printed {lo..hi} when set


@dataclass(frozen=True)
class SymbolDecl(Node):
    name: str
    arg_types: tuple[TypeRef, ...]
    result: TypeRef

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @property
    def is_predicate(self) -> bool:
        return self.result.name == BOOL


@dataclass(frozen=True)
class Vocabulary(Node):
    name: str
    decls: tuple[Union[TypeDecl, SymbolDecl], ...]

    def type_decls(self) -> list[TypeDecl]:
        return [d for d in self.decls if isinstance(d, TypeDecl)]

    def symbol_decls(self) -> list[SymbolDecl]:
        return [d for d in self.decls if isinstance(d, SymbolDecl)]


@dataclass(frozen=True)
class Rule(Node):
    """head [= value] <- body; binders are the explicitly quantified variables."""

    binders: tuple[tuple[str, TypeRef], ...]
    head: Apply
    value: Optional[Expr]
    body: Expr


@dataclass(frozen=True)
class Definition(Node):
    rules: tuple[Rule, ...]


@dataclass(frozen=True)
class Axiom(Node):
    expr: Expr


@dataclass(frozen=True)
class Theory(Node):
    name: str
    vocab_name: str
    assertions: tuple[Union[Axiom, Definition], ...]


@dataclass(frozen=True)
class Enumeration(Node):
    """kind 'value' (items: Value), 'set' (tuple of arg tuples),
    'map' (tuple of (args, value)), or 'range' (items: (lo, hi))."""

    target: str
    kind: str
    items: object


@dataclass(frozen=True)
class StructureBlock(Node):
    name: str
    vocab_name: str
    enums: tuple[Enumeration, ...]


@dataclass(frozen=True)
class KnowledgeBase(Node):
    vocabularies: tuple[Vocabulary, ...] = ()
    theories: tuple[Theory, ...] = ()
    structures: tuple[StructureBlock, ...] = ()

    def vocabulary(self, name: str) -> Vocabulary:
        for v in self.vocabularies:
            if v.name == name:
                return v
        raise KeyError(name)


# -- traversal helpers --------------------------------------------------------------

def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Not, Neg)):
        return (e.arg,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Cmp):
        return e.operands
    if isinstance(e, (Quant, Card)):
        return (e.body,)
    if isinstance(e, Agg):
        return (e.term,)
    if isinstance(e, Apply):
        return e.args
    if isinstance(e, DollarApp):
        return (e.concept, *e.args)
    if isinstance(e, Ite):
        return (e.cond, e.then, e.other)
    return ()


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def free_names(e: Expr, bound: frozenset[str] = frozenset()) -> set[str]:
    """Bare names not bound by an enclosing binder (pre-typecheck)."""
    if isinstance(e, NameRef):
        return set() if e.name in bound else {e.name}
    if isinstance(e, (Quant, Card, Agg)):
        inner = e.body if not isinstance(e, Agg) else e.term
        return free_names(inner, bound | {e.var})
    out: set[str] = set()
    for c in children(e):
        out |= free_names(c, bound)
    return out
