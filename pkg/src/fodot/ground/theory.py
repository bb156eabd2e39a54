"""Ground theories: named ground assertions over a finite atom pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import Span
from ..lang import ast
from ..lang.ast import Apply, BoolLit, Cmp, ConceptLit, ElemLit, Expr, IntLit, Not, RealLit, TypeRef
from ..lang.printer import print_expr
from ..structure import TermKey
from ..values import SymRef, Value, value_text

PROP = "propositional"
EQUALITY = "equality"
COMPARISON = "comparison"

AXIOM = "axiom"
RULE = "rule"
COMPLETION = "completion"
FACT = "fact"
DOMAIN = "domain"


def value_node(v: Value, type_name: str | None = None) -> Expr:
    if isinstance(v, bool):
        return BoolLit(v)
    if isinstance(v, Fraction):
        return RealLit(v)
    if isinstance(v, int):
        return IntLit(v)
    if isinstance(v, SymRef):
        return ConceptLit(v.name)
    return ElemLit(v, type_name or "")


def node_value(e: Expr) -> Value | None:
    """Constant value of a literal ground node, else None."""
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, RealLit):
        return e.value
    if isinstance(e, ElemLit):
        return e.value
    if isinstance(e, ConceptLit):
        return SymRef(e.name)
    return None


def is_constant(e: Expr) -> bool:
    return isinstance(e, (BoolLit, IntLit, RealLit, ElemLit, ConceptLit))


_FLIP = {"<": ">", ">": "<", "=<": ">=", ">=": "=<"}


def normalize_cmp(op: str, left: Expr, right: Expr) -> Expr:
    """Canonical binary comparison: orientation < / =< / =; constants on the
    right of equalities; ~= becomes negated equality."""
    if op == "~=":
        return Not(normalize_cmp("=", left, right))
    if op in (">", ">="):
        op, left, right = _FLIP[op], right, left
    if op == "=":
        lconst, rconst = is_constant(left), is_constant(right)
        if lconst and not rconst:
            left, right = right, left
        elif lconst == rconst and print_expr(left) > print_expr(right):
            left, right = right, left
    return Cmp((left, right), (op,))


def atom_kind(e: Expr) -> str | None:
    """Pool-atom kind of a ground node, or None if not an atom."""
    if isinstance(e, Apply):
        return PROP
    if isinstance(e, Cmp) and len(e.ops) == 1:
        return EQUALITY if e.ops[0] == "=" else COMPARISON
    return None


@dataclass(frozen=True)
class GroundAtom:
    text: str
    kind: str
    expr: Expr

    def __str__(self) -> str:
        return self.text


def make_atom(e: Expr) -> GroundAtom:
    kind = atom_kind(e)
    if kind is None:
        raise ValueError(f"not an atom: {print_expr(e)}")
    return GroundAtom(print_expr(e), kind, e)


@dataclass
class GroundAssertion:
    label: str
    expr: Expr
    kind: str = AXIOM
    soft: bool = True
    source: str = ""
    span: Span = field(default_factory=Span)

    def text(self) -> str:
        return print_expr(self.expr)


@dataclass
class TermInfo:
    key: TermKey
    smt_name: str
    result: TypeRef
    extension: tuple[Value, ...] | None
    internal: bool = False


@dataclass
class SortInfo:
    """A custom type at the solver level. Identifier/concept kinds become an
    uninterpreted sort with distinct constants; numeric kinds map onto Int or
    Real with per-term closure axioms."""

    name: str
    kind: str  # identifier | int | real | concept
    elements: tuple[Value, ...]
    smt_sort: str


def term_smt_name(key: TermKey) -> str:
    sym, args = key
    if not args:
        return sym
    return f"{sym}({','.join(value_text(a) for a in args)})"


def element_smt_name(sort: str, v: Value) -> str:
    if isinstance(v, SymRef):
        return f"{sort}.{v.name}"
    return f"{sort}.{value_text(v)}"


@dataclass
class GroundTheory:
    assertions: list[GroundAssertion] = field(default_factory=list)
    atom_pool: list[GroundAtom] = field(default_factory=list)
    atoms_by_text: dict[str, GroundAtom] = field(default_factory=dict)
    terms: dict[TermKey, TermInfo] = field(default_factory=dict)
    sorts: dict[str, SortInfo] = field(default_factory=dict)
    label_map: dict[str, GroundAssertion] = field(default_factory=dict)

    def add_assertion(self, a: GroundAssertion) -> None:
        if a.label in self.label_map:
            raise ValueError(f"duplicate assertion label {a.label!r}")
        self.label_map[a.label] = a
        self.assertions.append(a)

    def add_atom(self, atom: GroundAtom) -> GroundAtom:
        existing = self.atoms_by_text.get(atom.text)
        if existing is not None:
            return existing
        self.atoms_by_text[atom.text] = atom
        self.atom_pool.append(atom)
        return atom

    def dump(self) -> str:
        """Readable text form, one labeled assertion per line."""
        lines = []
        for a in self.assertions:
            lines.append(f"[{a.label}] {a.text()}")
        return "\n".join(lines) + ("\n" if lines else "")
