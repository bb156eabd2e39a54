"""Unique-hit-policy decision tables: parsing, translation to definitions,
and completeness / overlap checking.

Table format:
    table <Name> U
    in: <expr> | ... ; out: <symbol> | ...
    <cell> | ... | <cell>
Cells are comparisons (`< 18.5`, `>= 30`), intervals (`[18.5..25)`), value
lists (`A, B`), or `-` for any.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import Config
from .errors import (
    MalformedTable, UnboundedInput, UnknownHitPolicy, UnknownSymbol,
)
from .lang import ast
from .lang.ast import (
    Apply, Axiom, BinOp, BoolLit, Cmp, Definition, Expr, IntLit, NameRef,
    RealLit, Rule, Theory,
)
from .lang.parser import parse_expr_text
from .lang.printer import print_expr
from .inference import Reasoner
from .oracle import eval_expr
from .structure import empty_structure
from .typecheck import TypedKB, check_expression
from .values import Value

HIT_UNIQUE = "U"


@dataclass
class Condition:
    """One input cell: kind 'any' | 'cmp' | 'interval' | 'values'."""

    kind: str
    op: str | None = None              # cmp
    value: Expr | None = None          # cmp
    low: Expr | None = None            # interval
    high: Expr | None = None
    low_closed: bool = True
    high_closed: bool = False
    values: tuple[Expr, ...] = ()      # value list

    def to_expr(self, subject: Expr) -> Expr:
        if self.kind == "any":
            return BoolLit(True)
        if self.kind == "cmp":
            return Cmp((subject, self.value), (self.op,))
        if self.kind == "interval":
            low_op = "=<" if self.low_closed else "<"
            high_op = "=<" if self.high_closed else "<"
            return Cmp((self.low, subject, self.high), (low_op, high_op))
        if len(self.values) == 1:
            return Cmp((subject, self.values[0]), ("=",))
        out: Expr = BoolLit(False)
        for v in self.values:
            eq = Cmp((subject, v), ("=",))
            out = eq if isinstance(out, BoolLit) else BinOp("|", out, eq)
        return out


@dataclass
class DecisionTable:
    name: str
    hit_policy: str
    inputs: list[tuple[Expr, list[Condition]]]
    outputs: list[tuple[str, list[Expr]]]

    @property
    def rows(self) -> int:
        return len(self.inputs[0][1]) if self.inputs else len(self.outputs[0][1])

    def row_body(self, row: int) -> Expr:
        body: Expr = BoolLit(True)
        for subject, conditions in self.inputs:
            cond = conditions[row].to_expr(subject)
            if isinstance(body, BoolLit):
                body = cond
            elif not (isinstance(cond, BoolLit) and cond.value):
                body = BinOp("&", body, cond)
        return body


_CMP_OPS = ("=<", ">=", "<", ">", "=", "~=")


def _parse_cell_value(text: str) -> Expr:
    return parse_expr_text(text)


def parse_condition(cell: str) -> Condition:
    cell = cell.strip()
    if cell in ("-", ""):
        return Condition("any")
    if cell[0] in "[(":
        low_closed = cell[0] == "["
        if cell[-1] not in ")]":
            raise MalformedTable(f"malformed interval {cell!r}")
        high_closed = cell[-1] == "]"
        body = cell[1:-1]
        if ".." not in body:
            raise MalformedTable(f"malformed interval {cell!r}")
        low_text, high_text = body.split("..", 1)
        return Condition("interval",
                         low=_parse_cell_value(low_text.strip()),
                         high=_parse_cell_value(high_text.strip()),
                         low_closed=low_closed, high_closed=high_closed)
    for op in _CMP_OPS:
        if cell.startswith(op):
            return Condition("cmp", op=op,
                             value=_parse_cell_value(cell[len(op):].strip()))
    values = tuple(_parse_cell_value(part.strip())
                   for part in cell.split(","))
    return Condition("values", values=values)


def parse_table(text: str) -> DecisionTable:
    lines = [line.strip() for line in text.strip().splitlines()
             if line.strip() and not line.strip().startswith("//")]
    if len(lines) < 2:
        raise MalformedTable("a table needs a header line and a columns line")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "table":
        raise MalformedTable("first line must be `table <Name> <policy>`")
    name, policy = header[1], header[2]
    if policy != HIT_UNIQUE:
        raise UnknownHitPolicy(f"hit policy {policy!r} is not supported "
                               "(only U)")
    columns = lines[1]
    if ";" not in columns:
        raise MalformedTable("second line must be `in: ... ; out: ...`")
    in_part, out_part = columns.split(";", 1)
    if not in_part.strip().startswith("in:") \
            or not out_part.strip().startswith("out:"):
        raise MalformedTable("second line must be `in: ... ; out: ...`")
    input_exprs = [parse_expr_text(c.strip())
                   for c in in_part.strip()[3:].split("|") if c.strip()]
    output_names = [c.strip() for c in out_part.strip()[4:].split("|")
                    if c.strip()]
    n_cols = len(input_exprs) + len(output_names)
    input_cells: list[list[Condition]] = [[] for _ in input_exprs]
    output_cells: list[list[Expr]] = [[] for _ in output_names]
    for line in lines[2:]:
        cells = [c.strip() for c in line.split("|")]
        if len(cells) != n_cols:
            raise MalformedTable(
                f"row has {len(cells)} cells, expected {n_cols}: {line!r}")
        for i, cell in enumerate(cells[:len(input_exprs)]):
            input_cells[i].append(parse_condition(cell))
        for j, cell in enumerate(cells[len(input_exprs):]):
            if cell in ("-", ""):
                raise MalformedTable("output cells cannot be blank")
            output_cells[j].append(_parse_cell_value(cell))
    if not output_cells or not output_cells[0]:
        raise MalformedTable("a table needs at least one row")
    return DecisionTable(name, policy,
                         list(zip(input_exprs, input_cells)),
                         list(zip(output_names, output_cells)))


def parse_table_file(path: str) -> DecisionTable:
    with open(path) as f:
        return parse_table(f.read())


def to_definition(table: DecisionTable, tkb: TypedKB,
                  vocab_name: str | None = None) -> Definition:
    """One rule per row: `out() = value <- row conditions`."""
    idx = tkb.vocabs[vocab_name] if vocab_name else tkb.single_vocab()
    rules = []
    for out_name, out_values in table.outputs:
        decl = idx.symbols.get(out_name)
        if decl is None:
            raise UnknownSymbol(f"output symbol {out_name!r} is not declared")
        for row in range(table.rows):
            body = table.row_body(row)
            head = Apply(out_name, ())
            value = None if decl.is_predicate else out_values[row]
            if decl.is_predicate:
                cell = out_values[row]
                if not isinstance(cell, BoolLit):
                    raise UnknownSymbol(
                        f"boolean output {out_name!r} expects true/false cells")
                if not cell.value:
                    continue  # false rows contribute no rule under completion
            rules.append(Rule((), head, value, body))
    if not rules:
        raise MalformedTable("the table produced no rules")
    return Definition(tuple(rules))


@dataclass
class TableReport:
    complete: bool
    gap_witness: dict[str, Value] | None
    unique: bool
    overlap_witness: tuple[int, int, dict[str, Value]] | None


def _bounds_axioms(table: DecisionTable, tkb: TypedKB,
                   bounds: dict[str, tuple[Value, Value]]) -> list[Expr]:
    out = []
    for subject, _ in table.inputs:
        text = print_expr(subject)
        typed = check_expression(tkb, subject)
        if typed.typ is not None and typed.typ.name in (ast.INT, ast.REAL):
            if text not in bounds:
                raise UnboundedInput(
                    f"input {text} is numeric: pass bounds, e.g. "
                    f'{{"{text}": (0, 100)}}')
            lo, hi = bounds[text]
            lo_node = IntLit(lo) if isinstance(lo, int) else RealLit(Fraction(lo))
            hi_node = IntLit(hi) if isinstance(hi, int) else RealLit(Fraction(hi))
            out.append(Cmp((lo_node, subject, hi_node), ("=<", "=<")))
    return out


def check_table(table: DecisionTable, tkb: TypedKB,
                bounds: dict[str, tuple[Value, Value]] | None = None,
                config: Config | None = None) -> TableReport:
    """Completeness: is some input in the bounded space matched by no row?
    Uniqueness: can two rows fire together? Witnesses are input valuations."""
    from .smt.session import Assumption

    bounds = bounds or {}
    vocab = tkb.single_vocab()
    base_axioms = _bounds_axioms(table, tkb, bounds)
    # the check ranges over the bounded input space only, independent of any
    # theory the KB may carry
    theory = Theory("check", vocab.vocab.name,
                    tuple(Axiom(check_expression(tkb, e))
                          for e in base_axioms))
    probe_tkb = TypedKB(tkb.kb, tkb.vocabs, (theory,), ())
    struct = empty_structure(tkb, vocab.vocab.name)

    with Reasoner(probe_tkb, struct, config) as reasoner:
        subjects = [(print_expr(subject),
                     reasoner.ground_expr(check_expression(tkb, subject)))
                    for subject, _ in table.inputs]

        def probe(extra: Expr) -> dict[str, Value] | None:
            ground = reasoner.ground_expr(check_expression(tkb, extra))
            answer = reasoner.session.check_under(
                [Assumption("probe", ground)], want_model=True,
                want_core=False)
            if answer.status != "sat":
                return None
            model = reasoner.full_model(
                reasoner.session.typed_model(answer, reasoner.idx))
            return {text: eval_expr(g, {}, model, reasoner.idx,
                                    reasoner.enum_struct)
                    for text, g in subjects}

        none_fire: Expr = BoolLit(True)
        for row in range(table.rows):
            none_fire = BinOp("&", none_fire, ast.Not(table.row_body(row)))
        gap = probe(none_fire)

        overlap = None
        for i in range(table.rows):
            for j in range(i + 1, table.rows):
                both = BinOp("&", table.row_body(i), table.row_body(j))
                w = probe(both)
                if w is not None:
                    overlap = (i, j, w)
                    break
            if overlap:
                break
    return TableReport(gap is None, gap, overlap is None, overlap)


def definition_theory(table: DecisionTable, tkb: TypedKB,
                      vocab_name: str | None = None) -> Theory:
    """The translated definition wrapped in a theory block."""
    defn = to_definition(table, tkb, vocab_name)
    vocab = vocab_name or tkb.single_vocab().vocab.name
    return Theory(f"{table.name}_def", vocab, (defn,))
