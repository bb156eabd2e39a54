"""Stateful interactive consultation: user edits trigger incremental
propagation, reusing previous results.

After an assert, atoms already propagated stay consequences (monotonicity),
so only unknown atoms are re-tested; after a retract, atoms that were not
consequences still are not, so only previously propagated atoms are
re-tested. The cached table always equals a from-scratch propagation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import Config
from .errors import ConflictingAssert, InconsistentKB
from .ground.grounder import fact_expr
from .ground.theory import make_atom
from .inference import (
    FALSE, PROPAGATED, TRUE, UNKNOWN_STATUS, USER, Consequences, Explanation,
    Reasoner,
)
from .lang.ast import Expr, Not
from .oracle import Model
from .structure import PartialStructure, TermKey, term_text
from .typecheck import TypedKB
from .values import Value, value_text

IRRELEVANT = "irrelevant"


@dataclass
class AtomView:
    text: str
    status: str            # user | propagated_true | propagated_false | unknown
    relevant: bool = True


@dataclass
class TermView:
    key: TermKey
    text: str
    symbol: str
    status: str            # user | value | unknown | irrelevant
    value: Value | None = None


class ConsultState:
    """One interactive consultation over a fixed KB."""

    def __init__(self, tkb: TypedKB, struct: PartialStructure,
                 config: Config | None = None):
        self.config = config or Config()
        self.reasoner = Reasoner(tkb, struct, self.config)
        self.user_struct = struct
        if not self.reasoner.model_check():
            self.reasoner.close()
            raise InconsistentKB("the knowledge base has no models")
        self.consequences: Consequences = self.reasoner.propagate()
        self.relevant: list[str] = []
        self.irrelevant: list[str] = []
        self._refresh_relevance()

    def close(self) -> None:
        self.reasoner.close()

    def __enter__(self) -> "ConsultState":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- edits -------------------------------------------------------------------

    def _refresh_relevance(self) -> None:
        if self.config.eager_relevance:
            self.relevant, self.irrelevant, _ = \
                self.reasoner.relevance(self.consequences)
        else:
            self.relevant = list(self.consequences.order)
            self.irrelevant = []

    def _atom_texts_of_fact(self, key: TermKey, value: Value) -> list[str]:
        expr = fact_expr(self.reasoner.tkb, self.reasoner.enum_struct, key, value)
        node = expr.arg if isinstance(expr, Not) else expr
        return [make_atom(node).text]

    def apply_assert(self, key: TermKey, value: Value) -> "ConsultState":
        from .structure import assert_fact
        tkb = self.reasoner.tkb
        new_struct = assert_fact(tkb, self.user_struct, key, value)

        # reject edits that contradict the current consequences, with the
        # minimal explanation of the conflict
        conflict = self._conflicts_with(key, value)
        if conflict is not None:
            raise ConflictingAssert(
                f"asserting {term_text(key)} = {value_text(value)} "
                "contradicts the current consequences", conflict)

        prior = self.consequences
        self.user_struct = new_struct
        self.reasoner.set_facts(new_struct.user_facts())
        candidates = [t for t, info in prior.atoms.items()
                      if info.status == UNKNOWN_STATUS or info.origin == USER]
        candidates += [t for t in self._atom_texts_of_fact(key, value)
                       if t not in prior.atoms]
        self.consequences = self.reasoner.propagate(
            candidates=candidates, prior=prior, keep_determined=True)
        self._refresh_relevance()
        return self

    def apply_retract(self, key: TermKey) -> "ConsultState":
        from .structure import retract_fact
        prior = self.consequences
        retracted_value = self.user_struct.lookup(key)
        self.user_struct = retract_fact(self.user_struct, key)
        self.reasoner.set_facts(self.user_struct.user_facts())
        candidates = [t for t, info in prior.atoms.items()
                      if info.origin == PROPAGATED]
        if retracted_value is not None:
            candidates += self._atom_texts_of_fact(key, retracted_value)
        self.consequences = self.reasoner.propagate(
            candidates=candidates, prior=prior, keep_determined=False)
        self._refresh_relevance()
        return self

    def _conflicts_with(self, key: TermKey, value: Value) -> Explanation | None:
        """Explanation when the new fact contradicts theory + current facts."""
        expr = fact_expr(self.reasoner.tkb, self.reasoner.enum_struct, key, value)
        from .smt.session import Assumption, UNSAT
        answer = self.reasoner.session.check_under(
            self.reasoner.fact_assumptions() + [Assumption("edit", expr)],
            want_core=False)
        if answer.status != UNSAT:
            return None
        # minimal inconsistent subset of T, S and the new fact
        return self.reasoner.explain(Not(expr),
                                     literal_text=f"{term_text(key)} = "
                                                  f"{value_text(value)}")

    # -- queries ---------------------------------------------------------------------

    def explain(self, literal: Expr, literal_text: str | None = None) -> Explanation:
        return self.reasoner.explain(literal, literal_text)

    def optimize(self, term: Expr, direction: str) -> tuple[Value, Model]:
        return self.reasoner.optimize(term, direction)

    def model_expand(self, max_models: int) -> list[Model]:
        return self.reasoner.model_expand(max_models)

    def atom_table(self) -> list[AtomView]:
        irrelevant = set(self.irrelevant)
        out = []
        for text in self.consequences.order:
            info = self.consequences.atoms[text]
            if info.origin == USER:
                status = USER
            elif info.status == TRUE:
                status = "propagated_true"
            elif info.status == FALSE:
                status = "propagated_false"
            else:
                status = UNKNOWN_STATUS
            out.append(AtomView(text, status, text not in irrelevant))
        return out

    def term_table(self) -> list[TermView]:
        """Per applied ground term: user/value/unknown/irrelevant status."""
        cons = self.consequences
        irrelevant = set(self.irrelevant)
        enum_struct = self.reasoner.enum_struct
        out = []
        for key, info in self.reasoner.gt.terms.items():
            if info.internal:
                continue
            text = term_text(key)
            origin = self.user_struct.origin(key)
            if origin == "user":
                out.append(TermView(key, text, key[0], USER,
                                    self.user_struct.lookup(key)))
            elif key in cons.determined:
                out.append(TermView(key, text, key[0], "value",
                                    cons.determined[key]))
            else:
                atom_texts = self._term_atom_texts(key, info)
                decided = [t for t in atom_texts
                           if cons.value_of(t) != UNKNOWN_STATUS]
                if info.result.name == "Bool" and decided:
                    status = cons.value_of(atom_texts[0])
                    out.append(TermView(
                        key, text, key[0], "value", status == TRUE))
                elif atom_texts and all(t in irrelevant for t in atom_texts):
                    out.append(TermView(key, text, key[0], IRRELEVANT))
                else:
                    out.append(TermView(key, text, key[0], UNKNOWN_STATUS))
        for key, assignment in enum_struct.enum_facts().items():
            out.append(TermView(key, term_text(key), key[0], "value",
                                assignment))
        return out

    def _term_atom_texts(self, key: TermKey, info) -> list[str]:
        from .ground.theory import normalize_cmp, value_node
        from .lang.ast import Apply
        decl = self.reasoner.idx.symbols[key[0]]
        node = Apply(key[0], tuple(value_node(v, t.name)
                                   for v, t in zip(key[1], decl.arg_types)))
        if decl.result.name == "Bool":
            return [make_atom(node).text]
        if info.extension is None:
            return []
        return [make_atom(normalize_cmp("=", node,
                                        value_node(v, decl.result.name))).text
                for v in info.extension]


def create_session(tkb: TypedKB, struct: PartialStructure,
                   config: Config | None = None) -> ConsultState:
    """Start a consultation; fails with InconsistentKB when the KB plus its
    structure has no models."""
    return ConsultState(tkb, struct, config)
