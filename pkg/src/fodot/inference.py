"""The generic reasoning tasks: model checking, model expansion, propagation,
explanation, optimisation and relevance, over one compiled problem.

A Reasoner grounds theory + enumerations once and keeps a live solver
session; user facts travel as named assumptions so they can be asserted and
retracted without regrounding (the basis of incremental consultation).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .config import Config
from .errors import (
    GroundingError, Inconsistent, NotAConsequence, SolverUnknown, Unbounded,
)
from .ground import ground_theory
from .ground.grounder import Grounder, fact_expr
from .ground.simplify import atoms_in, simplify
from .ground.theory import (
    FACT, GroundAssertion, GroundAtom, GroundTheory, make_atom, node_value,
    normalize_cmp, value_node,
)
from .lang import ast
from .lang.ast import Apply, BoolLit, Expr, Not
from .lang.printer import print_expr
from .oracle import Model, eval_expr
from .structure import (
    ENUM, PartialStructure, TermKey, extension_of, ordinal_of, term_text,
)
from .smt.session import (
    SAT, UNKNOWN, UNSAT, Assumption, SolverSession,
)
from .typecheck import TypedKB
from .values import Value, is_number, value_text

TRUE = "true"
FALSE = "false"
UNKNOWN_STATUS = "unknown"

USER = "user"
PROPAGATED = "propagated"


@dataclass
class AtomInfo:
    atom: GroundAtom
    status: str = UNKNOWN_STATUS   # true | false | unknown
    origin: str | None = None      # user | propagated


@dataclass
class Consequences:
    order: list[str]
    atoms: dict[str, AtomInfo]
    determined: dict[TermKey, Value] = field(default_factory=dict)

    def value_of(self, text: str) -> str:
        info = self.atoms.get(text)
        return info.status if info else UNKNOWN_STATUS

    def decided(self) -> dict[str, bool]:
        return {t: i.status == TRUE for t, i in self.atoms.items()
                if i.status != UNKNOWN_STATUS}


@dataclass
class ExplanationItem:
    label: str
    kind: str
    source: str


@dataclass
class Explanation:
    items: list[ExplanationItem]

    def labels(self) -> list[str]:
        return [i.label for i in self.items]


def _fact_label(i: int) -> str:
    return f"fact{i}"


class Reasoner:
    """A compiled problem: typed KB + structure, ground theory, live session."""

    def __init__(self, tkb: TypedKB, struct: PartialStructure,
                 config: Config | None = None, force_levels: bool = False):
        self.tkb = tkb
        self.struct = struct
        self.config = config or Config()
        self.idx = tkb.single_vocab()
        enum_only = self._enum_only(struct)
        self.enum_struct = enum_only
        self.gt: GroundTheory = ground_theory(tkb, enum_only,
                                              include_facts=False,
                                              force_levels=force_levels)
        # the working session never extracts cores (explanations run on a
        # dedicated session), so skip assertion naming for faster checks
        self.session = SolverSession(self.config.solver_command,
                                     self.config.timeout_ms,
                                     named_assertions=False)
        self.session.load(self.gt, self.idx)
        self._explain_session: SolverSession | None = None
        self.facts: dict[TermKey, Value] = dict(struct.user_facts())

    @staticmethod
    def _enum_only(struct: PartialStructure) -> PartialStructure:
        return replace(struct, assignments={
            k: a for k, a in struct.assignments.items() if a.origin == ENUM})

    def close(self) -> None:
        self.session.close()
        if self._explain_session is not None:
            self._explain_session.close()

    def __enter__(self) -> "Reasoner":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- facts ------------------------------------------------------------------

    def set_facts(self, facts: dict[TermKey, Value]) -> None:
        self.facts = dict(facts)

    def fact_assumptions(self) -> list[Assumption]:
        out = []
        for i, (key, value) in enumerate(self.facts.items()):
            out.append(Assumption(
                _fact_label(i), fact_expr(self.tkb, self.enum_struct, key, value)))
        return out

    def fact_sources(self) -> dict[str, str]:
        return {_fact_label(i): f"{term_text(k)} = {value_text(v)}"
                for i, (k, v) in enumerate(self.facts.items())}

    def current_pool(self) -> list[GroundAtom]:
        pool = list(self.gt.atom_pool)
        seen = set(self.gt.atoms_by_text)
        for key, value in self.facts.items():
            expr = fact_expr(self.tkb, self.enum_struct, key, value)
            node = expr.arg if isinstance(expr, Not) else expr
            atom = make_atom(node)
            if atom.text not in seen:
                seen.add(atom.text)
                pool.append(atom)
        return pool

    # -- evaluation helpers ----------------------------------------------------------

    def eval_atom(self, atom: GroundAtom, model: Model) -> bool:
        return bool(eval_expr(atom.expr, {}, model, self.idx, self.enum_struct))

    def full_model(self, model: Model) -> Model:
        """Solver model extended with enumeration-origin assignments."""
        out = dict(self.enum_struct.enum_facts())
        out.update(model)
        return out

    # -- model checking -----------------------------------------------------------------

    def model_check(self) -> bool:
        answer = self.session.check_under(self.fact_assumptions(),
                                          want_core=False)
        if answer.status == UNKNOWN:
            raise SolverUnknown("solver answered unknown on model check")
        return answer.status == SAT

    # -- model expansion -------------------------------------------------------------------

    def model_expand(self, max_models: int) -> list[Model]:
        pool = self.current_pool()
        out: list[Model] = []
        self.session.push()
        try:
            for a in self.fact_assumptions():
                self.session.add_assertion(a.label, a.expr)
            for i in range(max_models):
                answer = self.session.check(want_model=True)
                if answer.status == UNSAT:
                    break
                if answer.status == UNKNOWN:
                    raise SolverUnknown("solver answered unknown during "
                                        "model expansion")
                typed = self.session.typed_model(answer, self.idx)
                full = self.full_model(typed)
                out.append(full)
                flips = [Not(a.expr) if self.eval_atom(a, full) else a.expr
                         for a in pool]
                blocking: Expr = BoolLit(False)
                for lit in flips:
                    blocking = lit if isinstance(blocking, BoolLit) \
                        else ast.BinOp("|", blocking, lit)
                self.session.add_assertion(f"block{i}", blocking)
        finally:
            self.session.pop()
        return out

    # -- propagation -----------------------------------------------------------------------

    def propagate(self, candidates: list[str] | None = None,
                  prior: Consequences | None = None,
                  keep_determined: bool = True) -> Consequences:
        """Backbone computation over the atom pool by iterative satisfiability
        testing with model-guided pruning.

        With `candidates`/`prior`, only the named atom texts are re-tested and
        every other status is carried over (the incremental path)."""
        pool = self.current_pool()
        order = [a.text for a in pool]
        atoms: dict[str, AtomInfo] = {a.text: AtomInfo(a) for a in pool}

        fact_atom_values: dict[str, bool] = {}
        for key, value in self.facts.items():
            expr = fact_expr(self.tkb, self.enum_struct, key, value)
            if isinstance(expr, Not):
                fact_atom_values[make_atom(expr.arg).text] = False
            else:
                fact_atom_values[make_atom(expr).text] = True
        for text, val in fact_atom_values.items():
            info = atoms.get(text)
            if info is not None:
                info.status = TRUE if val else FALSE
                info.origin = USER

        if prior is not None:
            allowed = set(candidates or [])
            for text, old in prior.atoms.items():
                info = atoms.get(text)
                if info is None or info.origin == USER or old.origin == USER:
                    continue
                if old.status != UNKNOWN_STATUS and text not in allowed:
                    info.status = old.status
                    info.origin = old.origin

        assumptions = self.fact_assumptions()
        self.session.push()
        try:
            for a in assumptions:
                self.session.add_assertion(a.label, a.expr)
            first = self.session.check(want_model=True)
            if first.status == UNSAT:
                raise Inconsistent("theory plus facts has no models")
            if first.status == UNKNOWN:
                raise SolverUnknown("solver answered unknown on initial check")
            model0 = self.full_model(self.session.typed_model(first, self.idx))

            witness: dict[str, bool] = {}
            todo: list[str] = []
            restricted = set(candidates) if candidates is not None else None
            for text in order:
                info = atoms[text]
                if info.status != UNKNOWN_STATUS:
                    continue
                if restricted is not None and text not in restricted:
                    continue
                witness[text] = self.eval_atom(info.atom, model0)
                todo.append(text)
            pruned: set[str] = set()
            for text in todo:
                if text in pruned:
                    continue
                info = atoms[text]
                value = witness[text]
                probe = Not(info.atom.expr) if value else info.atom.expr
                self.session.push()
                self.session.add_assertion("probe", probe)
                answer = self.session.check(want_model=True)
                self.session.pop()
                if answer.status == UNSAT:
                    info.status = TRUE if value else FALSE
                    info.origin = PROPAGATED
                elif answer.status == SAT:
                    pruned.add(text)
                    counter = self.full_model(
                        self.session.typed_model(answer, self.idx))
                    for other in todo:
                        if other in pruned:
                            continue
                        if self.eval_atom(atoms[other].atom, counter) \
                                != witness[other]:
                            pruned.add(other)
                # unknown: leave undecided (timeout)

            consequences = Consequences(order, atoms)
            self._determine_values(consequences, model0,
                                   prior if keep_determined else None)
            return consequences
        finally:
            self.session.pop()

    def _determine_values(self, cons: Consequences, model0: Model,
                          prior: Consequences | None) -> None:
        # finite-extension terms: value forced when its equality atom is true
        for key, info in self.gt.terms.items():
            if info.internal or info.extension is None \
                    or info.result.name == ast.BOOL:
                continue
            node = Apply(key[0], tuple(
                value_node(v, t.name) for v, t in
                zip(key[1], self.idx.symbols[key[0]].arg_types)))
            for v in info.extension:
                text = make_atom(normalize_cmp(
                    "=", node, value_node(v, info.result.name))).text
                if cons.value_of(text) == TRUE:
                    cons.determined[key] = v
                    break
        # user-asserted values
        for key, value in self.facts.items():
            if not isinstance(value, bool):
                cons.determined[key] = value
        # numeric terms without extension: model-guided forced-value probe
        for key, info in self.gt.terms.items():
            if info.internal or key in cons.determined:
                continue
            if info.result.name not in (ast.INT, ast.REAL):
                continue
            if prior is not None and key in prior.determined:
                cons.determined[key] = prior.determined[key]
                continue
            v0 = model0.get(key)
            if v0 is None:
                continue
            node = Apply(key[0], tuple(
                value_node(v, t.name) for v, t in
                zip(key[1], self.idx.symbols[key[0]].arg_types)))
            probe = Not(normalize_cmp("=", node, value_node(v0)))
            answer = self.session.check_under(
                [Assumption("probe", probe)], want_core=False)
            if answer.status == UNSAT:
                cons.determined[key] = v0

    # -- explanation ----------------------------------------------------------------

    def _soft_assumptions(self) -> list[Assumption]:
        return [Assumption(a.label, a.expr)
                for a in self.gt.assertions if a.soft]

    def _get_explain_session(self) -> SolverSession:
        if self._explain_session is None:
            hard = GroundTheory(
                assertions=[a for a in self.gt.assertions if not a.soft],
                atom_pool=self.gt.atom_pool,
                atoms_by_text=self.gt.atoms_by_text,
                terms=self.gt.terms, sorts=self.gt.sorts,
                label_map={a.label: a for a in self.gt.assertions if not a.soft})
            session = SolverSession(self.config.solver_command,
                                    self.config.timeout_ms)
            session.load(hard, self.idx)
            self._explain_session = session
        return self._explain_session

    def explain(self, literal: Expr, literal_text: str | None = None) -> Explanation:
        """Deletion-minimized inconsistent subset of theory assertions, user
        facts and the negated literal."""
        session = self._get_explain_session()
        goal = Assumption("goal", Not(literal))
        soft = self._soft_assumptions() + self.fact_assumptions() + [goal]
        by_label = {a.label: a for a in soft}
        answer = session.check_under(soft, want_core=True)
        if answer.status == SAT:
            raise NotAConsequence(
                f"{literal_text or print_expr(literal)} is not a consequence")
        if answer.status == UNKNOWN:
            raise SolverUnknown("solver answered unknown during explanation")
        core = [l for l in (answer.core or []) if l in by_label]
        if not core:
            core = [a.label for a in soft]
        # deletion-based minimization
        kept = list(core)
        for label in list(core):
            if len(kept) <= 1:
                break
            trial = [by_label[l] for l in kept if l != label]
            result = session.check_under(trial, want_core=False)
            if result.status == UNSAT:
                kept.remove(label)
        items = []
        fact_sources = self.fact_sources()
        for label in kept:
            if label == "goal":
                items.append(ExplanationItem(
                    label, "negated-literal",
                    f"negation of {literal_text or print_expr(literal)}"))
            elif label in fact_sources:
                items.append(ExplanationItem(label, FACT, fact_sources[label]))
            else:
                assertion = self.gt.label_map[label]
                items.append(ExplanationItem(label, assertion.kind,
                                             assertion.source))
        return Explanation(items)

    # -- optimisation -----------------------------------------------------------------

    def ground_expr(self, expr: Expr) -> Expr:
        """Ground a typed closed expression against the loaded problem. The
        result may only mention constants the session already declared."""
        grounder = Grounder(self.tkb, self.enum_struct)
        grounder.gt.terms = dict(self.gt.terms)
        out = grounder.ground(expr, {})
        if grounder._aux:
            raise GroundingError(
                "min/max aggregates are not supported in this position")
        new = set(grounder.gt.terms) - set(self.gt.terms)
        if new:
            raise GroundingError(
                f"expression mentions terms outside the problem: "
                f"{', '.join(term_text(k) for k in sorted(new))}")
        return out

    def optimize(self, term: Expr, direction: str = "minimize",
                 term_source: str | None = None) -> tuple[Value, Model]:
        minimize = direction == "minimize"
        ground = self.ground_expr(term)
        info_ext = None
        typ = term.typ
        if typ is not None and typ.name not in (ast.INT, ast.REAL, ast.BOOL):
            info_ext = extension_of(typ, self.idx, self.enum_struct)
        numeric = typ is None or typ.name in (ast.INT, ast.REAL) or (
            info_ext is not None and all(is_number(v) for v in info_ext))
        if info_ext is None and typ is not None \
                and typ.name not in (ast.INT, ast.REAL):
            raise GroundingError(
                f"cannot optimize a term of type {typ} without an extension")

        self.session.push()
        try:
            for a in self.fact_assumptions():
                self.session.add_assertion(a.label, a.expr)
            first = self.session.check(want_model=True)
            if first.status == UNSAT:
                raise Inconsistent("theory plus facts has no models")
            if first.status == UNKNOWN:
                raise SolverUnknown("solver answered unknown")
            best_model = self.full_model(self.session.typed_model(first, self.idx))
            best = eval_expr(ground, {}, best_model, self.idx, self.enum_struct)
            if info_ext is not None:
                value, model = self._optimize_finite(
                    ground, info_ext, best, best_model, minimize,
                    typ.name if typ is not None else None)
            elif typ is not None and typ.name == ast.INT:
                value, model = self._optimize_int(ground, best, best_model,
                                                  minimize)
            else:
                value, model = self._optimize_real(ground, best, best_model,
                                                   minimize)
            return value, model
        finally:
            self.session.pop()

    def _check_better(self, bound_expr: Expr, n: int):
        self.session.push()
        self.session.add_assertion(f"tighten{n}", bound_expr)
        answer = self.session.check(want_model=True)
        if answer.status == UNKNOWN:
            self.session.pop()
            raise SolverUnknown("solver answered unknown during optimisation")
        if answer.status == UNSAT:
            self.session.pop()
            return None
        model = self.full_model(self.session.typed_model(answer, self.idx))
        self.session.pop()
        # keep the improvement: assert it permanently inside the outer scope
        self.session.add_assertion(f"keep{n}", bound_expr)
        return model

    def _optimize_finite(self, ground, ext, best, best_model, minimize,
                         type_name: str | None):
        n = 0
        while True:
            ordinal = ordinal_of(best, ext)
            better_values = ext[:ordinal] if minimize else ext[ordinal + 1:]
            if not better_values:
                return best, best_model
            bound: Expr = BoolLit(False)
            for v in better_values:
                eq = normalize_cmp("=", ground, value_node(v, type_name))
                bound = eq if isinstance(bound, BoolLit) else \
                    ast.BinOp("|", bound, eq)
            model = self._check_better(bound, n)
            n += 1
            if model is None:
                return best, best_model
            best_model = model
            best = eval_expr(ground, {}, model, self.idx, self.enum_struct)

    def _unbounded_probe(self, ground, minimize) -> bool:
        big = 10 ** 12
        probe = normalize_cmp("=<", ground, value_node(-big)) if minimize \
            else normalize_cmp("=<", value_node(big), ground)
        answer = self.session.check_under([Assumption("probe", probe)],
                                          want_core=False)
        return answer.status == SAT

    def _optimize_int(self, ground, best, best_model, minimize):
        if self._unbounded_probe(ground, minimize):
            raise Unbounded("objective has no finite optimum")
        n = 0
        while True:
            bound = normalize_cmp("<", ground, value_node(best)) if minimize \
                else normalize_cmp("<", value_node(best), ground)
            model = self._check_better(bound, n)
            n += 1
            if model is None:
                return best, best_model
            best_model = model
            best = eval_expr(ground, {}, model, self.idx, self.enum_struct)

    def _optimize_real(self, ground, best, best_model, minimize):
        if self._unbounded_probe(ground, minimize):
            raise Unbounded("objective has no finite optimum")
        eps = Fraction(self.config.optimize_epsilon)
        best = Fraction(best)
        n = 0
        step = Fraction(1)
        lo = None  # strict bound known unsatisfiable (for minimize)
        while lo is None:
            target = best - step if minimize else best + step
            bound = normalize_cmp("=<", ground, value_node(target)) if minimize \
                else normalize_cmp("=<", value_node(target), ground)
            model = self._check_better(bound, n)
            n += 1
            if model is None:
                lo = target
            else:
                best_model = model
                best = Fraction(eval_expr(ground, {}, model, self.idx,
                                          self.enum_struct))
                step *= 2
        # binary search the remaining interval down to eps
        while abs(best - lo) > eps:
            mid = (best + lo) / 2
            bound = normalize_cmp("=<", ground, value_node(mid)) if minimize \
                else normalize_cmp("=<", value_node(mid), ground)
            model = self._check_better(bound, n)
            n += 1
            if model is None:
                lo = mid
            else:
                best_model = model
                best = Fraction(eval_expr(ground, {}, model, self.idx,
                                          self.enum_struct))
        return best, best_model

    # -- relevance ------------------------------------------------------------------------

    def relevance(self, consequences: Consequences | None = None
                  ) -> tuple[list[str], list[str], Consequences]:
        """Partition pool atom texts into (relevant, irrelevant)."""
        cons = consequences or self.propagate()
        atom_facts = cons.decided()
        term_values = dict(cons.determined)
        residual = simplify(self.gt, atom_facts, term_values)
        occur: set[str] = set()
        for a in residual.assertions:
            atoms_in(a.expr, occur)
        relevant: list[str] = []
        irrelevant: list[str] = []
        for text in cons.order:
            info = cons.atoms[text]
            if info.status != UNKNOWN_STATUS or info.origin == USER:
                relevant.append(text)
                continue
            mentioned = atoms_in(info.atom.expr, set())
            if mentioned & occur:
                relevant.append(text)
            else:
                irrelevant.append(text)
        return relevant, irrelevant, cons


# -- module-level task API -----------------------------------------------------------


def model_check(tkb: TypedKB, struct: PartialStructure,
                config: Config | None = None) -> bool:
    with Reasoner(tkb, struct, config) as r:
        return r.model_check()


def model_expand(tkb: TypedKB, struct: PartialStructure, max_models: int,
                 config: Config | None = None) -> list[Model]:
    with Reasoner(tkb, struct, config) as r:
        return r.model_expand(max_models)


def propagate(tkb: TypedKB, struct: PartialStructure,
              config: Config | None = None) -> Consequences:
    with Reasoner(tkb, struct, config) as r:
        return r.propagate()


def explain(tkb: TypedKB, struct: PartialStructure, literal: Expr,
            config: Config | None = None) -> Explanation:
    with Reasoner(tkb, struct, config) as r:
        return r.explain(literal)


def optimize(tkb: TypedKB, struct: PartialStructure, term: Expr,
             direction: str = "minimize",
             config: Config | None = None) -> tuple[Value, Model]:
    with Reasoner(tkb, struct, config) as r:
        return r.optimize(term, direction)


def relevance(tkb: TypedKB, struct: PartialStructure,
              config: Config | None = None) -> tuple[list[str], list[str]]:
    with Reasoner(tkb, struct, config) as r:
        rel, irr, _ = r.relevance()
        return rel, irr
