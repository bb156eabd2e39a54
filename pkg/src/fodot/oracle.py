"""Native evaluation of typed ASTs and brute-force model enumeration.

This is the test oracle: it never touches the grounding or solver paths.
Total structures are plain dicts from applied ground terms to values;
definitions are checked by least-fixpoint iteration over their ground rule
instances, stratum by stratum.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator

from .errors import FodotError, MissingExtension, TooLarge, UnstratifiedDefinition
from .graphs import sccs
from .lang import ast
from .lang.ast import (
    Agg, Apply, Axiom, BinOp, BoolLit, Card, Cmp, ConceptLit, Definition,
    DollarApp, ElemLit, Expr, IntLit, Ite, Neg, Not, Quant, RealLit, Rule,
    Variable,
)
from .structure import PartialStructure, TermKey, extension_of, ground_terms_of
from .typecheck import TypedKB, VocabIndex
from .values import SymRef, Value

Model = dict[TermKey, Value]


class Undefined(FodotError):
    """A term has no value in the (partial) assignment being evaluated."""


def _num(v: Value) -> int | Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
        raise Undefined(f"not a number: {v!r}")
    return v


def eval_expr(e: Expr, env: dict[str, Value], model: Model | None,
              idx: VocabIndex, struct: PartialStructure) -> Value:
    """Evaluate a typed expression. `model` provides values of applied
    ground terms; raises Undefined when one is missing."""
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
    if isinstance(e, Variable):
        return env[e.name]
    if isinstance(e, Apply):
        args = tuple(eval_expr(a, env, model, idx, struct) for a in e.args)
        key = (e.symbol, args)
        if model is None or key not in model:
            raise Undefined(f"no value for {key}")
        return model[key]
    if isinstance(e, DollarApp):
        concept = eval_expr(e.concept, env, model, idx, struct)
        if not isinstance(concept, SymRef):
            raise Undefined(f"'$' applied to non-concept {concept!r}")
        args = tuple(eval_expr(a, env, model, idx, struct) for a in e.args)
        key = (concept.name, args)
        if model is None or key not in model:
            raise Undefined(f"no value for {key}")
        return model[key]
    if isinstance(e, Not):
        return not eval_expr(e.arg, env, model, idx, struct)
    if isinstance(e, Neg):
        return -_num(eval_expr(e.arg, env, model, idx, struct))
    if isinstance(e, BinOp):
        if e.op == "&":
            return bool(eval_expr(e.left, env, model, idx, struct)) \
                and bool(eval_expr(e.right, env, model, idx, struct))
        if e.op == "|":
            return bool(eval_expr(e.left, env, model, idx, struct)) \
                or bool(eval_expr(e.right, env, model, idx, struct))
        if e.op == "=>":
            return (not eval_expr(e.left, env, model, idx, struct)) \
                or bool(eval_expr(e.right, env, model, idx, struct))
        if e.op == "<=>":
            return bool(eval_expr(e.left, env, model, idx, struct)) \
                == bool(eval_expr(e.right, env, model, idx, struct))
        left = _num(eval_expr(e.left, env, model, idx, struct))
        right = _num(eval_expr(e.right, env, model, idx, struct))
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            # division is total: x/0 is 0, matching the bundled solver
            return Fraction(0) if right == 0 else Fraction(left) / Fraction(right)
        raise TypeError(e.op)
    if isinstance(e, Cmp):
        prev = eval_expr(e.operands[0], env, model, idx, struct)
        for op, operand in zip(e.ops, e.operands[1:]):
            cur = eval_expr(operand, env, model, idx, struct)
            if op == "=":
                ok = prev == cur
            elif op == "~=":
                ok = prev != cur
            elif op == "<":
                ok = _num(prev) < _num(cur)
            elif op == ">":
                ok = _num(prev) > _num(cur)
            elif op == "=<":
                ok = _num(prev) <= _num(cur)
            else:
                ok = _num(prev) >= _num(cur)
            if not ok:
                return False
            prev = cur
        return True
    if isinstance(e, (Quant, Card, Agg)):
        ext = extension_of(e.var_type, idx, struct)
        if ext is None:
            raise MissingExtension(
                f"type {e.var_type} has no finite extension to iterate")
        if isinstance(e, Quant):
            values = (bool(eval_expr(e.body, {**env, e.var: v}, model, idx, struct))
                      for v in ext)
            return all(values) if e.kind == "!" else any(values)
        if isinstance(e, Card):
            return sum(1 for v in ext
                       if eval_expr(e.body, {**env, e.var: v}, model, idx, struct))
        terms = [_num(eval_expr(e.term, {**env, e.var: v}, model, idx, struct))
                 for v in ext]
        if e.kind == "sum":
            return sum(terms) if terms else 0
        if not terms:
            raise Undefined(f"{e.kind} over an empty extension")
        return min(terms) if e.kind == "min" else max(terms)
    if isinstance(e, Ite):
        if eval_expr(e.cond, env, model, idx, struct):
            return eval_expr(e.then, env, model, idx, struct)
        return eval_expr(e.other, env, model, idx, struct)
    raise TypeError(f"cannot evaluate {type(e).__name__}")


# -- definitions ----------------------------------------------------------------


def binder_envs(rule: Rule, idx: VocabIndex,
                struct: PartialStructure) -> Iterator[dict[str, Value]]:
    names = [v for v, _ in rule.binders]
    spaces = []
    for _, t in rule.binders:
        ext = extension_of(t, idx, struct)
        if ext is None:
            raise MissingExtension(
                f"rule variable type {t} has no finite extension")
        spaces.append(ext)
    for combo in itertools.product(*spaces):
        yield dict(zip(names, combo))


def _head_key(rule: Rule, env: dict[str, Value], idx: VocabIndex,
              struct: PartialStructure) -> TermKey:
    args = tuple(eval_expr(a, env, None, idx, struct) for a in rule.head.args)
    return (rule.head.symbol, args)


def _collect_deps(e: Expr, env: dict[str, Value], defined: set[str],
                  idx: VocabIndex, struct: PartialStructure,
                  pol: int, out: list[tuple[TermKey | str, int]]) -> None:
    """Occurrences of defined symbols with polarity 1, -1 or 0 (both).
    When an occurrence's arguments cannot be evaluated without a model the
    symbol name is recorded instead, meaning `every atom of this symbol`."""
    if isinstance(e, (Apply, DollarApp)):
        name = e.symbol if isinstance(e, Apply) else None
        if isinstance(e, DollarApp):
            try:
                concept = eval_expr(e.concept, env, None, idx, struct)
                name = concept.name if isinstance(concept, SymRef) else None
            except Undefined:
                name = None
        if name is not None and name in defined:
            try:
                args = tuple(eval_expr(a, env, None, idx, struct) for a in e.args)
                out.append(((name, args), pol))
            except (Undefined, MissingExtension):
                out.append((name, pol))
        elif isinstance(e, DollarApp) and name is None:
            for sym in defined:
                out.append((sym, 0))
        for a in e.args:
            _collect_deps(a, env, defined, idx, struct, 0, out)
        if isinstance(e, DollarApp):
            _collect_deps(e.concept, env, defined, idx, struct, 0, out)
        return
    if isinstance(e, Not):
        _collect_deps(e.arg, env, defined, idx, struct, -pol, out)
        return
    if isinstance(e, BinOp):
        if e.op == "=>":
            _collect_deps(e.left, env, defined, idx, struct, -pol, out)
            _collect_deps(e.right, env, defined, idx, struct, pol, out)
        elif e.op == "<=>":
            _collect_deps(e.left, env, defined, idx, struct, 0, out)
            _collect_deps(e.right, env, defined, idx, struct, 0, out)
        elif e.op in ("&", "|"):
            _collect_deps(e.left, env, defined, idx, struct, pol, out)
            _collect_deps(e.right, env, defined, idx, struct, pol, out)
        else:
            _collect_deps(e.left, env, defined, idx, struct, 0, out)
            _collect_deps(e.right, env, defined, idx, struct, 0, out)
        return
    if isinstance(e, Cmp):
        for o in e.operands:
            _collect_deps(o, env, defined, idx, struct, 0, out)
        return
    if isinstance(e, (Quant, Card, Agg)):
        ext = extension_of(e.var_type, idx, struct)
        if ext is None:
            raise MissingExtension(f"type {e.var_type} has no finite extension")
        inner = e.term if isinstance(e, Agg) else e.body
        inner_pol = pol if isinstance(e, Quant) else 0
        for v in ext:
            _collect_deps(inner, {**env, e.var: v}, defined, idx, struct,
                          inner_pol, out)
        return
    if isinstance(e, Ite):
        _collect_deps(e.cond, env, defined, idx, struct, 0, out)
        _collect_deps(e.then, env, defined, idx, struct, pol, out)
        _collect_deps(e.other, env, defined, idx, struct, pol, out)
        return
    for c in ast.children(e):
        _collect_deps(c, env, defined, idx, struct, pol, out)


class GroundDefinition:
    """Ground rule instances of one definition plus their dependency strata."""

    def __init__(self, defn: Definition, idx: VocabIndex, struct: PartialStructure):
        self.idx = idx
        self.struct = struct
        self.defined_symbols = {r.head.symbol for r in defn.rules}
        self.atoms: list[TermKey] = []
        for sym in sorted(self.defined_symbols):
            terms = ground_terms_of(idx.symbols[sym], idx, struct)
            if terms is None:
                raise MissingExtension(
                    f"defined symbol {sym!r} ranges over an infinite domain")
            self.atoms.extend(terms)
        self.is_predicate = {s: idx.symbols[s].is_predicate
                             for s in self.defined_symbols}
        # instances: (head_key, value_expr|None, body, env, deps)
        self.instances: list[tuple] = []
        succ: dict[TermKey, set[TermKey]] = {a: set() for a in self.atoms}
        self.negative_edges: set[tuple[TermKey, TermKey]] = set()
        by_symbol: dict[str, list[TermKey]] = {}
        for key in self.atoms:
            by_symbol.setdefault(key[0], []).append(key)
        for rule in defn.rules:
            for env in binder_envs(rule, idx, struct):
                head = _head_key(rule, env, idx, struct)
                deps: list[tuple[TermKey | str, int]] = []
                _collect_deps(rule.body, env, self.defined_symbols, idx, struct,
                              1, deps)
                if rule.value is not None:
                    _collect_deps(rule.value, env, self.defined_symbols, idx,
                                  struct, 0, deps)
                expanded: list[tuple[TermKey, int]] = []
                for target, pol in deps:
                    if isinstance(target, str):
                        expanded.extend((a, pol) for a in by_symbol[target])
                    else:
                        expanded.append((target, pol))
                for atom, pol in expanded:
                    succ[head].add(atom)
                    if pol <= 0:
                        self.negative_edges.add((head, atom))
                self.instances.append((head, rule.value, rule.body, env, expanded))
        self.strata = sccs(self.atoms, succ)
        comp_of: dict[TermKey, int] = {}
        for i, comp in enumerate(self.strata):
            for a in comp:
                comp_of[a] = i
        self.comp_of = comp_of
        for head, atom in self.negative_edges:
            if comp_of[head] == comp_of[atom]:
                raise UnstratifiedDefinition(
                    f"defined atom occurs under negation within its own "
                    f"recursive component (via {head[0]})")

    def least_model(self, model: Model) -> tuple[set[TermKey], Model] | None:
        """Least fixpoint given parameter values from `model`; None when two
        rules derive different values for the same function term."""
        derived_true: set[TermKey] = set()
        derived_fun: Model = {}

        class Overlay(dict):
            def __contains__(inner, key):  # noqa: N805
                sym = key[0]
                if sym in self.defined_symbols:
                    if self.is_predicate[sym]:
                        return True
                    return key in derived_fun
                return model is not None and key in model

            def __getitem__(inner, key):  # noqa: N805
                sym = key[0]
                if sym in self.defined_symbols:
                    if self.is_predicate[sym]:
                        return key in derived_true
                    return derived_fun[key]
                return model[key]

        overlay = Overlay()
        by_comp: dict[int, list[tuple]] = {}
        for inst in self.instances:
            by_comp.setdefault(self.comp_of[inst[0]], []).append(inst)
        for comp_id in range(len(self.strata)):
            instances = by_comp.get(comp_id, [])
            changed = True
            while changed:
                changed = False
                for head, value_expr, body, env, _ in instances:
                    try:
                        fired = bool(eval_expr(body, env, overlay, self.idx,
                                               self.struct))
                    except Undefined:
                        fired = False
                    if not fired:
                        continue
                    if self.is_predicate[head[0]]:
                        if head not in derived_true:
                            derived_true.add(head)
                            changed = True
                    else:
                        try:
                            value = eval_expr(value_expr, env, overlay, self.idx,
                                              self.struct)
                        except Undefined:
                            continue
                        if head in derived_fun:
                            if derived_fun[head] != value:
                                return None
                        else:
                            derived_fun[head] = value
                            changed = True
        return derived_true, derived_fun

    def holds_in(self, model: Model) -> bool:
        result = self.least_model(model)
        if result is None:
            return False
        derived_true, derived_fun = result
        for atom in self.atoms:
            if self.is_predicate[atom[0]]:
                if model.get(atom) != (atom in derived_true):
                    return False
            else:
                if atom not in derived_fun or model.get(atom) != derived_fun[atom]:
                    return False
        return True


def ground_definitions(tkb: TypedKB,
                       struct: PartialStructure) -> list[GroundDefinition]:
    out = []
    for theory in tkb.theories:
        idx = tkb.vocab_for(theory.vocab_name)
        for a in theory.assertions:
            if isinstance(a, Definition):
                out.append(GroundDefinition(a, idx, struct))
    return out


def check_model(tkb: TypedKB, struct: PartialStructure, model: Model,
                defs: list[GroundDefinition] | None = None) -> bool:
    """Is `model` (a total assignment) a model of all theories expanding the
    structure's assignments?"""
    for key, a in struct.assignments.items():
        if model.get(key) != a.value:
            return False
    idx = tkb.single_vocab()
    for theory in tkb.theories:
        for a in theory.assertions:
            if isinstance(a, Axiom):
                try:
                    if eval_expr(a.expr, {}, model, idx, struct) is not True:
                        return False
                except Undefined:
                    return False
    for gd in (defs if defs is not None else ground_definitions(tkb, struct)):
        if not gd.holds_in(model):
            return False
    return True


def oracle_enumerate(tkb: TypedKB, struct: PartialStructure,
                     limit: int = 10 ** 6) -> list[Model]:
    """All total structures over the extensions satisfying theory + structure,
    by exhaustive enumeration and native evaluation."""
    idx = tkb.single_vocab()
    fixed: Model = {k: a.value for k, a in struct.assignments.items()}
    slots: list[TermKey] = []
    spaces: list[tuple[Value, ...]] = []
    for decl in idx.vocab.symbol_decls():
        terms = ground_terms_of(decl, idx, struct)
        if terms is None:
            raise TooLarge(
                f"symbol {decl.name!r} takes arguments from an infinite type")
        ext = extension_of(decl.result, idx, struct)
        for key in terms:
            if key in fixed:
                continue
            if ext is None:
                raise TooLarge(
                    f"{decl.name!r} has an infinite result type and no "
                    "enumerated value")
            slots.append(key)
            spaces.append(ext)
    count = 1
    for s in spaces:
        count *= len(s)
        if count > limit:
            raise TooLarge(f"more than {limit} candidate structures")
    defs = ground_definitions(tkb, struct)
    models: list[Model] = []
    for combo in itertools.product(*spaces):
        model = dict(fixed)
        model.update(zip(slots, combo))
        if check_model(tkb, struct, model, defs):
            models.append(model)
    return models


def model_signature(model: Model) -> frozenset:
    return frozenset(model.items())
