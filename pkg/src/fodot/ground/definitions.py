"""Reduce definitions to classical ground assertions.

Non-recursive definitions become completion (rule directions plus a closure
per defined atom). Positive recursion gets bounded integer level variables:
every positive occurrence of a defined atom d in a body for head a is
strengthened to `d & level(d) < level(a)`, which pins the defined relation
to the least fixpoint. Negation inside a recursive component is rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import InfiniteQuantification, UnstratifiedDefinition
from ..graphs import sccs
from ..lang import ast
from ..lang.ast import (
    Apply, BinOp, BoolLit, Cmp, Definition, ElemLit, Expr, IntLit, Ite, Neg,
    Not, RealLit, Rule, TypeRef, Variable,
)
from ..lang.printer import print_expr, print_rule
from ..structure import TermKey, ground_terms_of
from ..values import Value
from .simplify import fold
from .theory import (
    COMPLETION, DOMAIN, RULE, GroundAssertion, make_atom, node_value,
    normalize_cmp, value_node,
)


def _pure_value(e: Expr, env: dict[str, Value]) -> Value:
    if isinstance(e, Variable):
        return env[e.name]
    v = node_value(e)
    if v is not None:
        return v
    if isinstance(e, Neg):
        return -_pure_value(e.arg, env)
    raise InfiniteQuantification(
        f"rule head argument {print_expr(e)} must be a variable or constant")


def _rule_envs(rule: Rule, grounder) -> list[dict[str, Value]]:
    names = [v for v, _ in rule.binders]
    spaces = []
    for _, t in rule.binders:
        spaces.append(grounder.extension(t, "rule variable"))
    return [dict(zip(names, combo)) for combo in itertools.product(*spaces)]


@dataclass
class _Instance:
    head: TermKey
    head_node: Expr          # ground head atom/term (may fold to a constant)
    value_node: Expr | None  # ground term for function rules
    body: Expr
    rule_idx: int
    source: str


def _walk_polarity(e: Expr, pol: int, defined: dict[str, bool], on_atom) -> None:
    """Visit defined-symbol occurrences with polarity 1/-1/0. Occurrences in
    term position (inside comparisons, arithmetic, ite terms) count as 0."""
    if isinstance(e, Apply):
        if e.symbol in defined:
            on_atom(e, pol if defined[e.symbol] else 0)
        return
    if isinstance(e, Not):
        _walk_polarity(e.arg, -pol, defined, on_atom)
        return
    if isinstance(e, BinOp):
        if e.op in ("&", "|"):
            _walk_polarity(e.left, pol, defined, on_atom)
            _walk_polarity(e.right, pol, defined, on_atom)
        elif e.op == "=>":
            _walk_polarity(e.left, -pol, defined, on_atom)
            _walk_polarity(e.right, pol, defined, on_atom)
        elif e.op == "<=>":
            _walk_polarity(e.left, 0, defined, on_atom)
            _walk_polarity(e.right, 0, defined, on_atom)
        else:  # arithmetic
            _walk_term(e.left, defined, on_atom)
            _walk_term(e.right, defined, on_atom)
        return
    if isinstance(e, Cmp):
        for o in e.operands:
            _walk_term(o, defined, on_atom)
        return
    if isinstance(e, Ite):  # boolean ite
        _walk_polarity(e.cond, 0, defined, on_atom)
        _walk_polarity(e.then, pol, defined, on_atom)
        _walk_polarity(e.other, pol, defined, on_atom)
        return


def _walk_term(e: Expr, defined: dict[str, bool], on_atom) -> None:
    if isinstance(e, Apply):
        if e.symbol in defined:
            on_atom(e, 0)
        return
    if isinstance(e, (Not, Neg)):
        _walk_term(e.arg, defined, on_atom)
        return
    if isinstance(e, BinOp):
        _walk_term(e.left, defined, on_atom)
        _walk_term(e.right, defined, on_atom)
        return
    if isinstance(e, Cmp):
        for o in e.operands:
            _walk_term(o, defined, on_atom)
        return
    if isinstance(e, Ite):
        _walk_polarity(e.cond, 0, defined, on_atom)
        _walk_term(e.then, defined, on_atom)
        _walk_term(e.other, defined, on_atom)


def _apply_key(e: Apply) -> TermKey:
    return (e.symbol, tuple(node_value(a) for a in e.args))


def reduce_definition(g, defn: Definition, def_id: int, *,
                      force_levels: bool = False) -> None:
    """Ground one definition and append its reduced assertions to g.gt."""
    idx, struct = g.idx, g.struct
    defined: dict[str, bool] = {r.head.symbol: idx.symbols[r.head.symbol].is_predicate
                                for r in defn.rules}

    instances: list[_Instance] = []
    for ri, rule in enumerate(defn.rules):
        source = print_rule(rule)
        for env in _rule_envs(rule, g):
            head_args = tuple(_pure_value(a, env) for a in rule.head.args)
            head_key = (rule.head.symbol, head_args)
            g._aux = []
            head_node = g.ground_apply(
                rule.head.symbol,
                [value_node(v, t.name) for v, t in
                 zip(head_args, idx.symbols[rule.head.symbol].arg_types)])
            body = g.ground(rule.body, env)
            vnode = g.ground(rule.value, env) if rule.value is not None else None
            for aux in g._aux:
                body = fold(BinOp("&", body, aux))
            g._aux = []
            instances.append(_Instance(head_key, head_node, vnode, body, ri, source))

    atoms: list[TermKey] = []
    for sym in sorted(defined):
        terms = ground_terms_of(idx.symbols[sym], idx, struct)
        if terms is None:
            raise InfiniteQuantification(
                f"defined symbol {sym!r} ranges over an infinite domain")
        atoms.extend(terms)
    n_atoms = len(atoms)

    succ: dict[TermKey, set[TermKey]] = {a: set() for a in atoms}
    neg_edges: list[tuple[TermKey, TermKey]] = []
    for inst in instances:
        deps: list[tuple[TermKey, int]] = []

        def record(node: Apply, pol: int, deps=deps) -> None:
            deps.append((_apply_key(node), pol))

        _walk_polarity(inst.body, 1, defined, record)
        if inst.value_node is not None:
            _walk_term(inst.value_node, defined, record)
        for dep, pol in deps:
            if dep not in succ:
                succ[dep] = set()
                atoms.append(dep)
            succ[inst.head].add(dep)
            if pol <= 0:
                neg_edges.append((inst.head, dep))

    strata = sccs(atoms, succ)
    comp_of: dict[TermKey, int] = {}
    recursive = False
    for i, comp in enumerate(strata):
        for a in comp:
            comp_of[a] = i
        if len(comp) > 1 or comp[0] in succ.get(comp[0], set()):
            recursive = True
    for head, dep in neg_edges:
        if comp_of[head] == comp_of[dep]:
            raise UnstratifiedDefinition(
                f"definition of {head[0]!r}: a defined atom occurs under "
                "negation (or through a function term) within its own "
                "recursive component")

    use_levels = recursive or force_levels
    level_vars: dict[TermKey, Apply] = {}

    def level_of(key: TermKey) -> Apply:
        node = level_vars.get(key)
        if node is None:
            node = g.fresh_const(ast.T_INT, f"lvl{def_id}_")
            level_vars[key] = node
        return node

    def guard(e: Expr, pol: int, head_level: Apply) -> Expr:
        if isinstance(e, Apply):
            if pol == 1 and e.symbol in defined and defined[e.symbol]:
                lv = level_of(_apply_key(e))
                return BinOp("&", e, Cmp((lv, head_level), ("<",)))
            return e
        if isinstance(e, Not):
            return Not(guard(e.arg, -pol, head_level))
        if isinstance(e, BinOp) and e.op in ("&", "|"):
            return BinOp(e.op, guard(e.left, pol, head_level),
                         guard(e.right, pol, head_level))
        if isinstance(e, BinOp) and e.op == "=>":
            return BinOp("=>", guard(e.left, -pol, head_level),
                         guard(e.right, pol, head_level))
        if isinstance(e, Ite):
            # reached only in formula position: branches keep polarity
            return Ite(e.cond, guard(e.then, pol, head_level),
                       guard(e.other, pol, head_level))
        return e

    # rule (if) directions are emitted unguarded: a true body forces the
    # head. Level guards go only on the closure below, which demands a
    # strictly-decreasing justification for every true defined atom and so
    # excludes unfounded loops.
    by_head: dict[TermKey, list[tuple[_Instance, Expr]]] = {a: [] for a in atoms}
    n = 0
    for inst in instances:
        guarded = inst.body
        if use_levels and defined[inst.head[0]]:
            guarded = guard(inst.body, 1, level_of(inst.head))
        by_head.setdefault(inst.head, []).append((inst, guarded))
        if defined[inst.head[0]]:
            direction = fold(BinOp("=>", inst.body, inst.head_node))
        else:
            eq = fold(normalize_cmp("=", inst.head_node, inst.value_node))
            direction = fold(BinOp("=>", inst.body, eq))
        g.gt.add_assertion(GroundAssertion(
            f"def{def_id}.r{inst.rule_idx}.{n}", direction, RULE, True,
            inst.source, defn.rules[inst.rule_idx].span))
        n += 1

    # closure: a defined atom holds only when some rule instance fires
    for k, key in enumerate(atoms):
        if key not in by_head:
            continue
        sym = key[0]
        if sym not in defined:
            continue
        if defined[sym]:
            head_node = g.ground_apply(
                sym, [value_node(v, t.name) for v, t in
                      zip(key[1], idx.symbols[sym].arg_types)])
            disj: Expr = BoolLit(False)
            for inst, body in by_head[key]:
                disj = fold(BinOp("|", disj, body))
            closure = fold(BinOp("=>", head_node, disj))
        else:
            head_node = g.ground_apply(
                sym, [value_node(v, t.name) for v, t in
                      zip(key[1], idx.symbols[sym].arg_types)])
            disj = BoolLit(False)
            for inst, body in by_head[key]:
                eq = fold(normalize_cmp("=", head_node, inst.value_node))
                disj = fold(BinOp("|", disj, fold(BinOp("&", body, eq))))
            closure = disj
        g.gt.add_assertion(GroundAssertion(
            f"def{def_id}.c{k}", closure, COMPLETION, True,
            f"only-if direction of the definition of {sym!r} "
            f"(atom {make_atom_text(key, idx)})", defn.span))

    if level_vars:
        bounds: Expr = BoolLit(True)
        for node in level_vars.values():
            bounds = fold(BinOp("&", bounds,
                                Cmp((IntLit(0), node, IntLit(n_atoms)),
                                    ("=<", "=<"))))
        bounds = _expand_chains(bounds)
        g.gt.add_assertion(GroundAssertion(
            f"def{def_id}.lvl", bounds, DOMAIN, False,
            "level bounds for the recursive definition", defn.span))


def make_atom_text(key: TermKey, idx) -> str:
    node = Apply(key[0], tuple(value_node(v, t.name) for v, t in
                               zip(key[1], idx.symbols[key[0]].arg_types)))
    return print_expr(node)


def _expand_chains(e: Expr) -> Expr:
    """Split chained comparisons into binary conjunctions (ground form)."""
    if isinstance(e, Cmp) and len(e.ops) > 1:
        out: Expr = BoolLit(True)
        for op, a, b in zip(e.ops, e.operands, e.operands[1:]):
            out = fold(BinOp("&", out, normalize_cmp(op, a, b)))
        return out
    if isinstance(e, BinOp):
        return BinOp(e.op, _expand_chains(e.left), _expand_chains(e.right))
    if isinstance(e, Not):
        return Not(_expand_chains(e.arg))
    return e
