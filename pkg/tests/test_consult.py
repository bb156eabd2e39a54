"""Interactive consultation: incremental propagation equals from-scratch,
conflicts are rejected with explanations, exploration stays safe."""

import random

import pytest

from fodot.consult import create_session
from fodot.errors import ConflictingAssert, InconsistentKB
from fodot.inference import Reasoner, UNKNOWN_STATUS
from fodot.lang import parse_kb
from fodot.structure import empty_structure
from fodot.typecheck import check

from kbgen import generate_instance


def table_of(state):
    return {a.text: a.status for a in state.atom_table()}


def test_create_session_fresh(voting):
    tkb, s = voting
    with create_session(tkb, s) as state:
        table = table_of(state)
        assert table["vote()"] == UNKNOWN_STATUS
        assert table["18 =< age()"] == UNKNOWN_STATUS


def test_unit_axiom_propagated_at_creation():
    kb = parse_kb("vocabulary V { p: () -> Bool } theory T:V { p(). }")
    tkb = check(kb)
    with create_session(tkb, empty_structure(tkb, "V")) as state:
        assert table_of(state)["p()"] == "propagated_true"


def test_unsatisfiable_kb_rejected():
    kb = parse_kb("vocabulary V { p: () -> Bool } theory T:V { p() & ~p(). }")
    tkb = check(kb)
    with pytest.raises(InconsistentKB):
        create_session(tkb, empty_structure(tkb, "V"))


def test_assert_retract_cycle(voting):
    tkb, s = voting
    with create_session(tkb, s) as state:
        before = table_of(state)
        state.apply_assert(("vote", ()), True)
        assert table_of(state)["18 =< age()"] == "propagated_true"
        state.apply_retract(("vote", ()))
        assert table_of(state) == before


def test_conflicting_assert_explained(voting):
    tkb, s = voting
    with create_session(tkb, s) as state:
        state.apply_assert(("vote", ()), True)
        with pytest.raises(ConflictingAssert) as e:
            state.apply_assert(("age", ()), 17)
        assert len(e.value.explanation.items) == 3
        # the rejected edit leaves the state untouched
        assert table_of(state)["18 =< age()"] == "propagated_true"
        assert ("age", ()) not in state.user_struct.user_facts()


def test_query_delegation(voting):
    from fodot.lang.parser import parse_expr_text
    from fodot.typecheck import check_expression
    tkb, s = voting
    with create_session(tkb, s) as state:
        state.apply_assert(("vote", ()), True)
        literal = state.reasoner.ground_expr(
            check_expression(tkb, parse_expr_text("18 =< age()")))
        explanation = state.explain(literal)
        assert sorted(explanation.labels()) == ["ax0", "fact0", "goal"]
        term = check_expression(tkb, parse_expr_text("age()"))
        value, _ = state.optimize(term, "minimize")
        assert value == 18


def _edit_space(tkb, struct):
    """All (key, value) pairs a user could assert."""
    from fodot.structure import extension_of, ground_terms_of
    idx = tkb.single_vocab()
    pairs = []
    for decl in idx.vocab.symbol_decls():
        terms = ground_terms_of(decl, idx, struct)
        if terms is None:
            continue
        ext = extension_of(decl.result, idx, struct)
        if ext is None:
            continue
        for key in terms:
            if struct.origin(key) == "enumeration":
                continue
            for v in ext:
                pairs.append((key, v))
    return pairs


@pytest.mark.parametrize("seed", range(8))
def test_incremental_equals_scratch(seed):
    instance, tkb, struct, models = generate_instance(
        seed + 900, max_space=400, max_models=50, require_sat=True)
    struct = instance.compile()[1]
    # strip user facts: the session starts from enumerations only
    from fodot.inference import Reasoner as R
    base = R._enum_only(struct)
    try:
        state = create_session(tkb, base)
    except InconsistentKB:
        return
    rng = random.Random(seed)
    edits = _edit_space(tkb, base)
    if not edits:
        state.close()
        return
    with state, Reasoner(tkb, base) as fresh:
        for _ in range(10):
            user_facts = state.user_struct.user_facts()
            if user_facts and rng.random() < 0.4:
                key = rng.choice(sorted(user_facts))
                state.apply_retract(key)
            else:
                key, value = rng.choice(edits)
                if state.user_struct.origin(key) == "user":
                    continue
                try:
                    state.apply_assert(key, value)
                except ConflictingAssert:
                    continue
            # cached table equals a from-scratch propagation on an
            # independent session
            fresh.set_facts(state.user_struct.user_facts())
            scratch = fresh.propagate()
            assert fresh.model_check(), "safe exploration violated"
            got = state.consequences
            assert got.order == scratch.order, instance.source
            for text in scratch.order:
                assert got.atoms[text].status == scratch.atoms[text].status, \
                    (instance.source, text)
                assert got.atoms[text].origin == scratch.atoms[text].origin, \
                    (instance.source, text)
            assert got.determined == scratch.determined, instance.source
