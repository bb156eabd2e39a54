"""The six reasoning tasks against their stated examples and the oracle."""

import pytest

from fodot.errors import Inconsistent, NotAConsequence, TooLarge, Unbounded
from fodot.inference import FALSE, TRUE, UNKNOWN_STATUS, Reasoner
from fodot.lang import parse_kb
from fodot.lang.parser import parse_expr_text
from fodot.oracle import (
    eval_expr, model_signature, oracle_enumerate,
)
from fodot.structure import assert_fact, empty_structure
from fodot.typecheck import check, check_expression

from kbgen import generate_instance


def make(src, facts=()):
    kb = parse_kb(src)
    tkb = check(kb)
    vocab = kb.vocabularies[0].name
    struct = empty_structure(tkb, vocab)
    for text_key, value in facts:
        struct = assert_fact(tkb, struct, text_key, value)
    return tkb, struct


# -- model_check -------------------------------------------------------------------


def test_model_check_voting_free(voting):
    tkb, s = voting
    with Reasoner(tkb, s) as r:
        assert r.model_check() is True


def test_model_check_contradiction(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    s = assert_fact(tkb, s, ("age", ()), 17)
    with Reasoner(tkb, s) as r:
        assert r.model_check() is False


def test_model_check_empty_theory():
    tkb, s = make("vocabulary V { p: () -> Bool } theory T:V {}")
    with Reasoner(tkb, s) as r:
        assert r.model_check() is True


# -- model_expand ----------------------------------------------------------------------


def test_model_expand_unsat_gives_empty(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    s = assert_fact(tkb, s, ("age", ()), 17)
    with Reasoner(tkb, s) as r:
        assert r.model_expand(5) == []


def test_model_expand_forced_vote(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("age", ()), 20)
    with Reasoner(tkb, s) as r:
        models = r.model_expand(1)
    assert len(models) == 1
    assert models[0][("vote", ())] is True


def test_model_expand_distinct_and_valid(tc_graph):
    tkb, s = tc_graph
    with Reasoner(tkb, s) as r:
        models = r.model_expand(10)
    signatures = {model_signature(m) for m in models}
    assert len(signatures) == len(models)
    from fodot.oracle import check_model
    for m in models:
        assert check_model(tkb, s, m)


# -- propagation -------------------------------------------------------------------------


def test_propagate_vote_forces_age(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    with Reasoner(tkb, s) as r:
        cons = r.propagate()
    assert cons.value_of("18 =< age()") == TRUE
    assert cons.atoms["18 =< age()"].origin == "propagated"


def test_propagate_age_forces_vote_false(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("age", ()), 17)
    with Reasoner(tkb, s) as r:
        cons = r.propagate()
    assert cons.value_of("vote()") == FALSE
    assert cons.determined[("age", ())] == 17


def test_propagate_only_user_fact():
    tkb, s = make("vocabulary V { p: () -> Bool  q: () -> Bool } theory T:V {}")
    s = assert_fact(tkb, s, ("p", ()), True)
    with Reasoner(tkb, s) as r:
        cons = r.propagate()
    assert cons.value_of("p()") == TRUE
    assert cons.atoms["p()"].origin == "user"
    assert cons.value_of("q()") == UNKNOWN_STATUS


def test_propagate_inconsistent_raises(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    s = assert_fact(tkb, s, ("age", ()), 17)
    with Reasoner(tkb, s) as r:
        with pytest.raises(Inconsistent):
            r.propagate()


# -- explanation ------------------------------------------------------------------------------


def test_explain_vote_from_age(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("age", ()), 20)
    with Reasoner(tkb, s) as r:
        literal = r.ground_expr(check_expression(tkb, parse_expr_text("vote()")))
        explanation = r.explain(literal)
    assert sorted(explanation.labels()) == ["ax0", "fact0", "goal"]


def test_explain_self(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    with Reasoner(tkb, s) as r:
        literal = r.ground_expr(check_expression(tkb, parse_expr_text("vote()")))
        explanation = r.explain(literal)
    assert sorted(explanation.labels()) == ["fact0", "goal"]


def test_explain_drive(drive):
    from fodot.values import Value
    tkb, s0 = drive
    s = assert_fact(tkb, s0, ("has_license", ()), True)
    s = assert_fact(tkb, s, ("tested", ()), True)
    with Reasoner(tkb, s) as r:
        literal = r.ground_expr(
            check_expression(tkb, parse_expr_text("can_drive()")))
        explanation = r.explain(literal)
    kinds = sorted(i.kind for i in explanation.items)
    assert kinds == ["fact", "fact", "negated-literal", "rule"]
    rule_item = [i for i in explanation.items if i.kind == "rule"][0]
    assert "tested()" in rule_item.source


def test_explain_not_a_consequence(voting):
    tkb, s = voting
    with Reasoner(tkb, s) as r:
        literal = r.ground_expr(check_expression(tkb, parse_expr_text("vote()")))
        with pytest.raises(NotAConsequence):
            r.explain(literal)


def test_explanation_minimal(voting):
    """Every one-element-removed subset is satisfiable (solver-verified)."""
    from fodot.smt.session import Assumption
    tkb, s = voting
    s = assert_fact(tkb, s, ("age", ()), 20)
    with Reasoner(tkb, s) as r:
        literal = r.ground_expr(check_expression(tkb, parse_expr_text("vote()")))
        explanation = r.explain(literal)
        session = r._get_explain_session()
        soft = {a.label: a for a in
                r._soft_assumptions() + r.fact_assumptions()}
        from fodot.lang.ast import Not
        soft["goal"] = Assumption("goal", Not(literal))
        chosen = [soft[l] for l in explanation.labels()]
        assert session.check_under(chosen).status == "unsat"
        for drop in explanation.labels():
            subset = [soft[l] for l in explanation.labels() if l != drop]
            assert session.check_under(subset).status == "sat", drop


# -- optimisation ---------------------------------------------------------------------


def test_optimize_min_age(voting):
    tkb, s = voting
    s = assert_fact(tkb, s, ("vote", ()), True)
    with Reasoner(tkb, s) as r:
        term = check_expression(tkb, parse_expr_text("age()"))
        value, witness = r.optimize(term, "minimize")
    assert value == 18
    assert witness[("age", ())] == 18


def test_optimize_constant():
    tkb, s = make("vocabulary V { p: () -> Bool } theory T:V {}")
    with Reasoner(tkb, s) as r:
        term = check_expression(tkb, parse_expr_text("5"))
        value, _ = r.optimize(term, "minimize")
    assert value == 5


def test_optimize_maximize_count():
    tkb, s = make("vocabulary V { type Person := {Bob, Alice} "
                  "p: Person -> Bool } theory T:V {}")
    with Reasoner(tkb, s) as r:
        term = check_expression(
            tkb, parse_expr_text("#{x in Person: p(x)}"))
        value, witness = r.optimize(term, "maximize")
    assert value == 2


def test_optimize_unbounded():
    tkb, s = make("vocabulary V { n: () -> Int } theory T:V { n() < 100. }")
    with Reasoner(tkb, s) as r:
        term = check_expression(tkb, parse_expr_text("n()"))
        with pytest.raises(Unbounded):
            r.optimize(term, "minimize")


def test_optimize_real_epsilon():
    tkb, s = make("vocabulary V { x: () -> Real } theory T:V { x() > 3. }")
    from fractions import Fraction
    with Reasoner(tkb, s) as r:
        term = check_expression(tkb, parse_expr_text("x()"))
        value, witness = r.optimize(term, "minimize")
    assert Fraction(3) < Fraction(value) <= Fraction(3) + Fraction(1, 10 ** 6) * 2
    assert witness[("x", ())] == value


# -- relevance ------------------------------------------------------------------------


def test_relevance_consequent_known():
    tkb, s = make("vocabulary V { a: () -> Bool  b: () -> Bool } "
                  "theory T:V { a() => b(). }")
    s = assert_fact(tkb, s, ("b", ()), True)
    with Reasoner(tkb, s) as r:
        relevant, irrelevant, _ = r.relevance()
    assert irrelevant == ["a()"]
    assert relevant == ["b()"]


def test_relevance_antecedent_known():
    tkb, s = make("vocabulary V { a: () -> Bool  b: () -> Bool } "
                  "theory T:V { a() => b(). }")
    s = assert_fact(tkb, s, ("a", ()), True)
    with Reasoner(tkb, s) as r:
        relevant, irrelevant, cons = r.relevance()
    assert irrelevant == []
    assert cons.value_of("b()") == TRUE


def test_relevance_empty_structure():
    tkb, s = make("vocabulary V { a: () -> Bool  b: () -> Bool } "
                  "theory T:V { a() => b(). }")
    with Reasoner(tkb, s) as r:
        relevant, irrelevant, _ = r.relevance()
    assert irrelevant == []
    assert set(relevant) == {"a()", "b()"}


# -- oracle_enumerate ------------------------------------------------------------------


def test_oracle_voting_small():
    tkb, s = make("vocabulary V { type A := {16..18}  age: () -> A  "
                  "vote: () -> Bool } theory T:V { vote() <=> 18 =< age(). }")
    models = oracle_enumerate(tkb, s)
    got = sorted((m[("age", ())], m[("vote", ())]) for m in models)
    assert got == [(16, False), (17, False), (18, True)]


def test_oracle_free_proposition():
    tkb, s = make("vocabulary V { p: () -> Bool } theory T:V {}")
    assert len(oracle_enumerate(tkb, s)) == 2


def test_oracle_drive_truth_table():
    tkb, s = make("""
        vocabulary W {
            type A := {80, 90}
            has_license: () -> Bool  tested: () -> Bool
            can_drive: () -> Bool  age: () -> A
        }
        theory T:W {
            { can_drive() <- has_license() & age() =< 85.
              can_drive() <- has_license() & tested(). }
        }""")
    models = oracle_enumerate(tkb, s)
    for m in models:
        lic = m[("has_license", ())]
        tested = m[("tested", ())]
        age = m[("age", ())]
        expected = (lic and age <= 85) or (lic and tested)
        assert m[("can_drive", ())] == expected
    assert len(models) == 8  # free choices of lic, tested, age


def test_oracle_too_large():
    tkb, s = make("vocabulary V { type T := {0..3}  f: T*T -> T } "
                  "theory T1:V {}")
    with pytest.raises(TooLarge):
        oracle_enumerate(tkb, s, limit=10)


# -- oracle equivalence on random instances (small smoke; the full sweep is in
# the acceptance suite) ------------------------------------------------------------


@pytest.mark.parametrize("seed", range(6))
def test_monotone_propagation(seed):
    """Every literal propagated under S stays propagated under S' ⊇ S."""
    from fodot.structure import extension_of, ground_terms_of
    instance, tkb, struct, models = generate_instance(
        seed + 4000, max_space=400, max_models=60, require_sat=True)
    with Reasoner(tkb, struct) as r:
        before = r.propagate()
        # extend S with a fact drawn from one of the surviving models
        model = models[0]
        idx = tkb.single_vocab()
        extra = None
        for decl in idx.vocab.symbol_decls():
            terms = ground_terms_of(decl, idx, struct)
            if not terms:
                continue
            for key in terms:
                if struct.origin(key) is None and key in model:
                    extra = (key, model[key])
                    break
            if extra:
                break
        if extra is None:
            return
        from fodot.structure import assert_fact
        bigger = assert_fact(tkb, struct, extra[0], extra[1])
        r.set_facts(bigger.user_facts())
        after = r.propagate()
        for text in before.order:
            status = before.atoms[text].status
            if status != UNKNOWN_STATUS:
                assert after.atoms[text].status == status, \
                    (instance.source, text, extra)


@pytest.mark.parametrize("seed", range(12))
def test_tasks_agree_with_oracle(seed):
    instance, tkb, struct, models = generate_instance(
        seed + 500, max_space=500, max_models=60)
    with Reasoner(tkb, struct) as r:
        assert r.model_check() == bool(models), instance.source
        got = r.model_expand(len(models) + 3)
        assert {model_signature(m) for m in got} == \
            {model_signature(m) for m in models}, instance.source
        if models:
            cons = r.propagate()
            for text in cons.order:
                atom = cons.atoms[text].atom
                truths = {bool(eval_expr(atom.expr, {}, m, r.idx,
                                         r.enum_struct)) for m in models}
                status = cons.value_of(text)
                if truths == {True}:
                    assert status == TRUE, (instance.source, text)
                elif truths == {False}:
                    assert status == FALSE, (instance.source, text)
                else:
                    assert status == UNKNOWN_STATUS, (instance.source, text)
