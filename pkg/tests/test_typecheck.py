import pytest

from fodot.errors import TypeErrors
from fodot.lang import parse_kb
from fodot.lang.ast import BinOp, Card
from fodot.typecheck import check


def test_voting_well_typed():
    tkb = check(parse_kb(
        "vocabulary V { age: () -> Int  vote: () -> Bool } "
        "theory T:V { vote() <=> 18 =< age(). }"))
    axiom = tkb.theories[0].assertions[0].expr
    assert axiom.typ.name == "Bool"
    assert isinstance(axiom, BinOp)
    assert axiom.right.typ.name == "Bool"   # 18 =< age()


def test_wrong_argument_type():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { type Person := {Bob} "
                       "weight: Person -> Real } "
                       "theory T:V { weight(0) > 1. }"))
    assert "expected Person" in str(e.value)


def test_concept_counting_well_typed():
    tkb = check(parse_kb("""
        vocabulary V {
            type Person := {P1}
            Symptom: Concept[Person -> Bool] -> Bool
            fever: Person -> Bool
            cough: Person -> Bool
        }
        theory T:V {
            #{x in Concept[Person -> Bool]: Symptom(x) & $(x)(P1)} =< 2.
        }"""))
    card = tkb.theories[0].assertions[0].expr.operands[0]
    assert isinstance(card, Card)
    assert card.typ.name == "Int"


def test_dollar_on_plain_concept_rejected():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { c: () -> Concept  p: () -> Bool } "
                       "theory T:V { $(c())(). }"))
    assert "parameterized" in str(e.value)


def test_all_errors_reported():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { p: () -> Bool } "
                       "theory T:V { q(). r(). p() & 1 < 2. }"))
    messages = [d.message for d in e.value.diagnostics]
    assert len(messages) >= 2


def test_division_is_real():
    tkb = check(parse_kb("vocabulary V { a: () -> Int  b: () -> Int } "
                         "theory T:V { a() / b() =< 2. }"))
    cmp_expr = tkb.theories[0].assertions[0].expr
    assert cmp_expr.operands[0].typ.name == "Real"


def test_idempotent_annotations():
    src = ("vocabulary V { age: () -> Int  vote: () -> Bool } "
           "theory T:V { vote() <=> 18 =< age(). }")
    t1 = check(parse_kb(src))
    t2 = check(parse_kb(src))
    assert t1.theories == t2.theories


def test_implicit_rule_variables_typed_by_signature():
    tkb = check(parse_kb("""
        vocabulary G { type Vx := {1..3}  e: Vx*Vx -> Bool  t: Vx*Vx -> Bool }
        theory T:G { { t(x, y) <- e(x, y). } }"""))
    rule = tkb.theories[0].assertions[0].rules[0]
    binders = dict(rule.binders)
    assert binders["x"].name == "Vx"
    assert binders["y"].name == "Vx"


def test_function_rule_needs_value():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { f: () -> Int } "
                       "theory T:V { { f() <- true. } }"))
    assert "needs '= term'" in str(e.value)


def test_head_args_must_be_simple():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { type T := {A}  f: T -> T  "
                       "p: T -> Bool } theory T1:V { { p(f(A)) <- true. } }"))
    assert "variables or constants" in str(e.value)


def test_redeclared_builtin_type():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { type Int := {1, 2} }"))
    assert "built-in" in str(e.value)


def test_unbound_name():
    with pytest.raises(TypeErrors) as e:
        check(parse_kb("vocabulary V { p: Int -> Bool } theory T:V { p(x). }"))
    assert "unknown identifier" in str(e.value)
