"""Parser and pretty-printer: concrete examples plus the round-trip property."""

import pytest

from fodot.errors import ParseErrors
from fodot.lang import parse_kb, print_kb
from fodot.lang.ast import Axiom, BinOp, Card, Cmp, Definition, Quant
from fodot.lang.parser import parse_expr_text

from kbgen import Generator


def test_voting_kb_parses():
    kb = parse_kb("vocabulary V { age: () -> Int  vote: () -> Bool } "
                  "theory T:V { vote() <=> 18 =< age(). }")
    assert len(kb.vocabularies[0].decls) == 2
    assert len(kb.theories[0].assertions) == 1
    axiom = kb.theories[0].assertions[0]
    assert isinstance(axiom, Axiom)
    assert isinstance(axiom.expr, BinOp) and axiom.expr.op == "<=>"


def test_empty_theory():
    kb = parse_kb("vocabulary V { p: () -> Bool } theory T:V {}")
    assert kb.theories[0].assertions == ()


def test_multi_rule_definition():
    kb = parse_kb("""
        vocabulary W {
            can_drive: () -> Bool  has_license: () -> Bool
            tested: () -> Bool  age: () -> Int
        }
        theory T:W {
            { can_drive() <- has_license() & age() =< 85.
              can_drive() <- has_license() & tested(). }
        }""")
    definition = kb.theories[0].assertions[0]
    assert isinstance(definition, Definition)
    assert len(definition.rules) == 2
    assert definition.rules[0].head.symbol == "can_drive"


def test_round_trip_voting():
    kb = parse_kb("vocabulary V { age: () -> Int  vote: () -> Bool } "
                  "theory T:V { vote() <=> 18 =< age(). }")
    assert parse_kb(print_kb(kb)) == kb


def test_enumeration_round_trip():
    kb = parse_kb("vocabulary V { type Person  weight: Person -> Real } "
                  "structure S:V { Person := {Bob, Alice}. "
                  "weight := {Bob -> 80, Alice -> 80}. }")
    out = print_kb(kb)
    assert "Person := {Bob, Alice}" in out
    assert parse_kb(out) == kb


def test_cardinality_round_trip():
    kb = parse_kb("vocabulary V { type Person := {Bob}  p: Person -> Bool } "
                  "theory T:V { #{x in Person: p(x)} = 1. }")
    out = print_kb(kb)
    assert "#{x in Person: p(x)}" in out
    assert parse_kb(out) == kb


def test_comparison_chain():
    e = parse_expr_text("18 =< BMI() < 25")
    assert isinstance(e, Cmp)
    assert e.ops == ("=<", "<")


def test_binder_variants():
    a = parse_expr_text("!x in T: p(x)")
    b = parse_expr_text("!x ∈ T: p(x)")
    c = parse_expr_text("!x \\in T: p(x)")
    assert a == b == c
    assert isinstance(a, Quant)


def test_disjunctive_head_rejected():
    with pytest.raises(ParseErrors) as e:
        parse_kb("vocabulary V { a: () -> Bool  b: () -> Bool } "
                 "theory T:V { { a() | b() <- true. } }")
    assert "disjunction" in str(e.value)


def test_parse_error_has_position_and_hint():
    with pytest.raises(ParseErrors) as e:
        parse_kb("vocabulary V { p: () -> Bool } theory T:V { p( }")
    diagnostic = e.value.diagnostics[0]
    assert diagnostic.span.line >= 1
    assert "expected" in diagnostic.message


def test_never_partial_trees():
    with pytest.raises(ParseErrors):
        parse_kb("vocabulary V { p: () -> Bool } theory T:V { p() }")


def test_line_comments():
    kb = parse_kb("""
        // the whole vocabulary
        vocabulary V { p: () -> Bool }  // trailing note
        theory T:V { p(). // a fact
        }""")
    assert len(kb.theories[0].assertions) == 1


def test_concept_and_dollar():
    e = parse_expr_text("#{x in Concept[Person -> Bool]: Symptom(x) & $(x)(p)}")
    assert isinstance(e, Card)
    assert e.var_type.name == "Concept"
    assert e.var_type.sig is not None


def test_unknown_vocabulary_reference():
    with pytest.raises(ParseErrors) as e:
        parse_kb("theory T : Missing {}")
    assert "undeclared vocabulary" in str(e.value)


def test_duplicate_block_names():
    with pytest.raises(ParseErrors):
        parse_kb("vocabulary V {} vocabulary V {}")


@pytest.mark.parametrize("seed", range(40))
def test_round_trip_fuzz(seed):
    instance = Generator(seed).make()
    kb = parse_kb(instance.source)
    printed = print_kb(kb)
    assert parse_kb(printed) == kb, printed
