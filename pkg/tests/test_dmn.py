"""Decision tables: parsing, translation, completeness/overlap checking."""

import random
from fractions import Fraction

import pytest

from fodot.dmn import (
    check_table, definition_theory, parse_table, to_definition,
)
from fodot.errors import MalformedTable, UnknownHitPolicy, UnknownSymbol
from fodot.inference import Reasoner
from fodot.lang import parse_kb
from fodot.lang.ast import KnowledgeBase
from fodot.lang.printer import print_rule
from fodot.structure import assert_fact, empty_structure
from fodot.typecheck import check
from fodot.values import Ident

from conftest import BMI_TABLE, HEALTH_SRC


def test_parse_bmi_table():
    table = parse_table(BMI_TABLE)
    assert table.name == "BMILevel"
    assert table.hit_policy == "U"
    assert table.rows == 4
    conditions = table.inputs[0][1]
    assert conditions[0].kind == "cmp" and conditions[0].op == "<"
    assert conditions[1].kind == "interval"
    assert conditions[1].low_closed and not conditions[1].high_closed


def test_catch_all_row():
    table = parse_table("table T U\nin: BMI() ; out: BMILevel\n- | Normal")
    from fodot.lang.ast import BoolLit
    assert table.row_body(0) == BoolLit(True)


def test_mismatched_row_rejected():
    with pytest.raises(MalformedTable):
        parse_table("table T U\nin: BMI() ; out: BMILevel\n< 5 | A | B")


def test_unknown_hit_policy():
    with pytest.raises(UnknownHitPolicy):
        parse_table("table T A\nin: BMI() ; out: BMILevel\n- | A")


def test_translate_matches_listing(health):
    table = parse_table(BMI_TABLE)
    definition = to_definition(table, health)
    rules = [print_rule(r) for r in definition.rules]
    assert rules[0] == "BMILevel() = Underweight <- BMI() < 18.5."
    assert rules[1] == "BMILevel() = Normal <- 18.5 =< BMI() < 25."
    assert rules[3] == "BMILevel() = Obese <- BMI() >= 30."


def test_unknown_output_symbol(health):
    table = parse_table("table T U\nin: BMI() ; out: Missing\n- | A")
    with pytest.raises(UnknownSymbol):
        to_definition(table, health)


def _level_kb(health_kb_src=None):
    kb = parse_kb(HEALTH_SRC)
    table = parse_table(BMI_TABLE)
    tkb0 = check(kb)
    theory = definition_theory(table, tkb0)
    return check(KnowledgeBase(kb.vocabularies, (theory,), ()))


BOUNDARIES = [
    (Fraction(0), "Underweight"),
    (Fraction("18.4"), "Underweight"),
    (Fraction("18.5"), "Normal"),
    (Fraction("24.9"), "Normal"),
    (Fraction(25), "Overweight"),
    (Fraction("29.9"), "Overweight"),
    (Fraction(30), "Obese"),
    (Fraction(60), "Obese"),
]


@pytest.mark.parametrize("bmi,expected", BOUNDARIES)
def test_boundary_behavior(bmi, expected):
    tkb = _level_kb()
    s = assert_fact(tkb, empty_structure(tkb, "Health"), ("BMI", ()), bmi)
    with Reasoner(tkb, s) as r:
        cons = r.propagate()
    assert cons.determined[("BMILevel", ())] == Ident(expected)


def test_bmi_complete_and_unique(health):
    report = check_table(parse_table(BMI_TABLE), health, {"BMI()": (0, 100)})
    assert report.complete and report.unique


def test_gap_witness(health):
    truncated = "\n".join(BMI_TABLE.strip().splitlines()[:-1])
    report = check_table(parse_table(truncated), health, {"BMI()": (0, 100)})
    assert not report.complete
    assert report.gap_witness["BMI()"] >= 30


def test_overlap_witness(health):
    duplicated = BMI_TABLE.strip() + "\n< 18.5 | Underweight"
    report = check_table(parse_table(duplicated), health, {"BMI()": (0, 100)})
    assert not report.unique
    i, j, witness = report.overlap_witness
    assert (i, j) == (0, 4)
    assert witness["BMI()"] < Fraction("18.5")


def _random_table(rng) -> tuple[str, list[tuple[int, str]]]:
    """A random U-policy table over n() in [0..30] with integer breakpoints,
    plus its expected input->output mapping."""
    cuts = sorted(rng.sample(range(1, 30), rng.randint(1, 3)))
    outputs = "ABCD"
    rows = []
    bounds = [0] + cuts + [31]
    for i in range(len(bounds) - 1):
        lo, hi = bounds[i], bounds[i + 1]
        rows.append((f"[{lo}..{hi})", outputs[i]))
    lines = ["table R U", "in: n() ; out: out"]
    lines += [f"{cond} | {value}" for cond, value in rows]
    mapping = []
    for x in range(0, 31):
        for i in range(len(bounds) - 1):
            if bounds[i] <= x < bounds[i + 1]:
                mapping.append((x, outputs[i]))
                break
    return "\n".join(lines), mapping


@pytest.mark.parametrize("seed", range(5))
def test_translation_faithfulness(seed):
    rng = random.Random(seed)
    table_src, mapping = _random_table(rng)
    kb = parse_kb("""
        vocabulary V {
            type Out := {A, B, C, D}
            type N := {0..30}
            n: () -> N
            out: () -> Out
        }""")
    tkb0 = check(kb)
    table = parse_table(table_src)
    theory = definition_theory(table, tkb0)
    tkb = check(KnowledgeBase(kb.vocabularies, (theory,), ()))
    report = check_table(table, tkb0, {"n()": (0, 30)})
    assert report.complete and report.unique
    samples = random.Random(seed + 1).sample(mapping, min(4, len(mapping)))
    for x, expected in samples:
        s = assert_fact(tkb, empty_structure(tkb, "V"), ("n", ()), x)
        with Reasoner(tkb, s) as r:
            cons = r.propagate()
        assert cons.determined[("out", ())] == Ident(expected), (x, table_src)
