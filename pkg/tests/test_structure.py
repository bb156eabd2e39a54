import pytest
from hypothesis import given, settings, strategies as st

from fodot.errors import (
    IncompleteEnumeration, NotUserFact, OverwriteEnumeration, ValueOutsideType,
)
from fodot.lang import parse_kb
from fodot.structure import (
    assert_fact, build_structure, empty_structure, retract_fact,
)
from fodot.typecheck import check
from fodot.values import Ident

PERSON_SRC = """
vocabulary V {
    type Person
    weight: Person -> Int
    p: Person -> Bool
    vote: () -> Bool
}
structure S : V {
    Person := {Bob, Alice}.
    weight := {Bob -> 80, Alice -> 80}.
}
"""


@pytest.fixture()
def person():
    kb = parse_kb(PERSON_SRC)
    tkb = check(kb)
    return tkb, build_structure(tkb, kb.structures[0])


def test_function_enumeration(person):
    tkb, s = person
    assert s.lookup(("weight", (Ident("Bob"),))) == 80
    assert s.lookup(("weight", (Ident("Alice"),))) == 80
    assert len(s.type_extensions["Person"]) == 2


def test_predicate_completion():
    kb = parse_kb("vocabulary V { type Person  p: Person -> Bool } "
                  "structure S:V { Person := {Bob, Alice}. p := {Bob}. }")
    tkb = check(kb)
    s = build_structure(tkb, kb.structures[0])
    assert s.lookup(("p", (Ident("Bob"),))) is True
    assert s.lookup(("p", (Ident("Alice"),))) is False


def test_empty_structure_everything_unknown():
    kb = parse_kb("vocabulary V { type Person := {Bob}  p: Person -> Bool } "
                  "structure S:V { }")
    tkb = check(kb)
    s = build_structure(tkb, kb.structures[0])
    assert s.assignments == {}


def test_incomplete_function_enumeration_rejected():
    kb = parse_kb("vocabulary V { type Person := {Bob, Alice} "
                  "weight: Person -> Int } "
                  "structure S:V { weight := {Bob -> 80}. }")
    tkb = check(kb)
    with pytest.raises(IncompleteEnumeration):
        build_structure(tkb, kb.structures[0])


def test_value_outside_type():
    kb = parse_kb("vocabulary V { type Person := {Bob}  type Small := {0..3} "
                  "f: Person -> Small } "
                  "structure S:V { f := {Bob -> 9}. }")
    tkb = check(kb)
    with pytest.raises(ValueOutsideType):
        build_structure(tkb, kb.structures[0])


def test_assert_and_retract(person):
    tkb, s = person
    s2 = assert_fact(tkb, s, ("vote", ()), True)
    assert s2.lookup(("vote", ())) is True
    assert s2.origin(("vote", ())) == "user"
    s3 = retract_fact(s2, ("vote", ()))
    assert s3 == s


def test_overwrite_enumeration_rejected(person):
    tkb, s = person
    with pytest.raises(OverwriteEnumeration):
        assert_fact(tkb, s, ("weight", (Ident("Bob"),)), 75)


def test_retract_non_user_fact(person):
    tkb, s = person
    with pytest.raises(NotUserFact):
        retract_fact(s, ("weight", (Ident("Bob"),)))
    with pytest.raises(NotUserFact):
        retract_fact(s, ("vote", ()))


def test_retract_twice(person):
    tkb, s = person
    s2 = assert_fact(tkb, s, ("vote", ()), True)
    s3 = retract_fact(s2, ("vote", ()))
    with pytest.raises(NotUserFact):
        retract_fact(s3, ("vote", ()))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["Bob", "Alice"]),
                          st.booleans()), max_size=6))
def test_assert_retract_inverse(edits):
    kb = parse_kb(PERSON_SRC)
    tkb = check(kb)
    base = build_structure(tkb, kb.structures[0])
    s = base
    applied = []
    for name, value in edits:
        key = ("p", (Ident(name),))
        if s.origin(key) == "user":
            s = retract_fact(s, key)
            applied = [k for k in applied if k != key]
        else:
            s = assert_fact(tkb, s, key, value)
            applied.append(key)
    for key in reversed(applied):
        s = retract_fact(s, key)
    assert s == base
