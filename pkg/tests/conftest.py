import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fodot.lang import parse_kb
from fodot.structure import build_structure, empty_structure
from fodot.typecheck import check

VOTING_SRC = """
vocabulary V {
    type AgeT := {0..120}
    age: () -> AgeT
    vote: () -> Bool
}
theory T : V {
    vote() <=> 18 =< age().
}
"""

DRIVE_SRC = """
vocabulary W {
    has_license: () -> Bool
    tested: () -> Bool
    can_drive: () -> Bool
    age: () -> Int
}
theory T : W {
    {
        can_drive() <- has_license() & age() =< 85.
        can_drive() <- has_license() & tested().
    }
}
"""

TC_SRC = """
vocabulary G {
    type Vx := {1..3}
    edge: Vx * Vx -> Bool
    tc: Vx * Vx -> Bool
}
theory T : G {
    {
        tc(x, y) <- edge(x, y).
        tc(x, y) <- ?z in Vx: tc(x, z) & tc(z, y).
    }
}
structure S : G {
    edge := {(1, 2), (2, 3)}.
}
"""

HEALTH_SRC = """
vocabulary Health {
    type Level := {Underweight, Normal, Overweight, Obese}
    BMI: () -> Real
    BMILevel: () -> Level
}
"""

BMI_TABLE = """\
table BMILevel U
in: BMI() ; out: BMILevel
< 18.5      | Underweight
[18.5..25)  | Normal
[25..30)    | Overweight
>= 30       | Obese
"""


@pytest.fixture(scope="session")
def voting():
    kb = parse_kb(VOTING_SRC)
    tkb = check(kb)
    return tkb, empty_structure(tkb, "V")


@pytest.fixture(scope="session")
def drive():
    kb = parse_kb(DRIVE_SRC)
    tkb = check(kb)
    return tkb, empty_structure(tkb, "W")


@pytest.fixture(scope="session")
def tc_graph():
    kb = parse_kb(TC_SRC)
    tkb = check(kb)
    return tkb, build_structure(tkb, kb.structures[0])


@pytest.fixture(scope="session")
def health():
    kb = parse_kb(HEALTH_SRC)
    return check(kb)
