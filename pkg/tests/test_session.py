"""Solver process driver: spawning, loading, checks, cores, neutrality."""

import pytest

from fodot.errors import SolverSpawnError
from fodot.ground import ground_theory
from fodot.ground.grounder import fact_expr
from fodot.lang import parse_kb
from fodot.lang.ast import BoolLit
from fodot.smt.session import Assumption, SolverSession
from fodot.structure import empty_structure
from fodot.typecheck import check


@pytest.fixture()
def voting_session(voting):
    tkb, struct = voting
    gt = ground_theory(tkb, struct)
    session = SolverSession()
    session.load(gt, tkb.single_vocab())
    yield tkb, struct, gt, session
    session.close()


def test_empty_stack_check_sat():
    with SolverSession() as session:
        answer = session.check()
        assert answer.status == "sat"


def test_nonexistent_executable():
    with pytest.raises(SolverSpawnError):
        SolverSession(["/nonexistent/solver/binary"])


def test_load_declares_and_asserts(voting_session):
    tkb, struct, gt, session = voting_session
    answer = session.check_under([], want_model=True)
    assert answer.status == "sat"
    model = session.typed_model(answer, tkb.single_vocab())
    assert ("vote", ()) in model
    assert ("age", ()) in model


def test_false_assertion_singleton_core():
    kb = parse_kb("vocabulary V { p: () -> Bool } theory T:V { p() & ~p(). }")
    tkb = check(kb)
    gt = ground_theory(tkb, empty_structure(tkb, "V"))
    with SolverSession() as session:
        session.load(gt, tkb.single_vocab())
        answer = session.check(want_core=True)
        assert answer.status == "unsat"
        assert answer.core == ["ax0"]


def test_check_under_unsat_core(voting_session):
    tkb, struct, gt, session = voting_session
    assumptions = [
        Assumption("c0", fact_expr(tkb, struct, ("vote", ()), True)),
        Assumption("c1", fact_expr(tkb, struct, ("age", ()), 17)),
    ]
    answer = session.check_under(assumptions, want_core=True)
    assert answer.status == "unsat"
    assert set(answer.core) <= {"ax0", "c0", "c1", "dca:age"}
    assert "c0" in answer.core and "c1" in answer.core


def test_model_satisfies_theory(voting_session):
    tkb, struct, gt, session = voting_session
    assumption = Assumption("c0", fact_expr(tkb, struct, ("vote", ()), True))
    answer = session.check_under([assumption], want_model=True)
    model = session.typed_model(answer, tkb.single_vocab())
    assert model[("vote", ())] is True
    assert model[("age", ())] >= 18


def test_session_neutrality(voting_session):
    tkb, struct, gt, session = voting_session
    a_sat = [Assumption("c0", fact_expr(tkb, struct, ("age", ()), 20))]
    a_unsat = [Assumption("c0", fact_expr(tkb, struct, ("vote", ()), True)),
               Assumption("c1", fact_expr(tkb, struct, ("age", ()), 10))]
    history = []
    for _ in range(3):
        history.append(session.check_under(a_sat).status)
        history.append(session.check_under(a_unsat).status)
    assert history == ["sat", "unsat"] * 3
    assert session.stack_depth == 0


def test_core_alone_is_unsat(voting_session):
    """Every unsat core, asserted alone, is itself unsat."""
    tkb, struct, gt, session = voting_session
    assumptions = [
        Assumption("c0", fact_expr(tkb, struct, ("vote", ()), True)),
        Assumption("c1", fact_expr(tkb, struct, ("age", ()), 17)),
        Assumption("c2", fact_expr(tkb, struct, ("age", ()), 17)),
    ]
    answer = session.check_under(assumptions, want_core=True)
    assert answer.status == "unsat"
    core_only = [a for a in assumptions if a.label in answer.core]
    # re-check with only the core assumptions (base theory still loaded)
    again = session.check_under(core_only, want_core=True)
    assert again.status == "unsat"


def test_reset_then_reload(voting_session):
    tkb, struct, gt, session = voting_session
    before = session.check_under([]).status
    session.reset()
    session.load(gt, tkb.single_vocab())
    after = session.check_under([]).status
    assert before == after == "sat"


def test_timeout_surfaces_unknown():
    """A 1 ms budget on a pigeonhole instance yields unknown; the session
    stays usable afterwards."""
    n = 9
    decls = []
    for p in range(n + 1):
        for h in range(n):
            decls.append(f"p{p}h{h}: () -> Bool")
    lines = []
    for p in range(n + 1):
        lines.append(" | ".join(f"p{p}h{h}()" for h in range(n)) + ".")
    for h in range(n):
        for p1 in range(n + 1):
            for p2 in range(p1 + 1, n + 1):
                lines.append(f"~p{p1}h{h}() | ~p{p2}h{h}().")
    src = "vocabulary V { " + "  ".join(decls) + " } theory T:V { " + \
        " ".join(lines) + " }"
    kb = parse_kb(src)
    tkb = check(kb)
    gt = ground_theory(tkb, empty_structure(tkb, "V"))
    with SolverSession(timeout_ms=1) as session:
        session.load(gt, tkb.single_vocab())
        answer = session.check_under([], want_core=False)
        assert answer.status == "unknown"
        # still usable: protocol-level commands keep working
        session.push()
        session.add_assertion("probe", BoolLit(True))
        session.pop()
        session.sync()
        assert session.stack_depth == 0
