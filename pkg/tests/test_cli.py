"""Command-line interface: subcommands, flags, exit codes."""

import json

import pytest

from fodot.cli import main

from conftest import BMI_TABLE, HEALTH_SRC, VOTING_SRC


@pytest.fixture()
def voting_file(tmp_path):
    path = tmp_path / "voting.idp"
    path.write_text(VOTING_SRC)
    return str(path)


@pytest.fixture()
def health_files(tmp_path):
    vocab = tmp_path / "health.idp"
    vocab.write_text(HEALTH_SRC)
    table = tmp_path / "bmi.tbl"
    table.write_text(BMI_TABLE)
    return str(table), str(vocab)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_satisfiable(capsys, voting_file):
    code, out, _ = run(capsys, "check", voting_file)
    assert code == 0
    assert "satisfiable" in out


def test_check_unsat_exit_1(capsys, voting_file):
    code, out, _ = run(capsys, "check", voting_file,
                       "--assert", "vote()=true", "--assert", "age()=17")
    assert code == 1
    assert "unsatisfiable" in out


def test_propagate_prints_consequence(capsys, voting_file):
    code, out, _ = run(capsys, "propagate", voting_file,
                       "--assert", "vote()=true")
    assert code == 0
    assert "18 =< age(): true" in out


def test_optimize(capsys, voting_file):
    code, out, _ = run(capsys, "optimize", voting_file,
                       "--term", "age()", "--assert", "vote()=true")
    assert code == 0
    assert "18" in out


def test_explain(capsys, voting_file):
    code, out, _ = run(capsys, "explain", voting_file,
                       "--assert", "age()=20", "--literal", "vote()")
    assert code == 0
    assert "vote() <=> 18 =< age()" in out


def test_expand_json(capsys, voting_file):
    code, out, _ = run(capsys, "expand", voting_file,
                       "--assert", "age()=20", "--max-models", "1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["models"][0]["vote()"] is True


def test_relevance_json(capsys, tmp_path):
    path = tmp_path / "ab.idp"
    path.write_text("vocabulary V { a: () -> Bool  b: () -> Bool } "
                    "theory T:V { a() => b(). }")
    code, out, _ = run(capsys, "relevance", str(path),
                       "--assert", "b()=true", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["irrelevant"] == ["a()"]


def test_json_outputs_parse_for_every_subcommand(capsys, voting_file,
                                                 health_files):
    table, vocab = health_files
    for argv in (
        ("check", voting_file, "--json"),
        ("expand", voting_file, "--max-models", "1", "--json"),
        ("propagate", voting_file, "--json"),
        ("explain", voting_file, "--assert", "age()=20",
         "--literal", "vote()", "--json"),
        ("optimize", voting_file, "--term", "age()", "--json"),
        ("relevance", voting_file, "--json"),
        ("dmn", "translate", table, "--vocab", vocab, "--json"),
        ("dmn", "check", table, "--vocab", vocab,
         "--bounds", "BMI()=0..100", "--json"),
    ):
        code, out, _ = run(capsys, *argv)
        assert code == 0
        json.loads(out)


def test_dmn_translate(capsys, health_files):
    table, vocab = health_files
    code, out, _ = run(capsys, "dmn", "translate", table, "--vocab", vocab)
    assert code == 0
    assert "BMILevel() = Underweight <- BMI() < 18.5." in out
    assert "BMILevel() = Normal <- 18.5 =< BMI() < 25." in out


def test_dmn_check(capsys, health_files):
    table, vocab = health_files
    code, out, _ = run(capsys, "dmn", "check", table, "--vocab", vocab,
                       "--bounds", "BMI()=0..100")
    assert code == 0
    assert "complete" in out


def test_parse_error_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.idp"
    path.write_text("vocabulary V {")
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "error" in err


def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "check", "/nonexistent.idp")
    assert code == 2


def test_dump_ground(capsys, voting_file):
    code, out, err = run(capsys, "check", voting_file, "--dump-ground")
    assert code == 0
    assert "[ax0]" in err
