"""Unit and differential tests for the bundled SMT-LIB solver."""

import itertools
import random
import subprocess
import sys

import pytest

from fodot.smt.sexpr import SexprReader
from fodot.smt.solver.main import Repl


class Capture:
    def __init__(self):
        self.lines = []

    def write(self, text):
        self.lines.append(text)

    def flush(self):
        pass

    def take(self):
        out = "".join(self.lines).split()
        self.lines = []
        return out

    def take_text(self):
        out = "".join(self.lines)
        self.lines = []
        return out


def run_repl(script: str) -> list[str]:
    out = Capture()
    repl = Repl(out)
    reader = SexprReader()
    reader.feed(script + "\n")
    while True:
        cmd = reader.pop()
        if cmd is None:
            break
        repl.execute(cmd)
    return out.take_text().split("\n")


def answers(script: str) -> list[str]:
    return [l for l in run_repl(script) if l.strip()]


def test_empty_theory_is_sat():
    assert answers("(check-sat)") == ["sat"]


def test_basic_int_model():
    out = answers("""
        (set-option :produce-models true)
        (declare-fun x () Int)
        (assert (and (< 5 x) (< x 7)))
        (check-sat)
        (get-model)""")
    assert out[0] == "sat"
    assert "(define-fun x () Int 6)" in " ".join(out)


def test_unsat_core_is_minimal_pair():
    out = answers("""
        (set-option :produce-unsat-cores true)
        (declare-fun x () Int)
        (assert (! (> x 5) :named a))
        (assert (! (< x 3) :named b))
        (assert (! (> x 0) :named c))
        (check-sat)
        (get-unsat-core)""")
    assert out[0] == "unsat"
    core = out[1].strip("()").split()
    assert sorted(core) == ["a", "b"]


def test_false_assertion_core():
    out = answers("""
        (assert (! false :named oops))
        (check-sat)
        (get-unsat-core)""")
    assert out == ["unsat", "(oops)"]


def test_push_pop_restores():
    out = answers("""
        (declare-fun p () Bool)
        (assert (! p :named base))
        (push 1)
        (assert (! (not p) :named probe))
        (check-sat)
        (pop 1)
        (check-sat)""")
    assert out == ["unsat", "sat"]


def test_label_reuse_after_pop():
    out = answers("""
        (declare-fun p () Bool)
        (push 1) (assert (! p :named probe)) (check-sat) (pop 1)
        (push 1) (assert (! (not p) :named probe)) (check-sat) (pop 1)""")
    assert out == ["sat", "sat"]


def test_strict_real_bounds():
    out = answers("""
        (set-option :produce-models true)
        (declare-fun x () Real)
        (assert (< x 1))
        (assert (> x 0))
        (assert (< (* 2 x) 1))
        (check-sat)
        (get-model)""")
    assert out[0] == "sat"


def test_mixed_int_real():
    out = answers("""
        (declare-fun n () Int)
        (declare-fun x () Real)
        (assert (< n x))
        (assert (< x (+ n 1)))
        (check-sat)""")
    assert out == ["sat"]


def test_int_tightening():
    # 2n in (1, 3) forces n = 1
    out = answers("""
        (set-option :produce-models true)
        (declare-fun n () Int)
        (assert (> (* 2 n) 1))
        (assert (< (* 2 n) 3))
        (check-sat)
        (get-model)""")
    assert out[0] == "sat"
    assert "(define-fun n () Int 1)" in " ".join(out)


def test_uninterpreted_sort_distinct():
    out = answers("""
        (set-option :produce-models true)
        (declare-sort S 0)
        (declare-const a S) (declare-const b S) (declare-const c S)
        (assert (distinct a b))
        (assert (or (= c a) (= c b)))
        (assert (not (= c a)))
        (check-sat)
        (get-model)""")
    assert out[0] == "sat"
    assert "(define-fun c () S b)" in " ".join(out)


def test_sort_pigeonhole_unsat():
    # 3 distinct constants into a 2-element closure
    out = answers("""
        (declare-sort S 0)
        (declare-const e1 S) (declare-const e2 S)
        (declare-const x S) (declare-const y S) (declare-const z S)
        (assert (distinct x y z))
        (assert (or (= x e1) (= x e2)))
        (assert (or (= y e1) (= y e2)))
        (assert (or (= z e1) (= z e2)))
        (check-sat)""")
    assert out == ["unsat"]


def test_ite_terms():
    out = answers("""
        (set-option :produce-models true)
        (declare-fun p () Bool)
        (declare-fun x () Int)
        (assert (= x (ite p 3 4)))
        (assert (not p))
        (check-sat)
        (get-model)""")
    assert out[0] == "sat"
    assert "(define-fun x () Int 4)" in " ".join(out)


def test_timeout_returns_unknown_and_usable():
    lines = ["(set-option :timeout 1)"]
    n = 9
    for p in range(n + 1):
        for h in range(n):
            lines.append(f"(declare-const p{p}h{h} Bool)")
    lines.append("(push 1)")
    for p in range(n + 1):
        lines.append("(assert (or " +
                      " ".join(f"p{p}h{h}" for h in range(n)) + "))")
    for h in range(n):
        for p1 in range(n + 1):
            for p2 in range(p1 + 1, n + 1):
                lines.append(f"(assert (or (not p{p1}h{h}) (not p{p2}h{h})))")
    lines.append("(check-sat)")
    lines.append("(pop 1)")
    lines.append("(set-option :timeout 10000)")
    lines.append("(check-sat)")
    out = answers("\n".join(lines))
    assert out == ["unknown", "sat"]


def test_reset():
    out = answers("""
        (declare-fun p () Bool)
        (assert (! (not p) :named a))
        (assert (! p :named b))
        (check-sat)
        (reset)
        (set-option :produce-models true)
        (declare-fun p () Bool)
        (assert (! p :named a))
        (check-sat)""")
    assert out == ["unsat", "sat"]


def test_error_then_recover():
    out = answers("""
        (declare-fun p () Bool)
        (assert (unknownfn p))
        (check-sat)""")
    assert out[0].startswith("(error")
    assert out[1] == "sat"


def test_subprocess_entry_point():
    script = "(declare-fun x () Int)\n(assert (= x 4))\n(check-sat)\n(exit)\n"
    proc = subprocess.run([sys.executable, "-m", "fodot.smt.solver.main"],
                          input=script, capture_output=True, text=True,
                          timeout=60)
    assert proc.stdout.split() == ["sat"]


# -- differential fuzz against brute force -----------------------------------------


def _gen_formula(depth, bools, ints, rng):
    if depth == 0:
        if rng.random() < 0.4:
            return rng.choice(bools)
        a = rng.choice(ints + [str(rng.randint(-3, 3))])
        b = rng.choice(ints + [str(rng.randint(-3, 3))])
        if rng.random() < 0.3:
            a = f"(+ {a} {rng.choice(ints)})"
        return f"({rng.choice(['<', '<=', '>', '>=', '='])} {a} {b})"
    op = rng.choice(["and", "or", "not", "=>", "ite"])
    if op == "not":
        return f"(not {_gen_formula(depth - 1, bools, ints, rng)})"
    n = 3 if op == "ite" else 2
    parts = " ".join(_gen_formula(depth - 1, bools, ints, rng)
                     for _ in range(n))
    return f"({op} {parts})"


def _parse(tokens):
    tok = tokens.pop(0)
    if tok == "(":
        out = []
        while tokens[0] != ")":
            out.append(_parse(tokens))
        tokens.pop(0)
        return out
    return tok


def _eval(node, env):
    if isinstance(node, str):
        if node in env:
            return env[node]
        return int(node)
    h = node[0]
    ops = {
        "and": lambda: all(_eval(x, env) for x in node[1:]),
        "or": lambda: any(_eval(x, env) for x in node[1:]),
        "not": lambda: not _eval(node[1], env),
        "=>": lambda: (not _eval(node[1], env)) or _eval(node[2], env),
        "ite": lambda: _eval(node[2], env) if _eval(node[1], env)
        else _eval(node[3], env),
        "+": lambda: _eval(node[1], env) + _eval(node[2], env),
        "<": lambda: _eval(node[1], env) < _eval(node[2], env),
        "<=": lambda: _eval(node[1], env) <= _eval(node[2], env),
        ">": lambda: _eval(node[1], env) > _eval(node[2], env),
        ">=": lambda: _eval(node[1], env) >= _eval(node[2], env),
        "=": lambda: _eval(node[1], env) == _eval(node[2], env),
    }
    return ops[h]()


@pytest.mark.parametrize("seed", range(60))
def test_differential_vs_brute_force(seed):
    rng = random.Random(seed)
    bools, ints = ["b0", "b1"], ["i0", "i1"]
    formulas = [_gen_formula(rng.randint(1, 3), bools, ints, rng)
                for _ in range(rng.randint(1, 4))]
    decls = [f"(declare-fun {b} () Bool)" for b in bools] + \
            [f"(declare-fun {i} () Int)" for i in ints] + \
            [f"(assert (and (<= (- 4) {i}) (<= {i} 4)))" for i in ints]
    script = "\n".join(decls) + "\n" + \
        "\n".join(f"(assert {f})" for f in formulas) + "\n(check-sat)"
    got = answers(script)[0]

    want = "unsat"
    parsed = [_parse(f.replace("(", " ( ").replace(")", " ) ").split())
              for f in formulas]
    for bv in itertools.product([False, True], repeat=2):
        for iv in itertools.product(range(-4, 5), repeat=2):
            env = dict(zip(bools, bv)) | dict(zip(ints, iv))
            if all(_eval(f, env) for f in parsed):
                want = "sat"
                break
        if want == "sat":
            break
    assert got == want, script
