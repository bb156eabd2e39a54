"""Driver for an external SMT solver process speaking SMT-LIB 2.

The default command runs the bundled solver (`python -m
fodot.smt.solver.main`); set the FODOT_SOLVER environment variable or pass
an explicit command line to use any other SMT-LIB 2 solver (e.g. `z3 -in`).
"""

from __future__ import annotations

import os
import select
import shlex
import subprocess
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from ..errors import SolverProtocolError, SolverSpawnError
from ..lang import ast
from ..lang.ast import Expr
from ..structure import TermKey
from ..typecheck import VocabIndex
from ..values import Value
from ..ground.theory import GroundTheory, element_smt_name
from .emit import Emitter
from .sexpr import SexprReader
from .theory_names import concept_sort_name

DEFAULT_TIMEOUT_MS = 30000

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


def default_solver_command() -> list[str]:
    env = os.environ.get("FODOT_SOLVER")
    if env:
        return shlex.split(env)
    return [sys.executable, "-m", "fodot.smt.solver.main"]


@dataclass
class SolverAnswer:
    status: str
    model: dict[str, object] | None = None  # solver identifier -> raw value
    core: list[str] | None = None


@dataclass
class Assumption:
    label: str
    expr: Expr


class SolverSession:
    def __init__(self, command: list[str] | None = None,
                 timeout_ms: int = DEFAULT_TIMEOUT_MS,
                 named_assertions: bool = True):
        """With named_assertions=False the session skips `:named` wrappers:
        faster checks, but no unsat cores (use a second session for those)."""
        self.command = command or default_solver_command()
        self.named_assertions = named_assertions
        self.timeout_ms = timeout_ms
        self.read_grace = max(timeout_ms / 1000.0 * 30, 120.0)
        self.stack_depth = 0
        self.gt: GroundTheory | None = None
        self.emitter: Emitter | None = None
        self._pending: list[str] = []
        self._reader = SexprReader()
        try:
            self.proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, bufsize=0)
        except (FileNotFoundError, PermissionError) as e:
            raise SolverSpawnError(f"cannot start solver {self.command!r}: {e}")
        self._prelude()

    # -- low-level protocol ----------------------------------------------------

    def _prelude(self) -> None:
        self.send("(set-option :produce-unsat-cores true)")
        self.send("(set-option :produce-models true)")
        self.send(f"(set-option :timeout {self.timeout_ms})")
        self.send("(set-logic ALL)")

    def send(self, command: str) -> None:
        self._pending.append(command)

    def _flush(self) -> None:
        if not self._pending:
            return
        data = ("\n".join(self._pending) + "\n").encode()
        self._pending = []
        try:
            self.proc.stdin.write(data)
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise SolverProtocolError(f"solver pipe closed: {e}")

    def _read_answer(self):
        self._flush()
        deadline = time.monotonic() + self.read_grace
        fd = self.proc.stdout.fileno()
        while True:
            expr = self._reader.pop()
            if expr is not None:
                if expr in ("success", "unsupported"):
                    continue
                if isinstance(expr, list) and expr and expr[0] == "error":
                    message = expr[1] if len(expr) > 1 else "unknown error"
                    raise SolverProtocolError(f"solver error: {message}")
                return expr
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.close()
                raise SolverProtocolError("solver did not reply in time")
            ready, _, _ = select.select([fd], [], [], min(remaining, 5.0))
            if not ready:
                continue
            data = os.read(fd, 65536)
            if not data:
                raise SolverProtocolError("solver exited unexpectedly")
            self._reader.feed(data.decode())

    def sync(self) -> None:
        """Force pending commands through and surface any buffered errors."""
        self.send('(echo "ready")')
        while True:
            answer = self._read_answer()
            if answer in ("ready", '"ready"'):
                return

    # -- session operations -------------------------------------------------------

    def load(self, gt: GroundTheory, idx: VocabIndex) -> None:
        """Declare sorts/terms and assert the whole ground theory, named."""
        if self.stack_depth != 0:
            raise SolverProtocolError("load requires stack depth 0")
        self.gt = gt
        self.emitter = Emitter(gt, idx, named=self.named_assertions)
        for cmd in self.emitter.declarations():
            self.send(cmd)
        for a in gt.assertions:
            self.send(self.emitter.assertion(a.label, a.expr))
        self.sync()

    def push(self) -> None:
        self.send("(push 1)")
        self.stack_depth += 1

    def pop(self) -> None:
        if self.stack_depth <= 0:
            raise SolverProtocolError("pop on empty stack")
        self.send("(pop 1)")
        self.stack_depth -= 1

    def add_assertion(self, label: str, expr: Expr) -> None:
        if self.named_assertions:
            self.send(self.emitter.assertion(label, expr))
        else:
            self.send(f"(assert {self.emitter.expr(expr)})")

    def check(self, want_model: bool = False,
              want_core: bool = False) -> SolverAnswer:
        self.send("(check-sat)")
        status = self._read_answer()
        if status not in (SAT, UNSAT, UNKNOWN):
            raise SolverProtocolError(f"unexpected check-sat reply: {status!r}")
        answer = SolverAnswer(status)
        if status == SAT and want_model:
            self.send("(get-model)")
            answer.model = _decode_model(self._read_answer())
        elif status == UNSAT and want_core:
            self.send("(get-unsat-core)")
            core = self._read_answer()
            if not isinstance(core, list):
                raise SolverProtocolError(f"unexpected core reply: {core!r}")
            answer.core = [str(l) for l in core]
        return answer

    def check_under(self, assumptions: list[Assumption],
                    want_model: bool = False,
                    want_core: bool = True) -> SolverAnswer:
        """Push, assert the named assumptions, check, retrieve model or core,
        pop. The loaded base theory is unchanged afterwards."""
        self.push()
        try:
            for a in assumptions:
                self.add_assertion(a.label, a.expr)
            return self.check(want_model=want_model, want_core=want_core)
        finally:
            self.pop()

    def reset(self) -> None:
        self.send("(reset)")
        self.stack_depth = 0
        self.gt = None
        self.emitter = None
        self._prelude()

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.write(b"(exit)\n")
                self.proc.stdin.flush()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait(timeout=5)

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- model decoding ----------------------------------------------------------

    def typed_model(self, answer: SolverAnswer,
                    idx: VocabIndex) -> dict[TermKey, Value]:
        """Map the raw solver model back onto applied ground terms."""
        if answer.model is None:
            raise ValueError("answer carries no model")
        raw = answer.model
        gt = self.gt
        rep_to_element: dict[object, Value] = {}
        for sort in gt.sorts.values():
            if sort.kind in ("int", "real"):
                continue
            for v in sort.elements:
                name = element_smt_name(sort.smt_sort, v)
                rep = raw.get(name, name)
                rep_to_element[rep] = v
                rep_to_element.setdefault(name, v)
        out: dict[TermKey, Value] = {}
        for key, info in gt.terms.items():
            if info.internal:
                continue
            value = raw.get(info.smt_name)
            result = info.result
            if result.name == ast.BOOL:
                out[key] = bool(value) if value is not None else False
            elif result.name == ast.INT:
                out[key] = int(value) if value is not None else 0
            elif result.name == ast.REAL:
                out[key] = Fraction(value) if value is not None else Fraction(0)
            else:
                sort = gt.sorts.get(result.name) or \
                    gt.sorts.get(concept_sort_name(result))
                if sort is not None and sort.kind in ("int", "real"):
                    if value is None:
                        value = info.extension[0] if info.extension else 0
                    out[key] = (int(value) if sort.kind == "int"
                                else Fraction(value))
                elif value is None:
                    out[key] = info.extension[0] if info.extension else None
                else:
                    element = rep_to_element.get(value)
                    if element is None:
                        raise SolverProtocolError(
                            f"cannot decode model value {value!r} for "
                            f"{info.smt_name}")
                    out[key] = element
        return out


def _decode_model(reply) -> dict[str, object]:
    if not isinstance(reply, list):
        raise SolverProtocolError(f"unexpected model reply: {reply!r}")
    entries = reply
    if entries and entries[0] == "model":
        entries = entries[1:]
    out: dict[str, object] = {}
    for entry in entries:
        if not isinstance(entry, list) or len(entry) < 5 \
                or entry[0] != "define-fun":
            continue
        name, params, value = entry[1], entry[2], entry[4]
        if params:
            continue
        out[name] = _decode_value(value)
    return out


def _decode_value(v):
    if isinstance(v, list):
        if len(v) == 2 and v[0] == "-":
            inner = _decode_value(v[1])
            return -inner
        if len(v) == 3 and v[0] == "/":
            return Fraction(_as_fraction(v[1]), _as_fraction(v[2]))
        return tuple(v)
    if v == "true":
        return True
    if v == "false":
        return False
    body = v[1:] if v.startswith("-") else v
    if body.isdigit():
        return int(v)
    if "." in body:
        a, _, b = body.partition(".")
        if a.isdigit() and b.isdigit():
            return Fraction(v)
    return v


def _as_fraction(v) -> Fraction:
    decoded = _decode_value(v)
    if isinstance(decoded, bool) or not isinstance(decoded, (int, Fraction)):
        raise SolverProtocolError(f"expected a number, got {decoded!r}")
    return Fraction(decoded)
