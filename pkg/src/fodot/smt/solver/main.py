"""SMT-LIB 2 command interpreter over the bundled DPLL(T) solver.

Runs as a child process speaking the textual protocol on stdin/stdout:
push/pop, named assertions, check-sat with per-check timeout, get-model and
get-unsat-core. Incrementality uses one selector literal per assertion;
popping a scope permanently disables its selectors.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction

from ..sexpr import SexprReader, quote_symbol
from .core import SAT, UNSAT
from .terms import BOOL, INT, REAL, CompileError, Context


@dataclass
class Scope:
    labels: list[str] = field(default_factory=list)
    anon_selector: int | None = None
    decls: list[str] = field(default_factory=list)
    sorts: list[str] = field(default_factory=list)


class Repl:
    def __init__(self, out) -> None:
        self.out = out
        self.reset()

    def reset(self) -> None:
        self.ctx = Context()
        self.scopes: list[Scope] = [Scope()]
        self.selectors: dict[str, int] = {}
        self.label_order: list[str] = []
        self.options = {"timeout": None, "print-success": False}
        self.last_status: str | None = None
        self.last_core: list[str] = []
        self.model: dict[str, tuple[str, object]] = {}

    # -- protocol helpers -----------------------------------------------------

    def emit(self, text: str) -> None:
        self.out.write(text + "\n")
        self.out.flush()

    def success(self) -> None:
        if self.options["print-success"]:
            self.emit("success")

    def error(self, message: str) -> None:
        self.emit(f'(error "{message}")')

    # -- command dispatch --------------------------------------------------------

    def execute(self, cmd) -> bool:
        """Returns False when the session should end."""
        if not isinstance(cmd, list) or not cmd:
            self.error("expected a command")
            return True
        head = cmd[0]
        try:
            handler = getattr(self, "cmd_" + head.replace("-", "_"), None)
            if handler is None:
                self.error(f"unsupported command {head}")
                return True
            return handler(cmd) is not False
        except CompileError as e:
            self.error(str(e))
        except Exception as e:  # malformed input must not kill the process
            self.error(f"{type(e).__name__}: {e}")
        return True

    def cmd_exit(self, cmd) -> bool:
        return False

    def cmd_reset(self, cmd) -> None:
        self.reset()
        self.success()

    def cmd_set_option(self, cmd) -> None:
        if len(cmd) >= 3 and cmd[1] == ":timeout":
            self.options["timeout"] = int(cmd[2])
        elif len(cmd) >= 3 and cmd[1] == ":print-success":
            self.options["print-success"] = cmd[2] == "true"
            if self.options["print-success"]:
                self.emit("success")
                return
        self.success()

    def cmd_set_logic(self, cmd) -> None:
        self.success()

    def cmd_set_info(self, cmd) -> None:
        self.success()

    def cmd_echo(self, cmd) -> None:
        text = cmd[1] if len(cmd) > 1 else '""'
        self.emit(text.strip('"'))

    def cmd_declare_sort(self, cmd) -> None:
        self.ctx.declare_sort(cmd[1])
        self.scopes[-1].sorts.append(cmd[1])
        self.success()

    def cmd_declare_fun(self, cmd) -> None:
        name, args, sort = cmd[1], cmd[2], cmd[3]
        if args:
            raise CompileError("only nullary functions are supported")
        self.ctx.declare_fun(name, sort)
        self.scopes[-1].decls.append(name)
        self.success()

    def cmd_declare_const(self, cmd) -> None:
        self.ctx.declare_fun(cmd[1], cmd[2])
        self.scopes[-1].decls.append(cmd[1])
        self.success()

    def cmd_assert(self, cmd) -> None:
        term = cmd[1]
        label = None
        if isinstance(term, list) and term and term[0] == "!":
            body = term[1]
            rest = term[2:]
            for i in range(0, len(rest) - 1, 2):
                if rest[i] == ":named":
                    label = rest[i + 1]
            term = body
        lit = self.ctx.compile_formula(term)
        if label is not None:
            if label in self.selectors:
                raise CompileError(f"duplicate assertion name {label}")
            sel = self.ctx.solver.new_var()
            self.selectors[label] = sel
            self.label_order.append(label)
            self.scopes[-1].labels.append(label)
        else:
            scope = self.scopes[-1]
            if scope.anon_selector is None:
                scope.anon_selector = self.ctx.solver.new_var()
            sel = scope.anon_selector
        self.ctx.solver.add_clause([-sel, lit])
        self.success()

    def cmd_push(self, cmd) -> None:
        n = int(cmd[1]) if len(cmd) > 1 else 1
        for _ in range(n):
            self.scopes.append(Scope())
        self.success()

    def cmd_pop(self, cmd) -> None:
        n = int(cmd[1]) if len(cmd) > 1 else 1
        if n >= len(self.scopes):
            raise CompileError("pop exceeds stack depth")
        for _ in range(n):
            scope = self.scopes.pop()
            for label in scope.labels:
                sel = self.selectors.pop(label)
                self.label_order.remove(label)
                self.ctx.solver.add_clause([-sel])
            if scope.anon_selector is not None:
                self.ctx.solver.add_clause([-scope.anon_selector])
            self.ctx.undeclare(scope.decls, scope.sorts)
        self.success()

    def cmd_check_sat(self, cmd) -> None:
        assumptions = []
        for scope in self.scopes:
            if scope.anon_selector is not None:
                assumptions.append(scope.anon_selector)
        for label in self.label_order:
            assumptions.append(self.selectors[label])
        status = self.ctx.solver.solve(assumptions, self.options["timeout"])
        self.last_status = status
        if status == SAT:
            self._snapshot_model()
            self.ctx.solver.backtrack(0)
        elif status == UNSAT:
            failed = set(self.ctx.solver.conflict_core)
            sel_to_label = {v: k for k, v in self.selectors.items()}
            self.last_core = [sel_to_label[s] for s in
                              self.ctx.solver.conflict_core
                              if s in sel_to_label]
        self.emit(status)

    def _snapshot_model(self) -> None:
        ctx = self.ctx
        self.model = {}
        rep_canonical: dict[str, str] = {}
        for name in ctx.fun_order:
            sort = ctx.funs.get(name)
            if sort in (BOOL, INT, REAL) or sort is None:
                continue
            rep = ctx.euf.rep_of(name)
            rep_canonical.setdefault(rep, name)
        for name in ctx.fun_order:
            sort = ctx.funs.get(name)
            if sort is None:
                continue
            if sort == BOOL:
                var = ctx.bool_consts.get(name)
                value = ctx.solver.value(var) == 1 if var else False
                self.model[name] = (BOOL, value)
            elif sort in (INT, REAL):
                var = ctx.arith_consts.get(name)
                value = ctx.lra.value_of(var) if var is not None else Fraction(0)
                self.model[name] = (sort, value)
            else:
                rep = ctx.euf.rep_of(name)
                self.model[name] = (sort, rep_canonical.get(rep, name))

    def cmd_get_model(self, cmd) -> None:
        if self.last_status != SAT:
            raise CompileError("no model available")
        lines = ["(model"]
        for name, (sort, value) in self.model.items():
            lines.append(f"  (define-fun {quote_symbol(name)} () "
                         f"{quote_symbol(sort)} {_format_value(sort, value)})")
        lines.append(")")
        self.emit("\n".join(lines))

    def cmd_get_unsat_core(self, cmd) -> None:
        if self.last_status != UNSAT:
            raise CompileError("no unsat core available")
        self.emit("(" + " ".join(quote_symbol(l) for l in self.last_core) + ")")

    def cmd_get_info(self, cmd) -> None:
        key = cmd[1] if len(cmd) > 1 else ":name"
        if key == ":name":
            self.emit('(:name "fodot-smt")')
        else:
            self.emit(f"({key} unknown)")


def _format_value(sort: str, value) -> str:
    if sort == BOOL:
        return "true" if value else "false"
    if sort == INT:
        v = int(value)
        return str(v) if v >= 0 else f"(- {-v})"
    if sort == REAL:
        f = Fraction(value)
        sign = f < 0
        f = abs(f)
        if f.denominator == 1:
            text = f"{f.numerator}.0"
        else:
            text = f"(/ {f.numerator} {f.denominator})"
        return f"(- {text})" if sign else text
    return quote_symbol(str(value))


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    repl = Repl(sys.stdout)
    reader = SexprReader()
    if args:
        with open(args[0]) as f:
            reader.feed(f.read() + "\n")
        while True:
            cmd = reader.pop()
            if cmd is None:
                break
            if not repl.execute(cmd):
                return 0
        return 0
    while True:
        chunk = sys.stdin.readline()
        if chunk == "":
            return 0
        reader.feed(chunk)
        while True:
            cmd = reader.pop()
            if cmd is None:
                break
            if not repl.execute(cmd):
                return 0


if __name__ == "__main__":
    sys.exit(main())
