"""CDCL SAT core with assumptions, failed-assumption analysis and theory
hooks (DPLL(T) with theory checks at propagation fixpoints)."""

from __future__ import annotations

import time

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class Clause:
    __slots__ = ("lits", "learned")

    def __init__(self, lits: list[int], learned: bool = False):
        self.lits = lits
        self.learned = learned


class Theory:
    """Interface for theory plugins driven by the SAT core."""

    def assert_lit(self, lit: int, trail_pos: int) -> list[int] | None:
        """Record an asserted theory literal. May return a conflict
        explanation: currently-true literals whose conjunction is
        theory-inconsistent."""

    def check(self, deadline: float | None,
              final: bool = False) -> list[int] | None:
        """Consistency check; None when consistent. `final` marks the check
        at a full boolean assignment, where the theory must be complete
        (intermediate checks may be cheaper approximations)."""

    def undo_to(self, trail_pos: int) -> None:
        pass


class TimeoutSignal(Exception):
    pass


class Solver:
    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: list[Clause] = []
        self.watches: dict[int, list[Clause]] = {}
        self.values: list[int] = [0]        # 1 true, -1 false, 0 unassigned
        self.levels: list[int] = [0]
        self.reasons: list[Clause | None] = [None]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity: list[float] = [0.0]
        self.var_inc = 1.0
        self.phase: list[bool] = [False]
        self.theory_vars: set[int] = set()
        self.theories: list[Theory] = []
        self.theory_head = 0
        self._theory_dirty = False
        self.root_conflict = False
        self.conflict_core: list[int] = []
        self._assumptions: list[int] = []
        self._assumption_set: set[int] = set()

    # -- variables and clauses ------------------------------------------------

    def new_var(self, phase: bool = False) -> int:
        self.nvars += 1
        self.values.append(0)
        self.levels.append(0)
        self.reasons.append(None)
        self.activity.append(0.0)
        self.phase.append(phase)
        v = self.nvars
        self.watches[v] = []
        self.watches[-v] = []
        return v

    def value(self, lit: int) -> int:
        v = self.values[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: list[int]) -> bool:
        """Add a clause at decision level 0; False = trivially unsat."""
        assert not self.trail_lim, "clauses must be added at decision level 0"
        out: list[int] = []
        seen: set[int] = set()
        for lit in lits:
            if self.value(lit) == 1:
                return True
            if self.value(lit) == -1:
                continue
            if lit in seen:
                continue
            if -lit in seen:
                return True
            seen.add(lit)
            out.append(lit)
        if not out:
            self.root_conflict = True
            return False
        if len(out) == 1:
            if not self._enqueue(out[0], None):
                self.root_conflict = True
                return False
            return True
        clause = Clause(out)
        self.clauses.append(clause)
        self.watches[out[0]].append(clause)
        self.watches[out[1]].append(clause)
        return True

    # -- assignment --------------------------------------------------------------

    def _enqueue(self, lit: int, reason: Clause | None) -> bool:
        if self.value(lit) == -1:
            return False
        if self.value(lit) == 1:
            return True
        var = abs(lit)
        self.values[var] = 1 if lit > 0 else -1
        self.levels[var] = len(self.trail_lim)
        self.reasons[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> Clause | None:
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            ws = self.watches[false_lit]
            kept: list[Clause] = []
            i = 0
            n = len(ws)
            while i < n:
                clause = ws[i]
                i += 1
                lits = clause.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if self.value(first) == 1:
                    kept.append(clause)
                    continue
                moved = False
                for k in range(2, len(lits)):
                    if self.value(lits[k]) != -1:
                        lits[1], lits[k] = lits[k], lits[1]
                        self.watches[lits[1]].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(clause)
                if not self._enqueue(first, clause):
                    kept.extend(ws[i:])
                    self.watches[false_lit] = kept
                    return clause
            self.watches[false_lit] = kept
        return None

    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _new_level(self) -> None:
        self.trail_lim.append(len(self.trail))

    def backtrack(self, level: int) -> None:
        if self.decision_level() <= level:
            return
        bound = self.trail_lim[level]
        for lit in reversed(self.trail[bound:]):
            var = abs(lit)
            self.phase[var] = lit > 0
            self.values[var] = 0
            self.reasons[var] = None
        del self.trail[bound:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, len(self.trail))
        if self.theory_head > len(self.trail):
            for t in self.theories:
                t.undo_to(len(self.trail))
            self.theory_head = len(self.trail)

    # -- conflict analysis ---------------------------------------------------------

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for i in range(1, self.nvars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict: Clause) -> tuple[list[int], int]:
        """1UIP learning; requires >= 1 conflict literal at the current level."""
        learnt: list[int] = [0]
        seen = [False] * (self.nvars + 1)
        counter = 0
        lit: int | None = None
        index = len(self.trail) - 1
        clause = conflict
        current = self.decision_level()
        while True:
            for q in clause.lits:
                if lit is not None and q == lit:
                    continue
                var = abs(q)
                if not seen[var] and self.levels[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if self.levels[var] >= current:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[index])]:
                index -= 1
            lit = self.trail[index]
            seen[abs(lit)] = False
            index -= 1
            counter -= 1
            if counter <= 0:
                break
            clause = self.reasons[abs(lit)]
        learnt[0] = -lit
        if len(learnt) == 1:
            return learnt, 0
        second = max(range(1, len(learnt)), key=lambda k: self.levels[abs(learnt[k])])
        back = self.levels[abs(learnt[second])]
        learnt[1], learnt[second] = learnt[second], learnt[1]
        return learnt, back

    def _analyze_final(self, lits: list[int]) -> list[int]:
        """Failed assumptions behind a set of assigned literals."""
        found: set[int] = set()
        seen: set[int] = set()
        stack = [abs(x) for x in lits]
        while stack:
            var = stack.pop()
            if var in seen or self.levels[var] == 0:
                continue
            seen.add(var)
            reason = self.reasons[var]
            if reason is None:
                value_lit = var if self.values[var] == 1 else -var
                if value_lit in self._assumption_set:
                    found.add(value_lit)
            else:
                stack.extend(abs(q) for q in reason.lits)
        return [a for a in self._assumptions if a in found]

    # -- theory integration ------------------------------------------------------

    def _theory_propagate(self, deadline, force: bool) -> Clause | None:
        while self.theory_head < len(self.trail):
            lit = self.trail[self.theory_head]
            pos = self.theory_head
            self.theory_head += 1
            if abs(lit) in self.theory_vars:
                self._theory_dirty = True
                for t in self.theories:
                    explanation = t.assert_lit(lit, pos)
                    if explanation is not None:
                        return self._explanation_clause(explanation)
        if self._theory_dirty or force:
            self._theory_dirty = False
            for t in self.theories:
                explanation = t.check(deadline, final=force)
                if explanation is not None:
                    return self._explanation_clause(explanation)
        return None

    def _explanation_clause(self, explanation: list[int]) -> Clause:
        if not explanation:
            self.root_conflict = True
        return Clause([-l for l in explanation], learned=True)

    # -- solving ---------------------------------------------------------------------

    def solve(self, assumptions: list[int] | None = None,
              timeout_ms: int | None = None) -> str:
        if self.root_conflict:
            self.conflict_core = []
            return UNSAT
        self._assumptions = list(assumptions or [])
        self._assumption_set = set(self._assumptions)
        self.conflict_core = []
        deadline = (time.monotonic() + timeout_ms / 1000.0) if timeout_ms else None
        self.backtrack(0)  # the propagated level-0 prefix is kept as-is
        conflicts_since_restart = 0
        restart_limit = 128
        try:
            while True:
                if deadline is not None and time.monotonic() > deadline:
                    raise TimeoutSignal()
                conflict = self._propagate()
                if conflict is None:
                    conflict = self._theory_propagate(deadline, force=False)
                if conflict is not None:
                    result = self._handle_conflict(conflict)
                    if result is not None:
                        return result
                    conflicts_since_restart += 1
                    if conflicts_since_restart >= restart_limit:
                        conflicts_since_restart = 0
                        restart_limit = int(restart_limit * 1.5)
                        self.backtrack(0)
                    continue
                if self.decision_level() < len(self._assumptions):
                    a = self._assumptions[self.decision_level()]
                    if self.value(a) == 1:
                        self._new_level()
                    elif self.value(a) == -1:
                        found = set(self._analyze_final([a])) | {a}
                        self.conflict_core = [x for x in self._assumptions
                                              if x in found]
                        self.backtrack(0)
                        return UNSAT
                    else:
                        self._new_level()
                        self._enqueue(a, None)
                    continue
                var = self._pick_branch()
                if var == 0:
                    conflict = self._theory_propagate(deadline, force=True)
                    if conflict is not None:
                        result = self._handle_conflict(conflict)
                        if result is not None:
                            return result
                        continue
                    return SAT  # model intact; caller must backtrack(0) later
                self._new_level()
                self._enqueue(var if self.phase[var] else -var, None)
        except TimeoutSignal:
            self.backtrack(0)
            return UNKNOWN

    def _handle_conflict(self, conflict: Clause) -> str | None:
        if self.root_conflict:
            self.conflict_core = []
            return UNSAT
        max_level = max((self.levels[abs(q)] for q in conflict.lits), default=0)
        if max_level < self.decision_level():
            self.backtrack(max_level)
        if self.decision_level() == 0:
            self.conflict_core = self._analyze_final(conflict.lits)
            if not self._assumptions:
                self.root_conflict = True
            self.backtrack(0)
            return UNSAT
        if self.decision_level() <= len(self._assumptions):
            # all involved decisions are assumptions: jointly inconsistent
            self.conflict_core = self._analyze_final(conflict.lits)
            self.backtrack(0)
            return UNSAT
        learnt, back = self._analyze(conflict)
        self.backtrack(back)
        if len(learnt) == 1:
            if not self._enqueue(learnt[0], None):
                self.root_conflict = True
                self.conflict_core = []
                return UNSAT
        else:
            clause = Clause(learnt, learned=True)
            self.clauses.append(clause)
            self.watches[learnt[0]].append(clause)
            self.watches[learnt[1]].append(clause)
            self._enqueue(learnt[0], clause)
        self.var_inc /= 0.95
        return None

    def _pick_branch(self) -> int:
        best = 0
        best_act = -1.0
        values = self.values
        activity = self.activity
        for v in range(1, self.nvars + 1):
            if values[v] == 0 and activity[v] > best_act:
                best = v
                best_act = activity[v]
        return best
