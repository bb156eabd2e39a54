"""Linear integer/real arithmetic for the DPLL(T) core.

General simplex over exact rationals with delta-rationals for strict bounds;
integer feasibility by bound tightening plus branch-and-bound. Atom shape:
`linear-combination <= / < / >= / > constant`; equalities are split into a
pair of inequalities during compilation.
"""

from __future__ import annotations

import time
from fractions import Fraction

from .core import Theory, TimeoutSignal

ZERO = Fraction(0)


class DR:
    """Delta-rational r + d*eps with infinitesimal eps > 0."""

    __slots__ = ("r", "d")

    def __init__(self, r, d=ZERO):
        self.r = Fraction(r)
        self.d = Fraction(d)

    def __le__(self, o):
        return (self.r, self.d) <= (o.r, o.d)

    def __lt__(self, o):
        return (self.r, self.d) < (o.r, o.d)

    def __eq__(self, o):
        return isinstance(o, DR) and self.r == o.r and self.d == o.d

    def __add__(self, o):
        return DR(self.r + o.r, self.d + o.d)

    def __sub__(self, o):
        return DR(self.r - o.r, self.d - o.d)

    def scale(self, c: Fraction):
        return DR(self.r * c, self.d * c)

    def __repr__(self):
        return f"DR({self.r},{self.d})" if self.d else f"DR({self.r})"


def floor_dr(v: DR) -> int:
    """Largest integer <= r + d*eps for infinitesimal eps."""
    import math
    if v.r.denominator == 1:
        return v.r.numerator - (1 if v.d < 0 else 0)
    return math.floor(v.r)


class LRA(Theory):
    def __init__(self) -> None:
        self.nxt = 0
        self.is_int: dict[int, bool] = {}
        self.lower: dict[int, tuple[DR, int | None]] = {}
        self.upper: dict[int, tuple[DR, int | None]] = {}
        self.assign: dict[int, DR] = {}
        self.rows: dict[int, dict[int, Fraction]] = {}   # basic var -> row
        self.slack_of: dict[tuple, int] = {}
        # sat var -> (theory var, (kind,bound) when true, (kind,bound) when false)
        self.atom_bounds: dict[int, tuple[int, tuple, tuple]] = {}
        self.bound_trail: list[tuple[str, int, tuple | None]] = []
        self.checkpoints: list[tuple[int, int]] = []  # (sat trail pos, bound len)
        self.model_values: dict[int, Fraction] = {}

    # -- construction -----------------------------------------------------------

    def new_theory_var(self, is_int: bool) -> int:
        v = self.nxt
        self.nxt += 1
        self.is_int[v] = is_int
        self.assign[v] = DR(0)
        return v

    def slack_for(self, combo: dict[int, Fraction]) -> int:
        """Theory variable constrained to equal the linear combination."""
        key = tuple(sorted(combo.items()))
        s = self.slack_of.get(key)
        if s is not None:
            return s
        s = self.new_theory_var(all(self.is_int[x] for x in combo))
        self.slack_of[key] = s
        self.rows[s] = dict(combo)
        self.assign[s] = self._row_value(combo)
        return s

    def _row_value(self, row: dict[int, Fraction]) -> DR:
        out = DR(0)
        for x, c in row.items():
            out = out + self.assign[x].scale(c)
        return out

    def register_atom(self, sat_var: int, theory_var: int,
                      pos: tuple, neg: tuple) -> None:
        self.atom_bounds[sat_var] = (theory_var, pos, neg)

    # -- assertion and undo ---------------------------------------------------------

    def assert_lit(self, lit: int, trail_pos: int) -> list[int] | None:
        entry = self.atom_bounds.get(abs(lit))
        if entry is None:
            return None
        var, pos, neg = entry
        kind, bound = pos if lit > 0 else neg
        self.checkpoints.append((trail_pos, len(self.bound_trail)))
        return self.assert_bound(var, kind, bound, lit)

    def assert_bound(self, x: int, kind: str, bound: DR,
                     reason: int | None) -> list[int] | None:
        if kind == "lo":
            cur = self.lower.get(x)
            if cur is not None and bound <= cur[0]:
                return None
            up = self.upper.get(x)
            if up is not None and up[0] < bound:
                return [l for l in (reason, up[1]) if l is not None]
            self.bound_trail.append(("lo", x, cur))
            self.lower[x] = (bound, reason)
            if x not in self.rows and self.assign[x] < bound:
                self._update(x, bound)
        else:
            cur = self.upper.get(x)
            if cur is not None and cur[0] <= bound:
                return None
            lo = self.lower.get(x)
            if lo is not None and bound < lo[0]:
                return [l for l in (reason, lo[1]) if l is not None]
            self.bound_trail.append(("hi", x, cur))
            self.upper[x] = (bound, reason)
            if x not in self.rows and bound < self.assign[x]:
                self._update(x, bound)
        return None

    def _update(self, x: int, v: DR) -> None:
        delta = v - self.assign[x]
        self.assign[x] = v
        for basic, row in self.rows.items():
            c = row.get(x)
            if c:
                self.assign[basic] = self.assign[basic] + delta.scale(c)

    def undo_to(self, trail_pos: int) -> None:
        bound_len = None
        while self.checkpoints and self.checkpoints[-1][0] >= trail_pos:
            bound_len = self.checkpoints.pop()[1]
        if bound_len is not None:
            self._restore_bounds(bound_len)

    def _restore_bounds(self, mark: int) -> None:
        while len(self.bound_trail) > mark:
            kind, x, old = self.bound_trail.pop()
            table = self.lower if kind == "lo" else self.upper
            if old is None:
                table.pop(x, None)
            else:
                table[x] = old

    # -- simplex ------------------------------------------------------------------

    def check(self, deadline: float | None,
              final: bool = False) -> list[int] | None:
        conflict = self._simplex(deadline)
        if conflict is not None:
            return [l for l in conflict if l is not None]
        if not final:
            return None  # integer feasibility settled at the final check
        mark = len(self.bound_trail)
        try:
            result = self._branch_ints(deadline, 0)
        finally:
            self._restore_bounds(mark)
        return result

    def _violated_basic(self) -> tuple[int, bool] | None:
        best = None
        for x in self.rows:
            lo = self.lower.get(x)
            if lo is not None and self.assign[x] < lo[0]:
                if best is None or x < best[0]:
                    best = (x, True)
                continue
            up = self.upper.get(x)
            if up is not None and up[0] < self.assign[x]:
                if best is None or x < best[0]:
                    best = (x, False)
        return best

    def _simplex(self, deadline: float | None) -> list | None:
        iterations = 0
        while True:
            iterations += 1
            if deadline is not None and iterations % 32 == 0 \
                    and time.monotonic() > deadline:
                raise TimeoutSignal()
            violated = self._violated_basic()
            if violated is None:
                return None
            xi, need_increase = violated
            row = self.rows[xi]
            target = self.lower[xi][0] if need_increase else self.upper[xi][0]
            xj = None
            for x in sorted(row):
                c = row[x]
                if need_increase:
                    ok = (c > 0 and self._can_increase(x)) or \
                         (c < 0 and self._can_decrease(x))
                else:
                    ok = (c > 0 and self._can_decrease(x)) or \
                         (c < 0 and self._can_increase(x))
                if ok:
                    xj = x
                    break
            if xj is None:
                out: list = [self.lower[xi][1] if need_increase else self.upper[xi][1]]
                for x in sorted(row):
                    c = row[x]
                    if (c > 0) == need_increase:
                        out.append(self.upper[x][1])
                    else:
                        out.append(self.lower[x][1])
                return out
            self._pivot_update(xi, xj, target)

    def _can_increase(self, x: int) -> bool:
        up = self.upper.get(x)
        return up is None or self.assign[x] < up[0]

    def _can_decrease(self, x: int) -> bool:
        lo = self.lower.get(x)
        return lo is None or lo[0] < self.assign[x]

    def _pivot_update(self, xi: int, xj: int, v: DR) -> None:
        row = self.rows.pop(xi)
        aij = row[xj]
        theta = (v - self.assign[xi]).scale(Fraction(1, 1) / aij)
        self.assign[xi] = v
        self.assign[xj] = self.assign[xj] + theta
        for basic, brow in self.rows.items():
            c = brow.get(xj)
            if c:
                self.assign[basic] = self.assign[basic] + theta.scale(c)
        # xj's new row: xj = (xi - sum others)/aij
        new_row: dict[int, Fraction] = {xi: Fraction(1) / aij}
        for x, c in row.items():
            if x != xj:
                new_row[x] = -c / aij
        # substitute xj in all other rows (an emptied row pins its basic var to 0)
        for basic, brow in list(self.rows.items()):
            c = brow.pop(xj, None)
            if c:
                for x, cx in new_row.items():
                    nv = brow.get(x, ZERO) + c * cx
                    if nv:
                        brow[x] = nv
                    else:
                        brow.pop(x, None)
        self.rows[xj] = new_row

    # -- integers ---------------------------------------------------------------------

    def _fractional_int_var(self) -> int | None:
        for x in sorted(self.is_int):
            if not self.is_int[x]:
                continue
            v = self.assign[x]
            if v.d != 0 or v.r.denominator != 1:
                return x
        return None

    def _branch_ints(self, deadline: float | None, depth: int) -> list[int] | None:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutSignal()
        if depth > 80:
            raise TimeoutSignal()
        x = self._fractional_int_var()
        if x is None:
            self._snapshot_model()
            return None
        if depth == 0 and self._try_floor_rounding():
            return None
        fv = floor_dr(self.assign[x])
        collected: list[int] = []
        for kind, bound in (("hi", DR(fv)), ("lo", DR(fv + 1))):
            mark = len(self.bound_trail)
            conflict = self.assert_bound(x, kind, bound, None)
            if conflict is None:
                conflict = self._simplex(deadline)
            if conflict is None:
                conflict = self._branch_ints(deadline, depth + 1)
            self._restore_bounds(mark)
            if conflict is None:
                return None
            collected.extend(l for l in conflict if l is not None)
        seen: set[int] = set()
        out = []
        for l in collected:
            if l not in seen:
                seen.add(l)
                out.append(l)
        return out

    def _try_floor_rounding(self) -> bool:
        """Round fractional integer vars down and re-verify all bounds.

        Difference-style constraint systems (the shape level mappings
        produce) admit the floor of any rational solution, so this usually
        avoids branch-and-bound entirely."""
        concrete = self._concrete_values()
        slack_vars = set(self.slack_of.values())
        candidate: dict[int, Fraction] = {}
        for x, value in concrete.items():
            if x in slack_vars:
                continue
            if self.is_int.get(x) and value.denominator != 1:
                candidate[x] = Fraction(value.numerator // value.denominator)
            else:
                candidate[x] = value
        for key, s in self.slack_of.items():
            total = Fraction(0)
            for var, coeff in key:
                total += coeff * candidate.get(var, concrete.get(var, ZERO))
            candidate[s] = total
        for x, value in candidate.items():
            lo = self.lower.get(x)
            if lo is not None:
                b = lo[0]
                if value < b.r or (value == b.r and b.d > 0):
                    return False
            up = self.upper.get(x)
            if up is not None:
                b = up[0]
                if value > b.r or (value == b.r and b.d < 0):
                    return False
        self.model_values = candidate
        return True

    # -- models -----------------------------------------------------------------------

    def _concrete_values(self) -> dict[int, Fraction]:
        eps = Fraction(1)
        for x in self.assign:
            v = self.assign[x]
            lo = self.lower.get(x)
            if lo is not None:
                b = lo[0]
                if b.r < v.r and b.d > v.d:
                    eps = min(eps, (v.r - b.r) / (b.d - v.d))
            up = self.upper.get(x)
            if up is not None:
                b = up[0]
                if v.r < b.r and v.d > b.d:
                    eps = min(eps, (b.r - v.r) / (v.d - b.d))
        return {x: v.r + v.d * eps for x, v in self.assign.items()}

    def _snapshot_model(self) -> None:
        self.model_values = self._concrete_values()

    def value_of(self, x: int) -> Fraction:
        return self.model_values.get(x, Fraction(0))
