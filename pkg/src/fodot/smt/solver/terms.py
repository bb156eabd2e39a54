"""Compilation of SMT-LIB terms into SAT literals and theory atoms.

Formulas are Tseitin-encoded with structural caching, so re-asserting the
same formula (frequent under push/pop probing) reuses its encoding.
Arithmetic atoms are normalized linear combinations handed to the simplex;
equalities over Int/Real split into two inequalities, equalities over
uninterpreted sorts go to the union-find, equalities over Bool become iff.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import Solver
from .euf import EUF
from .lra import DR, LRA

BOOL = "Bool"
INT = "Int"
REAL = "Real"


class CompileError(Exception):
    pass


def freeze(s):
    if isinstance(s, list):
        return tuple(freeze(x) for x in s)
    return s


class Context:
    def __init__(self) -> None:
        self.solver = Solver()
        self.lra = LRA()
        self.euf = EUF()
        self.solver.theories = [self.lra, self.euf]
        self.sorts: set[str] = set()
        self.funs: dict[str, str] = {}          # constant name -> sort
        self.fun_order: list[str] = []
        self.bool_consts: dict[str, int] = {}
        self.arith_consts: dict[str, int] = {}
        self.cache: dict[tuple, object] = {}
        self._fresh = 0
        t = self.solver.new_var()
        self.solver.add_clause([t])
        self.true_lit = t

    # -- declarations ----------------------------------------------------------

    def declare_sort(self, name: str) -> None:
        if name in self.sorts or name in (BOOL, INT, REAL):
            raise CompileError(f"sort {name} already declared")
        self.sorts.add(name)

    def declare_fun(self, name: str, sort: str) -> None:
        if name in self.funs:
            raise CompileError(f"constant {name} already declared")
        if sort not in (BOOL, INT, REAL) and sort not in self.sorts:
            raise CompileError(f"unknown sort {sort}")
        self.funs[name] = sort
        self.fun_order.append(name)
        if sort not in (BOOL, INT, REAL):
            self.euf.add_node(name)

    def undeclare(self, names: list[str], sorts: list[str]) -> None:
        for n in names:
            self.funs.pop(n, None)
            if n in self.fun_order:
                self.fun_order.remove(n)
        for s in sorts:
            self.sorts.discard(s)

    # -- variables ----------------------------------------------------------------

    def bool_const(self, name: str) -> int:
        v = self.bool_consts.get(name)
        if v is None:
            v = self.solver.new_var()
            self.bool_consts[name] = v
        return v

    def arith_const(self, name: str) -> int:
        v = self.arith_consts.get(name)
        if v is None:
            v = self.lra.new_theory_var(self.funs[name] == INT)
            self.arith_consts[name] = v
        return v

    def fresh_name(self, prefix: str) -> str:
        self._fresh += 1
        return f"\x00{prefix}{self._fresh}"

    # -- formula compilation ----------------------------------------------------------

    def compile_formula(self, s) -> int:
        value = self.compile(s)
        if not isinstance(value, BoolVal):
            raise CompileError(f"expected a formula, got a term: {s}")
        return value.lit

    def compile(self, s):
        key = ("c", freeze(s))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        out = self._compile(s)
        self.cache[key] = out
        return out

    def _compile(self, s):
        if isinstance(s, str):
            return self._compile_atom(s)
        if not s:
            raise CompileError("empty application")
        head = s[0]
        args = s[1:]
        if head == "!":
            return self.compile(args[0])
        if head in ("and", "or", "not", "=>", "xor"):
            lits = [self.compile_formula(a) for a in args]
            return BoolVal(self._gate(head, lits))
        if head == "ite":
            return self._compile_ite(args)
        if head == "=":
            return self._compile_eq(args)
        if head == "distinct":
            return self._compile_distinct(args)
        if head in ("<", "<=", ">", ">="):
            return BoolVal(self._compile_cmp(head, args))
        if head in ("+", "-", "*", "/"):
            return self._compile_arith(head, args)
        if head == "to_real":
            return self.compile(args[0])
        raise CompileError(f"unsupported operator {head}")

    def _compile_atom(self, s: str):
        if s == "true":
            return BoolVal(self.true_lit)
        if s == "false":
            return BoolVal(-self.true_lit)
        if _is_numeral(s):
            return ArithVal({}, Fraction(s), True)
        if _is_decimal(s):
            return ArithVal({}, Fraction(s), False)
        sort = self.funs.get(s)
        if sort is None:
            raise CompileError(f"unknown constant {s}")
        if sort == BOOL:
            return BoolVal(self.bool_const(s))
        if sort in (INT, REAL):
            return ArithVal({self.arith_const(s): Fraction(1)}, Fraction(0),
                            sort == INT)
        return SortVal(sort, s)

    # -- boolean gates ------------------------------------------------------------------

    def _gate(self, op: str, lits: list[int]) -> int:
        if op == "not":
            return -lits[0]
        if op == "=>":
            out = lits[-1]
            for l in reversed(lits[:-1]):
                out = self._gate("or", [-l, out])
            return out
        if op == "xor":
            out = lits[0]
            for l in lits[1:]:
                out = -self._iff(out, l)
            return out
        key = (op, tuple(sorted(lits)))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        add = self.solver.add_clause
        if op == "and":
            for l in lits:
                if l == -self.true_lit:
                    self.cache[key] = -self.true_lit
                    return -self.true_lit
            lits = [l for l in lits if l != self.true_lit]
            if not lits:
                return self.true_lit
            if len(lits) == 1:
                return lits[0]
            t = self.solver.new_var()
            for l in lits:
                add([-t, l])
            add([t] + [-l for l in lits])
        else:  # or
            for l in lits:
                if l == self.true_lit:
                    self.cache[key] = self.true_lit
                    return self.true_lit
            lits = [l for l in lits if l != -self.true_lit]
            if not lits:
                return -self.true_lit
            if len(lits) == 1:
                return lits[0]
            t = self.solver.new_var()
            for l in lits:
                add([-l, t])
            add([-t] + lits)
        self.cache[key] = t
        return t

    def _iff(self, a: int, b: int) -> int:
        key = ("iff", tuple(sorted((a, b))))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if a == b:
            return self.true_lit
        if a == -b:
            return -self.true_lit
        if a == self.true_lit:
            return b
        if b == self.true_lit:
            return a
        if a == -self.true_lit:
            return -b
        if b == -self.true_lit:
            return -a
        t = self.solver.new_var()
        add = self.solver.add_clause
        add([-t, -a, b])
        add([-t, a, -b])
        add([t, a, b])
        add([t, -a, -b])
        self.cache[key] = t
        return t

    # -- ite ----------------------------------------------------------------------------

    def _compile_ite(self, args):
        cond = self.compile_formula(args[0])
        then = self.compile(args[1])
        other = self.compile(args[2])
        if isinstance(then, BoolVal):
            if not isinstance(other, BoolVal):
                raise CompileError("ite branches have different sorts")
            t = self._gate("or", [
                self._gate("and", [cond, then.lit]),
                self._gate("and", [-cond, other.lit])])
            return BoolVal(t)
        key = ("ite", freeze(args))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if isinstance(then, ArithVal):
            if not isinstance(other, ArithVal):
                raise CompileError("ite branches have different sorts")
            is_int = then.is_int and other.is_int
            name = self.fresh_name("ite")
            self.funs[name] = INT if is_int else REAL
            v = self.arith_const(name)
            out = ArithVal({v: Fraction(1)}, Fraction(0), is_int)
            eq_then = self._arith_eq(out, then)
            eq_other = self._arith_eq(out, other)
        else:
            if not isinstance(other, SortVal) or other.sort != then.sort:
                raise CompileError("ite branches have different sorts")
            name = self.fresh_name("ite")
            self.euf.add_node(name)
            out = SortVal(then.sort, name)
            eq_then = self._uf_eq(name, then.node)
            eq_other = self._uf_eq(name, other.node)
        self.solver.add_clause([-cond, eq_then])
        self.solver.add_clause([cond, eq_other])
        self.cache[key] = out
        return out

    # -- equality and comparisons ---------------------------------------------------------

    def _compile_eq(self, args):
        vals = [self.compile(a) for a in args]
        lits = []
        for a, b in zip(vals, vals[1:]):
            lits.append(self._eq_pair(a, b))
        return BoolVal(self._gate("and", lits))

    def _eq_pair(self, a, b) -> int:
        if isinstance(a, BoolVal) and isinstance(b, BoolVal):
            return self._iff(a.lit, b.lit)
        if isinstance(a, ArithVal) and isinstance(b, ArithVal):
            return self._arith_eq(a, b)
        if isinstance(a, SortVal) and isinstance(b, SortVal) and a.sort == b.sort:
            return self._uf_eq(a.node, b.node)
        raise CompileError("equality between different sorts")

    def _compile_distinct(self, args):
        vals = [self.compile(a) for a in args]
        lits = []
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                lits.append(-self._eq_pair(vals[i], vals[j]))
        return BoolVal(self._gate("and", lits))

    def _uf_eq(self, a: str, b: str) -> int:
        if a == b:
            return self.true_lit
        key = ("ufeq", *sorted((a, b)))
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        v = self.solver.new_var()
        self.euf.register_atom(v, a, b)
        self.solver.theory_vars.add(v)
        self.cache[key] = v
        return v

    def _arith_eq(self, a, b) -> int:
        le = self._bound_atom("<=", a, b)
        ge = self._bound_atom(">=", a, b)
        return self._gate("and", [le, ge])

    def _compile_cmp(self, op: str, args) -> int:
        vals = [self.compile(a) for a in args]
        lits = []
        for a, b in zip(vals, vals[1:]):
            if not isinstance(a, ArithVal) or not isinstance(b, ArithVal):
                raise CompileError(f"{op} needs numeric operands")
            lits.append(self._bound_atom(op, a, b))
        return self._gate("and", lits)

    def _bound_atom(self, op: str, a, b) -> int:
        """Atom for `a op b` with a,b arithmetic values."""
        combo: dict[int, Fraction] = dict(a.combo)
        for v, c in b.combo.items():
            combo[v] = combo.get(v, Fraction(0)) - c
            if combo[v] == 0:
                del combo[v]
        k = b.const - a.const  # combo op k
        if op == ">":
            op, combo, k = "<", {v: -c for v, c in combo.items()}, -k
        elif op == ">=":
            op, combo, k = "<=", {v: -c for v, c in combo.items()}, -k
        if not combo:
            zero = Fraction(0)
            truth = (zero < k) if op == "<" else (zero <= k)
            return self.true_lit if truth else -self.true_lit
        # canonical form: integer coefficients, gcd 1, first coefficient
        # positive; the comparison becomes an upper or lower bound
        items = sorted(combo.items())
        denom_lcm = 1
        for _, c in items:
            denom_lcm = denom_lcm * c.denominator // math.gcd(
                denom_lcm, c.denominator)
        g = 0
        for _, c in items:
            g = math.gcd(g, abs(c.numerator) * (denom_lcm // c.denominator))
        scale = Fraction(denom_lcm, g)
        upper = True  # combo (<|<=) k
        if items[0][1] < 0:
            scale = -scale
            upper = False  # -combo (<|<=) -k  ==  combo (>|>=) k'
        combo = {v: c * scale for v, c in items}
        k = k * scale
        strict = op == "<"
        key = ("cmp", tuple(sorted(combo.items())), upper, strict, k)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if len(combo) == 1 and next(iter(combo.values())) == 1:
            s = next(iter(combo))
        else:
            s = self.lra.slack_for(combo)
        is_int = self.lra.is_int[s] and \
            all(c.denominator == 1 for c in combo.values())
        pos, neg = _bounds_for(upper, strict, k, is_int)
        v = self.solver.new_var()
        self.lra.register_atom(v, s, pos, neg)
        self.solver.theory_vars.add(v)
        self.cache[key] = v
        return v

    # -- arithmetic terms --------------------------------------------------------------------

    def _compile_arith(self, op: str, args):
        vals = [self.compile(a) for a in args]
        for v in vals:
            if not isinstance(v, ArithVal):
                raise CompileError(f"{op} needs numeric operands")
        if op == "-" and len(vals) == 1:
            a = vals[0]
            return ArithVal({v: -c for v, c in a.combo.items()}, -a.const,
                            a.is_int)
        if op == "+" or op == "-":
            out = vals[0]
            for v in vals[1:]:
                sign = Fraction(1) if op == "+" else Fraction(-1)
                combo = dict(out.combo)
                for var, c in v.combo.items():
                    combo[var] = combo.get(var, Fraction(0)) + sign * c
                    if combo[var] == 0:
                        del combo[var]
                out = ArithVal(combo, out.const + sign * v.const,
                               out.is_int and v.is_int)
            return out
        if op == "*":
            const = Fraction(1)
            symbolic = None
            is_int = True
            for v in vals:
                is_int = is_int and v.is_int
                if not v.combo:
                    const *= v.const
                elif symbolic is None:
                    symbolic = v
                else:
                    raise CompileError("nonlinear multiplication")
            if symbolic is None:
                return ArithVal({}, const, is_int)
            return ArithVal({var: c * const for var, c in symbolic.combo.items()},
                            symbolic.const * const, is_int)
        # division: the divisor must fold to a nonzero constant
        out = vals[0]
        for v in vals[1:]:
            if v.combo or v.const == 0:
                raise CompileError("nonlinear or zero division")
            out = ArithVal({var: c / v.const for var, c in out.combo.items()},
                           out.const / v.const, False)
        return out


class BoolVal:
    __slots__ = ("lit",)

    def __init__(self, lit: int):
        self.lit = lit


class ArithVal:
    __slots__ = ("combo", "const", "is_int")

    def __init__(self, combo: dict[int, Fraction], const: Fraction, is_int: bool):
        self.combo = combo
        self.const = const
        self.is_int = is_int


class SortVal:
    __slots__ = ("sort", "node")

    def __init__(self, sort: str, node: str):
        self.sort = sort
        self.node = node


def _bounds_for(upper: bool, strict: bool, k: Fraction,
                is_int: bool) -> tuple[tuple, tuple]:
    """(kind, bound) pairs asserted when the atom is true resp. false."""
    if is_int:
        # tighten to non-strict integer bounds
        if upper:
            # combo < k  -> hi ceil(k)-1;  combo <= k -> hi floor(k)
            pos = ("hi", DR(_ceil(k) - 1 if strict else math.floor(k)))
            # not(< k) -> lo ceil(k);  not(<= k) -> lo floor(k)+1
            neg = ("lo", DR(_ceil(k) if strict else math.floor(k) + 1))
            return pos, neg
        # combo > k -> lo floor(k)+1;  combo >= k -> lo ceil(k)
        pos = ("lo", DR(math.floor(k) + 1 if strict else _ceil(k)))
        # not(> k) -> hi floor(k);  not(>= k) -> hi ceil(k)-1
        neg = ("hi", DR(math.floor(k) if strict else _ceil(k) - 1))
        return pos, neg
    if upper:
        pos = ("hi", DR(k, Fraction(-1)) if strict else DR(k))
        neg = ("lo", DR(k) if strict else DR(k, Fraction(1)))
        return pos, neg
    pos = ("lo", DR(k, Fraction(1)) if strict else DR(k))
    neg = ("hi", DR(k) if strict else DR(k, Fraction(-1)))
    return pos, neg


def _is_numeral(s: str) -> bool:
    body = s[1:] if s.startswith("-") else s
    return body.isdigit()


def _is_decimal(s: str) -> bool:
    if "." not in s:
        return False
    body = s[1:] if s.startswith("-") else s
    a, _, b = body.partition(".")
    return a.isdigit() and b.isdigit()


def _ceil(k: Fraction) -> int:
    return -math.floor(-k)
