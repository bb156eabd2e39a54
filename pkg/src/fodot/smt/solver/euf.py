"""Equality over constants of uninterpreted sorts: union-find with a proof
forest for explanations, plus disequality tracking."""

from __future__ import annotations

from .core import Theory


class EUF(Theory):
    def __init__(self) -> None:
        self.nodes: set[str] = set()
        self.parent: dict[str, str] = {}
        self.proof_parent: dict[str, tuple[str, int]] = {}  # child -> (other, lit)
        self.size: dict[str, int] = {}
        self.diseqs: list[tuple[str, str, int]] = []
        # sat var -> (a, b); positive asserts a=b, negative a!=b
        self.atoms: dict[int, tuple[str, str]] = {}
        self.trail: list[tuple] = []
        self.checkpoints: list[tuple[int, int]] = []

    def add_node(self, name: str) -> None:
        if name not in self.nodes:
            self.nodes.add(name)
            self.parent[name] = name
            self.size[name] = 1

    def register_atom(self, sat_var: int, a: str, b: str) -> None:
        self.add_node(a)
        self.add_node(b)
        self.atoms[sat_var] = (a, b)

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    # -- proof forest -----------------------------------------------------------

    def _reorient(self, x: str) -> None:
        """Make x the root of its proof tree by flipping edges on its path."""
        path = []
        cur = x
        while cur in self.proof_parent:
            nxt, lit = self.proof_parent[cur]
            path.append((cur, nxt, lit))
            cur = nxt
        for child, parent, lit in reversed(path):
            del self.proof_parent[child]
            self.proof_parent[parent] = (child, lit)

    def explain(self, a: str, b: str) -> list[int]:
        """Literals whose conjunction merged a and b (walk to common ancestor)."""
        anc: dict[str, list[int]] = {}
        cur, lits = a, []
        while True:
            anc[cur] = list(lits)
            step = self.proof_parent.get(cur)
            if step is None:
                break
            lits.append(step[1])
            cur = step[0]
        cur, lits = b, []
        while cur not in anc:
            step = self.proof_parent[cur]
            lits.append(step[1])
            cur = step[0]
        return anc[cur] + lits

    # -- assertions ------------------------------------------------------------------

    def assert_lit(self, lit: int, trail_pos: int) -> list[int] | None:
        pair = self.atoms.get(abs(lit))
        if pair is None:
            return None
        self.checkpoints.append((trail_pos, len(self.trail)))
        a, b = pair
        if lit > 0:
            return self._merge(a, b, lit)
        return self._split(a, b, lit)

    def _merge(self, a: str, b: str, lit: int) -> list[int] | None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        for x, y, dlit in self.diseqs:
            rx, ry = self.find(x), self.find(y)
            if {rx, ry} == {ra, rb}:
                return [lit, dlit] + self.explain(a, x if rx == ra else y) \
                    + self.explain(b, y if ry == rb else x)
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
            a, b = b, a
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self._reorient(b)
        self.proof_parent[b] = (a, lit)
        self.trail.append(("merge", rb, b))
        return None

    def _split(self, a: str, b: str, lit: int) -> list[int] | None:
        if self.find(a) == self.find(b):
            return [lit] + self.explain(a, b)
        self.diseqs.append((a, b, lit))
        self.trail.append(("diseq",))
        return None

    def check(self, deadline, final: bool = False) -> list[int] | None:
        return None  # merges and splits keep the state consistent eagerly

    def undo_to(self, trail_pos: int) -> None:
        mark = None
        while self.checkpoints and self.checkpoints[-1][0] >= trail_pos:
            mark = self.checkpoints.pop()[1]
        if mark is None:
            return
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry[0] == "merge":
                _, rb, _b = entry
                root = self.find(rb)
                self.size[root] -= self.size[rb]
                self.parent[rb] = rb
                # later reorientations may have flipped this merge's proof
                # edge, so locate it as the unique edge crossing the split
                for child, (par, _) in list(self.proof_parent.items()):
                    if (self.find(child) == rb) != (self.find(par) == rb):
                        del self.proof_parent[child]
                        break
            else:
                self.diseqs.pop()

    # -- models ------------------------------------------------------------------------

    def rep_of(self, name: str) -> str:
        if name not in self.nodes:
            return name
        return self.find(name)
