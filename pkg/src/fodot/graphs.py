"""Strongly connected components (iterative Tarjan) in topological order."""

from __future__ import annotations

from typing import Hashable, Iterable


def sccs(nodes: Iterable[Hashable],
         succ: dict[Hashable, set[Hashable]]) -> list[list[Hashable]]:
    """SCCs of a digraph, returned in reverse topological order: every edge
    points from a later component to an earlier one (dependencies first)."""
    index: dict[Hashable, int] = {}
    low: dict[Hashable, int] = {}
    on_stack: set[Hashable] = set()
    stack: list[Hashable] = []
    out: list[list[Hashable]] = []
    counter = [0]

    def strongconnect(root: Hashable) -> None:
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)

    for n in nodes:
        if n not in index:
            strongconnect(n)
    return out
