"""Transitive closure of the production priority relation."""

from __future__ import annotations

from .model import GrammarError


class PriorityCycleError(GrammarError):
    def __init__(self, cycle: list[int]):
        self.cycle = cycle
        super().__init__("priority cycle: " + " > ".join(map(str, cycle)))


def priority_closure(pairs) -> frozenset:
    """Close ``pairs`` of (higher, lower) ids transitively; a cycle raises with its path."""
    succ: dict[int, set[int]] = {}
    for hi, lo in pairs:
        succ.setdefault(hi, set()).add(lo)

    # a reflexive pair or any back edge is a cycle; find one path for the report
    state: dict[int, int] = {}
    stack: list[int] = []

    def visit(n: int) -> None:
        state[n] = 1
        stack.append(n)
        for m in sorted(succ.get(n, ())):
            if state.get(m) == 1:
                raise PriorityCycleError(stack[stack.index(m):] + [m])
            if m not in state:
                visit(m)
        stack.pop()
        state[n] = 2

    for n in sorted(succ):
        if n not in state:
            visit(n)

    closed: set[tuple[int, int]] = set()
    for n in succ:
        seen: set[int] = set()
        todo = list(succ[n])
        while todo:
            m = todo.pop()
            if m in seen:
                continue
            seen.add(m)
            todo.extend(succ.get(m, ()))
        closed.update((n, m) for m in seen)
    return frozenset(closed)
