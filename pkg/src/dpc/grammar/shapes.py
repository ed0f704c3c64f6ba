"""Operator-shape classification and spine reachability."""

from __future__ import annotations

from enum import Enum

from .model import Contextual, NormalizedGrammar, Production, Sort


class OperatorShape(Enum):
    PREFIX = "prefix"
    POSTFIX = "postfix"
    INFIX = "infix"
    CLOSED = "closed"


def _nt(sym) -> str | None:
    return sym.name if isinstance(sym, (Sort, Contextual)) else None


def _injects_to(g: NormalizedGrammar, name: str, target: str) -> bool:
    """``name`` reaches ``target`` through zero or more injection or bracket productions."""
    seen = set()
    todo = [name]
    while todo:
        n = todo.pop()
        if n == target:
            return True
        if n in seen:
            continue
        seen.add(n)
        for p in g.by_lhs.get(n, ()):
            if g.is_injection(p) or p.is_bracket:
                inner = [_nt(p.rhs[i]) for i in p.args if _nt(p.rhs[i])]
                todo.extend(inner)
    return False


def edge_symbols(p: Production) -> tuple:
    """(leftmost, rightmost) non-layout rhs symbols, or (None, None) for empty rhs."""
    if not p.args:
        return None, None
    return p.rhs[p.args[0]], p.rhs[p.args[-1]]


def classify_production(prod: Production, g: NormalizedGrammar) -> OperatorShape:
    first, last = edge_symbols(prod)
    left = first is not None and _nt(first) is not None and _injects_to(g, _nt(first), prod.lhs)
    right = last is not None and _nt(last) is not None and _injects_to(g, _nt(last), prod.lhs)
    if left and right:
        return OperatorShape.INFIX
    if right:
        return OperatorShape.PREFIX
    if left:
        return OperatorShape.POSTFIX
    return OperatorShape.CLOSED


class Spines:
    """Leftmost/rightmost reachability between nonterminals.

    ``reach(side, A)`` is the set of nonterminals whose trees can occur on the given
    spine of a tree for ``A`` (including ``A``). Spines follow the edge symbol of every
    production except lexical, literal, layout and bracket ones: terminals end a spine
    and a bracketed subtree blocks it.
    """

    def __init__(self, g: NormalizedGrammar):
        self.g = g
        self._edges = {"left": {}, "right": {}}
        for p in g.productions:
            if not self.transparent(p):
                continue
            first, last = edge_symbols(p)
            for side, sym in (("left", first), ("right", last)):
                n = _nt(sym)
                if n is not None:
                    self._edges[side].setdefault(p.lhs, set()).add(n)
        self._cache: dict = {}

    @staticmethod
    def transparent(p: Production) -> bool:
        return not (p.lexical or p.is_bracket or p.kind in ("literal", "layout", "start"))

    def reach(self, side: str, name: str) -> frozenset:
        key = (side, name)
        if key not in self._cache:
            seen = set()
            todo = [name]
            edges = self._edges[side]
            while todo:
                n = todo.pop()
                if n in seen:
                    continue
                seen.add(n)
                todo.extend(edges.get(n, ()))
            self._cache[key] = frozenset(seen)
        return self._cache[key]

    def productions_on(self, side: str, name: str) -> frozenset:
        """Ids of productions that can build a node on the given spine of a ``name`` tree."""
        return frozenset(p.id for n in self.reach(side, name) for p in self.g.by_lhs.get(n, ()))

    def open_side(self, p: Production, side: str) -> bool:
        """True when the given edge of ``p`` can, through any chain of spines, end in ``p.lhs`` again."""
        first, last = edge_symbols(p)
        n = _nt(first if side == "left" else last)
        if n is None or not self.transparent(p):
            return False
        return p.lhs in self.reach(side, n)
