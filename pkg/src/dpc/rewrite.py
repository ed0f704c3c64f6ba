"""Contextual-grammar rewriting: duplicate productions per contextual nonterminal."""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import ContextualGrammar
from .grammar import Contextual, GrammarError, NormalizedGrammar, Production, Sort, Spines


class RewriteError(GrammarError):
    pass


@dataclass(frozen=True, order=True)
class ContextualNonterminalKey:
    lm: frozenset
    base: str
    rm: frozenset

    def __post_init__(self):
        object.__setattr__(self, "lm", frozenset(self.lm))
        object.__setattr__(self, "rm", frozenset(self.rm))

    @property
    def empty(self) -> bool:
        return not (self.lm or self.rm)

    def sort_key(self):
        return (self.base, tuple(sorted(self.lm)), tuple(sorted(self.rm)))


def _token_label(g: NormalizedGrammar, pid: int) -> str:
    p = g.productions[pid]
    return f"{p.lhs}.{p.constructor}" if p.constructor else f"{p.lhs}#{pid}"


def mangle(g: NormalizedGrammar, key: ContextualNonterminalKey) -> str:
    """``Exp{lm|rm}`` with each side a sorted, comma-separated Sort.Ctor list."""
    lm = ",".join(_token_label(g, i) for i in sorted(key.lm))
    rm = ",".join(_token_label(g, i) for i in sorted(key.rm))
    return f"{key.base}{{{lm}|{rm}}}"


class _Rewriter:
    def __init__(self, cg: ContextualGrammar):
        self.base = cg.erase()
        self.cg = cg
        self.spines = Spines(self.base)

    def prune(self, lm, base: str, rm) -> ContextualNonterminalKey:
        # a token that can never sit on the relevant spine constrains nothing
        lm = frozenset(lm) & self.spines.productions_on("left", base)
        rm = frozenset(rm) & self.spines.productions_on("right", base)
        return ContextualNonterminalKey(lm, base, rm)

    def symbol_key(self, sym, add_lm=frozenset(), add_rm=frozenset()) -> ContextualNonterminalKey | None:
        if isinstance(sym, Contextual):
            return self.prune(sym.lm | add_lm, sym.name, sym.rm | add_rm)
        if isinstance(sym, Sort) and not sym.name.startswith('"'):
            return self.prune(add_lm, sym.name, add_rm)
        return None

    def copy_rhs(self, p: Production, key: ContextualNonterminalKey | None):
        """rhs of ``p`` under ``key`` (None: the original), plus the keys it mentions."""
        first = p.args[0] if p.args else None
        last = p.args[-1] if p.args else None
        out, keys = [], []
        for j, sym in enumerate(p.rhs):
            add_lm = key.lm if key is not None and j == first else frozenset()
            add_rm = key.rm if key is not None and j == last else frozenset()
            k = self.symbol_key(sym, add_lm, add_rm)
            if k is None or k.empty:
                out.append(Sort(sym.name) if isinstance(sym, Contextual) else sym)
            else:
                out.append(k)
                keys.append(k)
        return out, keys

    def keys(self) -> list[ContextualNonterminalKey]:
        seen: set = set()
        order: list = []
        todo: list = []
        for p in self.cg.base.productions:
            todo.extend(self.copy_rhs(p, None)[1])
        while todo:
            k = todo.pop(0)
            if k in seen:
                continue
            seen.add(k)
            order.append(k)
            for p in self.members(k):
                todo.extend(self.copy_rhs(p, k)[1])
        return order

    def members(self, key: ContextualNonterminalKey) -> list[Production]:
        excluded = key.lm | key.rm
        prods = [p for p in self.cg.base.by_lhs.get(key.base, ()) if p.id not in excluded]
        if not prods:
            raise RewriteError(f"contextual nonterminal {mangle(self.base, key)} has no productions left")
        return prods


def reachable_keys(cg: ContextualGrammar) -> set:
    return set(_Rewriter(cg).keys())


def rewrite(cg: ContextualGrammar) -> NormalizedGrammar:
    rw = _Rewriter(cg)
    g = rw.base
    keys = sorted(rw.keys(), key=ContextualNonterminalKey.sort_key)
    names = {k: mangle(g, k) for k in keys}

    def resolve(rhs):
        return tuple(Sort(names[s]) if isinstance(s, ContextualNonterminalKey) else s for s in rhs)

    prods = [p.with_(rhs=resolve(rw.copy_rhs(p, None)[0])) for p in cg.base.productions]
    copies_of: dict[tuple[str, int], int] = {}
    for k in keys:
        for p in rw.members(k):
            q = Production(len(prods), names[k], resolve(rw.copy_rhs(p, k)[0]), p.constructor, p.annotations,
                           p.lexical, p.kind, p.lineage)
            copies_of[(names[k], p.id)] = q.id
            prods.append(q)

    # copies inside one contextual nonterminal keep the priorities of their originals
    pri = set(g.priorities)
    for hi, lo in g.priorities:
        for k in keys:
            a, b = copies_of.get((names[k], hi)), copies_of.get((names[k], lo))
            if a is not None and b is not None:
                pri.add((a, b))

    return NormalizedGrammar(tuple(prods), g.start, g.start_production, frozenset(pri), g.follow_restrictions,
                             g.layout_defined, g.n_user, g.source)
