"""Shallow and deep priority-conflict detection, contextual grammars, token universes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .grammar import Contextual, NormalizedGrammar, Production, Sort, Spines, base_name
from .grammar.shapes import _injects_to, _nt

OPERATOR_STYLE = "operator-style"
DANGLING_ELSE = "dangling-else"
LONGEST_MATCH = "longest-match"
_CLASS_ORDER = {OPERATOR_STYLE: 0, DANGLING_ELSE: 1, LONGEST_MATCH: 2}

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"


@dataclass(frozen=True)
class DeepConflict:
    kind: str
    production: int
    arg: int  # index among the production's nonterminal arguments
    side: str
    forbidden: frozenset

    def sort_key(self):
        return (_CLASS_ORDER[self.kind], self.production, self.arg, self.side, tuple(sorted(self.forbidden)))


def _operators(g: NormalizedGrammar) -> list[Production]:
    """Context-free user productions that take part in disambiguation."""
    return [p for p in g.productions if p.kind == "user" and not p.lexical and not p.is_bracket and not p.is_reject]


def _edge_args(p: Production) -> tuple[int | None, int | None]:
    """Argument indices of the leftmost/rightmost symbols, None where that symbol is a terminal."""
    if not p.arguments:
        return None, None
    first = 0 if p.arguments[0] == p.args[0] else None
    last = len(p.arguments) - 1 if p.arguments[-1] == p.args[-1] else None
    return first, last


def _arg_of(p: Production, rhs_index: int) -> int:
    return p.arguments.index(rhs_index)


def _reaches(g: NormalizedGrammar, p: Production, arg: int | None, target: str) -> bool:
    if arg is None:
        return False
    n = _nt(p.rhs[p.arguments[arg]])
    return n is not None and _injects_to(g, n, target)


def shallow_conflicts(g: NormalizedGrammar) -> frozenset:
    """(parent, arg, child) triples forbidden as direct parent/child combinations.

    A priority ``p > q`` forbids ``q`` at an edge argument of ``p`` only where the
    combination is ambiguous: at the leftmost argument when ``q`` is open to the right,
    at the rightmost argument when ``q`` is open to the left.
    """
    spines = Spines(g)
    ops = {p.id: p for p in _operators(g)}
    out = set()
    for hi, lo in g.priorities:
        p, q = ops.get(hi), ops.get(lo)
        if p is None or q is None or p.lhs != q.lhs:
            continue
        first, last = _edge_args(p)
        if _reaches(g, p, first, q.lhs) and spines.open_side(q, "right"):
            out.add((p.id, first, q.id))
        if _reaches(g, p, last, q.lhs) and spines.open_side(q, "left"):
            out.add((p.id, last, q.id))
    for p in ops.values():
        first, last = _edge_args(p)
        if first == last:
            continue
        assoc = p.assoc
        if assoc in ("left", "non-assoc") and _reaches(g, p, last, p.lhs):
            out.add((p.id, last, p.id))
        if assoc in ("right", "non-assoc") and _reaches(g, p, first, p.lhs):
            out.add((p.id, first, p.id))
    return frozenset(out)


def _arg_symbols(p: Production) -> tuple:
    return tuple(str(p.rhs[i]) for i in p.args)


def detect_deep_conflicts(g: NormalizedGrammar) -> list[DeepConflict]:
    spines = Spines(g)
    ops = _operators(g)
    by_id = {p.id: p for p in ops}
    found: list[DeepConflict] = []

    # arg indices below count nonterminal arguments only (see Production.arguments)
    # operator-style: a lower-priority operator open on one side only, hidden on the
    # facing spine of an argument of a higher-priority operator
    for hi, lo in g.priorities:
        p, q = by_id.get(hi), by_id.get(lo)
        if p is None or q is None or p.lhs != q.lhs or p.id == q.id:
            continue
        q_left, q_right = spines.open_side(q, "left"), spines.open_side(q, "right")
        first, last = _edge_args(p)
        if q_right and not q_left and spines.open_side(p, "left") and first is not None:
            found.append(DeepConflict(OPERATOR_STYLE, p.id, first, RIGHTMOST, frozenset({q.id})))
        if q_left and not q_right and spines.open_side(p, "right") and last is not None:
            found.append(DeepConflict(OPERATOR_STYLE, p.id, last, LEFTMOST, frozenset({q.id})))

    # dangling-else: a recursive short form sharing a prefix (suffix) with a longer form
    for s in ops:
        ss = _arg_symbols(s)
        for l in ops:
            if l.id == s.id or l.lhs != s.lhs:
                continue
            ls = _arg_symbols(l)
            if len(ss) >= len(ls) or not ss:
                continue
            if ls[:len(ss)] == ss and spines.open_side(s, "right"):
                site = _arg_of(l, l.args[len(ss) - 1])
                found.append(DeepConflict(DANGLING_ELSE, l.id, site, RIGHTMOST, frozenset({s.id})))
            if ls[len(ls) - len(ss):] == ss and spines.open_side(s, "left"):
                site = _arg_of(l, l.args[len(ls) - len(ss)])
                found.append(DeepConflict(DANGLING_ELSE, l.id, site, LEFTMOST, frozenset({s.id})))

    # longest-match: a construct ending in a list may end a non-final element of that list
    ending: dict[str, set[int]] = {}
    for m in ops:
        if m.args:
            last = _nt(m.rhs[m.args[-1]])
            if last is not None and g.by_lhs.get(last) and g.by_lhs[last][0].kind == "list":
                ending.setdefault(_plus_name(last), set()).add(m.id)
    for plus, users in sorted(ending.items()):
        cons = _cons(g, plus)
        if cons is None:
            continue
        elem = _nt(cons.rhs[cons.arguments[-1]])
        on_spine = spines.productions_on("right", elem) if elem else frozenset()
        if users & on_spine:
            found.append(DeepConflict(LONGEST_MATCH, cons.id, 0, RIGHTMOST, frozenset(users)))

    cleaned = []
    for c in found:
        forbidden = c.forbidden - {c.production}
        if forbidden:
            cleaned.append(DeepConflict(c.kind, c.production, c.arg, c.side, frozenset(forbidden)))
    return sorted(set(cleaned), key=DeepConflict.sort_key)


def _plus_name(list_name: str) -> str:
    b = base_name(list_name)
    return b[:-1] + "+" if b.endswith("*") else b


def _cons(g: NormalizedGrammar, plus: str) -> Production | None:
    for p in g.by_lhs.get(plus, ()):
        if p.constructor == "Cons":
            return p
    return None


@dataclass(frozen=True)
class ContextualGrammar:
    base: NormalizedGrammar
    conflicts: tuple

    def erase(self) -> NormalizedGrammar:
        return erase(self.base)

    @cached_property
    def occurrences(self) -> dict:
        """{(production id, rhs index): Contextual}."""
        out = {}
        for p in self.base.productions:
            for j, sym in enumerate(p.rhs):
                if isinstance(sym, Contextual):
                    out[(p.id, j)] = sym
        return out


def erase(g: NormalizedGrammar) -> NormalizedGrammar:
    prods = tuple(p.with_(rhs=tuple(Sort(s.name) if isinstance(s, Contextual) else s for s in p.rhs)) for p in g.productions)
    return NormalizedGrammar(prods, g.start, g.start_production, g.priorities, g.follow_restrictions,
                             g.layout_defined, g.n_user, g.source)


def derive_contextual_grammar(g: NormalizedGrammar, conflicts) -> ContextualGrammar:
    sets: dict[tuple[int, int], tuple[set, set]] = {}
    for c in conflicts:
        lm, rm = sets.setdefault((c.production, c.arg), (set(), set()))
        (lm if c.side == LEFTMOST else rm).update(c.forbidden)
    prods = list(g.productions)
    for (pid, arg), (lm, rm) in sets.items():
        p = prods[pid]
        j = p.arguments[arg]
        sym = p.rhs[j]
        rhs = list(p.rhs)
        rhs[j] = Contextual(sym.name, frozenset(lm), frozenset(rm))
        prods[pid] = p.with_(rhs=tuple(rhs))
    base = NormalizedGrammar(tuple(prods), g.start, g.start_production, g.priorities, g.follow_restrictions,
                             g.layout_defined, g.n_user, g.source)
    return ContextualGrammar(base, tuple(conflicts))


@dataclass(frozen=True)
class TokenUniverse:
    members: tuple

    @cached_property
    def bit_index(self) -> dict:
        return {pid: i for i, pid in enumerate(self.members)}

    def __len__(self):
        return len(self.members)

    def mask(self, ids) -> int:
        m = 0
        for pid in ids:
            if pid in self.bit_index:
                m |= 1 << self.bit_index[pid]
        return m

    def bit(self, pid: int) -> int:
        i = self.bit_index.get(pid)
        return 0 if i is None else 1 << i

    def ids(self, mask: int) -> frozenset:
        return frozenset(pid for pid, i in self.bit_index.items() if mask >> i & 1)


def token_universe(cg: ContextualGrammar) -> TokenUniverse:
    ids = set()
    for sym in cg.occurrences.values():
        ids |= sym.lm | sym.rm
    return TokenUniverse(tuple(sorted(ids)))


def analyze(g: NormalizedGrammar):
    """Shallow filter, deep conflicts, contextual grammar and universe in one go."""
    conflicts = detect_deep_conflicts(g)
    cg = derive_contextual_grammar(g, conflicts)
    return shallow_conflicts(g), conflicts, cg, token_universe(cg)
