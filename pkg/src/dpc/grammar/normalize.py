"""Normalization: literal expansion, list/optional derivation, layout insertion, augmented start."""

from __future__ import annotations

from .charclass import CharClass
from .model import (LAYOUT, LAYOUT_OPT, START, Contextual, Grammar, GrammarError, Iter, Lit, NormalizedGrammar,
                    Opt, Production, Sort, base_name, symbol_name)
from .priorities import priority_closure

_L = Sort(LAYOUT_OPT)


def _kind_of_name(name: str) -> str:
    b = base_name(name)
    if b.endswith(("+", "*")):
        return "list"
    if b.endswith("?"):
        return "opt"
    return "user"


def normalize(g: Grammar) -> NormalizedGrammar:
    prods: list[Production] = []
    explicit = {p.lhs for p in g.productions}
    requested: dict[str, tuple[object, bool]] = {}
    queue: list[str] = []

    def request(sym, lexical: bool) -> Sort:
        name = symbol_name(sym)
        if name in explicit:
            return Sort(name)
        if name in requested:
            prev_lex = requested[name][1]
            if prev_lex != lexical and not isinstance(sym, Lit):
                raise GrammarError(f"{name} is used in both lexical and context-free syntax")
        else:
            requested[name] = (sym, lexical)
            queue.append(name)
        return Sort(name)

    def norm(sym, lexical: bool):
        if isinstance(sym, (CharClass, Sort, Contextual)):
            return sym
        return request(sym, lexical)

    def layout_rhs(symbols, lexical: bool) -> tuple:
        if lexical or not g.layout_defined or not symbols:
            return tuple(symbols)
        out = [symbols[0]]
        for s in symbols[1:]:
            out.extend((_L, s))
        return tuple(out)

    for p in g.productions:
        rhs = [norm(s, p.lexical) for s in p.rhs]
        prods.append(p.with_(rhs=layout_rhs(rhs, p.lexical), kind=_kind_of_name(p.lhs)))
    n_user = len(prods)

    def add(lhs, rhs, ctor, lexical, kind):
        prods.append(Production(len(prods), lhs, tuple(rhs), ctor, frozenset(), lexical, kind))

    while queue:
        name = queue.pop(0)
        sym, lexical = requested[name]
        if isinstance(sym, Lit):
            add(name, [CharClass.single(ord(c)) for c in sym.text], None, True, "literal")
        elif isinstance(sym, Iter) and sym.op == "+":
            elem = norm(sym.symbol, lexical)
            add(name, layout_rhs([Sort(name), elem], lexical), "Cons", lexical, "list")
            add(name, [elem], "Single", lexical, "list")
        elif isinstance(sym, Iter):
            plus = request(Iter(sym.symbol, "+"), lexical)
            add(name, [plus], "Items", lexical, "list")
            add(name, [], "Empty", lexical, "list")
        else:
            add(name, [norm(sym.symbol, lexical)], "Some", lexical, "opt")
            add(name, [], "None", lexical, "opt")

    if g.layout_defined:
        add(LAYOUT_OPT, [Sort(LAYOUT)], "Present", True, "layout")
        add(LAYOUT_OPT, [], "Empty", True, "layout")
        start_rhs = [_L, Sort(g.start), _L]
    else:
        start_rhs = [Sort(g.start)]
    add(START, start_rhs, None, False, "start")

    return NormalizedGrammar(
        productions=tuple(prods),
        start=g.start,
        start_production=len(prods) - 1,
        priorities=priority_closure(g.priorities),
        follow_restrictions=dict(g.follow_restrictions),
        layout_defined=g.layout_defined,
        n_user=n_user,
        source=g,
    )


def literal_text(ng: NormalizedGrammar, name: str) -> str:
    (p,) = ng.by_lhs[name]
    return "".join(chr(cc.ranges[0][0]) for cc in p.rhs)


def denormalize(ng: NormalizedGrammar) -> Grammar:
    """Back to surface form; derived list/optional productions stay explicit.

    Contextual symbols must already be gone (see ``rewrite``).
    """
    lex, cf = [], []
    kinds = {p.lhs: p.kind for p in ng.productions}

    def surface(sym):
        if isinstance(sym, Contextual):
            raise ValueError("contextual symbols cannot be printed; rewrite them first")
        if isinstance(sym, Sort) and kinds.get(sym.name) == "literal":
            return Lit(literal_text(ng, sym.name))
        return sym

    for p in ng.productions:
        if p.kind in ("literal", "layout", "start"):
            continue
        rhs = tuple(surface(s) for s in p.rhs if s != _L)
        q = Production(len(lex) + len(cf), p.lhs, rhs, p.constructor, p.annotations, p.lexical)
        (lex if p.lexical else cf).append(q)

    # ids: lexical first, then context-free (file order of the printer)
    lex = [q.with_(id=i, lineage=i) for i, q in enumerate(lex)]
    cf = [q.with_(id=len(lex) + i, lineage=len(lex) + i) for i, q in enumerate(cf)]

    key = {}
    for p in ng.productions:
        if p.constructor and p.kind == "user":
            key[p.id] = (p.lhs, p.constructor)
    new_id = {(q.lhs, q.constructor): q.id for q in cf if q.constructor}
    pri = set()
    for hi, lo in ng.priorities:
        if hi in key and lo in key and key[hi] in new_id and key[lo] in new_id:
            pri.add((new_id[key[hi]], new_id[key[lo]]))
    return Grammar(tuple(lex), tuple(cf), frozenset(pri), dict(ng.follow_restrictions), ng.start, ng.layout_defined)
