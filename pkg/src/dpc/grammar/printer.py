"""Pretty printer emitting the grammar definition format."""

from __future__ import annotations

from .model import Grammar, Production


def _production_line(p: Production) -> str:
    head = f"{p.lhs}.{p.constructor}" if p.constructor else p.lhs
    line = f"{head} = {' '.join(map(str, p.rhs))}".rstrip()
    if p.annotations:
        line += " {" + ", ".join(sorted(p.annotations)) + "}"
    return line


def pretty_print(g: Grammar) -> str:
    out = [f"start symbol {g.start}", ""]
    if g.lexical_productions:
        out.append("lexical syntax")
        out.extend("  " + _production_line(p) for p in g.lexical_productions)
        out.append("")
    if g.follow_restrictions:
        out.append("lexical restrictions")
        out.extend(f"  {name} -/- {cc}" for name, cc in sorted(g.follow_restrictions.items()))
        out.append("")
    out.append("context-free syntax")
    out.extend("  " + _production_line(p) for p in g.cf_productions)
    out.append("")
    if g.priorities:
        by_id = {p.id: p for p in g.productions}
        out.append("context-free priorities")
        for hi, lo in sorted(g.priorities):
            out.append(f"  {by_id[hi].lhs}.{by_id[hi].constructor} > {by_id[lo].lhs}.{by_id[lo].constructor}")
        out.append("")
    return "\n".join(out)


def grammar_structure(g: Grammar) -> tuple:
    """Id-independent fingerprint: two grammars with equal structure are interchangeable."""

    def prods(ps):
        return tuple((p.lhs, p.constructor, tuple(map(str, p.rhs)), tuple(sorted(p.annotations))) for p in ps)

    by_id = {p.id: p for p in g.productions}
    pri = tuple(sorted((by_id[h].label, by_id[l].label) for h, l in g.priorities))
    fr = tuple(sorted((k, str(v)) for k, v in g.follow_restrictions.items()))
    return (g.start, g.layout_defined, prods(g.lexical_productions), prods(g.cf_productions), pri, fr)
