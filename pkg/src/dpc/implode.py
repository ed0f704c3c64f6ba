"""Forest to abstract syntax: constructors, lists, lexemes and explicit ambiguities."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .engine import AMB, CHAR, ParseResult
from .tables import CF, LEXICAL, ParseTable


@dataclass(frozen=True)
class Term:
    constructor: str
    args: tuple

    def __str__(self):
        return to_sexpr(self)


@dataclass(frozen=True)
class Lst:
    items: tuple

    def __str__(self):
        return to_sexpr(self)


@dataclass(frozen=True)
class Amb:
    """Alternatives kept sorted by their printed form, duplicates removed."""

    alternatives: tuple

    def __str__(self):
        return to_sexpr(self)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_sexpr(ast) -> str:
    if isinstance(ast, str):
        return _quote(ast)
    if isinstance(ast, Term):
        if not ast.args:
            return f"({ast.constructor})"
        return f"({ast.constructor} {' '.join(map(to_sexpr, ast.args))})"
    if isinstance(ast, Lst):
        return "[" + " ".join(map(to_sexpr, ast.items)) + "]"
    return "(amb " + " ".join(map(to_sexpr, ast.alternatives)) + ")"


def make_amb(alts) -> object:
    """Flatten nested ambiguities, dedupe and sort; a single survivor is returned as is."""
    flat = {}
    for a in alts:
        for x in (a.alternatives if isinstance(a, Amb) else (a,)):
            flat.setdefault(to_sexpr(x), x)
    if len(flat) == 1:
        return next(iter(flat.values()))
    return Amb(tuple(flat[k] for k in sorted(flat)))


class Imploder:
    def __init__(self, table: ParseTable, text: str):
        self.prods = table.productions
        self.text = text
        self.memo: dict[int, object] = {}

    def lexeme(self, node) -> str:
        return self.text[node.start:node.end]

    def __call__(self, node):
        key = id(node)
        if key in self.memo:
            return self.memo[key]
        out = self._implode(node)
        self.memo[key] = out
        return out

    def _implode(self, node):
        if node.production == AMB:
            return make_amb(self(a) for a in node.children)
        p = self.prods[node.production]
        if p.lexical:
            return self.lexeme(node)
        args = []
        for role, child in zip(p.roles, node.children):
            if role == CF:
                args.append(self(child))
            elif role == LEXICAL:
                args.append(self.lexeme(child))
        if p.kind == "start" or p.bracket or p.injection:
            return args[0]
        if p.kind == "list":
            return self._list(p.constructor, args)
        return Term(p.constructor or p.lhs, tuple(args))

    def _list(self, ctor: str, args):
        if ctor == "Empty":
            return Lst(())
        if ctor == "Single":
            return Lst((args[0],))
        if ctor == "Items":
            return args[0]
        head, elem = args
        if isinstance(head, Amb):
            return make_amb(Lst(h.items + (elem,)) for h in head.alternatives)
        return Lst(head.items + (elem,))


def implode(result: ParseResult):
    if result.root is None:
        raise ValueError("cannot implode a failed parse")
    return Imploder(result.table, result.text)(result.root)


def expand(ast) -> list:
    """Every ambiguity-free AST represented by ``ast``, sorted by printed form."""
    out = {to_sexpr(t): t for t in _expand(ast)}
    return [out[k] for k in sorted(out)]


def _expand(ast):
    if isinstance(ast, str):
        yield ast
    elif isinstance(ast, Amb):
        for a in ast.alternatives:
            yield from _expand(a)
    elif isinstance(ast, Term):
        for combo in itertools.product(*(list(_expand(a)) for a in ast.args)):
            yield Term(ast.constructor, combo)
    else:
        for combo in itertools.product(*(list(_expand(a)) for a in ast.items)):
            yield Lst(combo)


def forest_dump(result: ParseResult) -> str:
    """Indented forest with production ids, spans and hex bitsets; shared nodes are printed once."""
    prods = result.table.productions
    lines: list[str] = []
    seen: dict[int, int] = {}

    def walk(node, depth):
        pad = "  " * depth
        if node.production == CHAR:
            lines.append(f"{pad}{chr(node.char)!r}")
            return
        if id(node) in seen:
            lines.append(f"{pad}^{seen[id(node)]}")
            return
        seen[id(node)] = len(seen)
        name = "amb" if node.production == AMB else f"{node.production} {prods[node.production].label}"
        lines.append(f"{pad}#{seen[id(node)]} {name} [{node.start},{node.end}) lm={node.lm:x} rm={node.rm:x}")
        for c in node.children:
            walk(c, depth + 1)

    walk(result.root, 0)
    return "\n".join(lines)
