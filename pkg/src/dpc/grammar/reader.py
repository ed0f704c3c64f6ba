"""Reader for the line-oriented grammar definition format."""

from __future__ import annotations

import re

from .charclass import CharClass, parse_charclass
from .model import (ANNOTATIONS, ASSOC, LAYOUT, Contextual, Grammar, GrammarError, Iter, Lit,
                    Opt, Production, Sort, symbol_name)

SECTIONS = {
    "lexical syntax": "lexical",
    "lexical restrictions": "restrictions",
    "context-free syntax": "cf",
    "context-free priorities": "priorities",
}

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*(?:[+*?]*\{[^{}\s]*\})?")
_LIT_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


class _Line:
    """Cursor over one source line."""

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.lineno = lineno
        self.i = 0

    def error(self, msg: str, col: int | None = None) -> GrammarError:
        return GrammarError(msg, self.lineno, (self.i if col is None else col) + 1)

    def skip_ws(self) -> None:
        while self.i < len(self.text) and self.text[self.i] in " \t\r":
            self.i += 1
        if self.text.startswith("//", self.i):
            self.i = len(self.text)

    def at_end(self) -> bool:
        self.skip_ws()
        return self.i >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.i)

    def expect(self, s: str) -> None:
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.i += len(s)

    def name(self) -> str:
        self.skip_ws()
        m = _NAME.match(self.text, self.i)
        if not m:
            raise self.error("expected a sort name")
        self.i = m.end()
        return m.group()

    def literal(self) -> str:
        start = self.i
        self.i += 1
        out = []
        while True:
            if self.i >= len(self.text):
                raise self.error("unterminated literal", start)
            c = self.text[self.i]
            if c == '"':
                self.i += 1
                break
            if c == "\\":
                nxt = self.text[self.i + 1:self.i + 2]
                if nxt not in _LIT_ESCAPES:
                    raise self.error("bad escape in literal")
                out.append(_LIT_ESCAPES[nxt])
                self.i += 2
                continue
            out.append(c)
            self.i += 1
        if not out:
            raise self.error("empty literal", start)
        return "".join(out)

    def symbol(self):
        """One rhs symbol with postfix operators, or None at end / before annotations."""
        self.skip_ws()
        if self.i >= len(self.text):
            return None
        c = self.text[self.i]
        if c == "{":
            return None
        if c == '"':
            sym = Lit(self.literal())
        elif c == "[":
            try:
                sym, self.i = parse_charclass(self.text, self.i)
            except ValueError as e:
                raise self.error(str(e)) from None
        elif _NAME.match(self.text, self.i):
            sym = Sort(self.name())
        else:
            raise self.error(f"unexpected character {c!r}")
        while self.i < len(self.text) and self.text[self.i] in "+*?":
            op = self.text[self.i]
            sym = Opt(sym) if op == "?" else Iter(sym, op)
            self.i += 1
        return sym

    def annotations(self) -> frozenset:
        if not self.peek("{"):
            return frozenset()
        self.i += 1
        end = self.text.find("}", self.i)
        if end < 0:
            raise self.error("unterminated annotation block")
        words = [w.strip() for w in self.text[self.i:end].split(",")]
        for w in words:
            if w not in ANNOTATIONS:
                raise self.error(f"unknown annotation {w!r}")
        self.i = end + 1
        if not self.at_end():
            raise self.error("trailing text after annotations")
        return frozenset(words)


def parse_grammar(text: str) -> Grammar:
    """Parse grammar-definition text into a :class:`Grammar`.

    Production ids are dense and follow file order across sections.
    """
    section = None
    start = None
    start_line = 0
    lexical: list[Production] = []
    cf: list[Production] = []
    raw_priorities: list[tuple[str, str, str, str, int]] = []
    restrictions: dict[str, CharClass] = {}
    seen: dict[tuple[str, str], int] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _Line(raw, lineno)
        if line.at_end():
            continue
        words = " ".join(raw.split("//", 1)[0].split())
        if words.startswith("start symbol"):
            parts = words.split()
            if len(parts) != 3:
                raise GrammarError("expected 'start symbol <Sort>'", lineno, 1)
            start, start_line = parts[2], lineno
            continue
        if words in SECTIONS:
            section = SECTIONS[words]
            continue
        if section is None:
            raise GrammarError(f"unknown section keyword {words!r}", lineno, 1)

        if section == "priorities":
            hi_sort = line.name()
            line.expect(".")
            hi_ctor = line.name()
            line.expect(">")
            lo_sort = line.name()
            line.expect(".")
            lo_ctor = line.name()
            if not line.at_end():
                raise line.error("trailing text after priority")
            raw_priorities.append((hi_sort, hi_ctor, lo_sort, lo_ctor, lineno))
            continue

        if section == "restrictions":
            sym = line.symbol()
            if sym is None or isinstance(sym, CharClass):
                raise line.error("expected a symbol before '-/-'")
            line.expect("-/-")
            line.skip_ws()
            if not line.peek("["):
                raise line.error("expected a character class after '-/-'")
            cc = line.symbol()
            if not line.at_end():
                raise line.error("trailing text after follow restriction")
            key = symbol_name(sym)
            restrictions[key] = restrictions[key].union(cc) if key in restrictions else cc
            continue

        col = line.i
        lhs_sym = line.symbol()
        if not isinstance(lhs_sym, (Sort, Iter, Opt)):
            raise line.error("expected a sort on the left-hand side", col)
        lhs = symbol_name(lhs_sym)
        ctor = None
        if line.peek("."):
            line.i += 1
            ctor = line.name()
        line.expect("=")
        rhs = []
        while (sym := line.symbol()) is not None:
            rhs.append(sym)
        annos = line.annotations()
        if not line.at_end():
            raise line.error("unexpected text")
        if len(annos & ASSOC) > 1:
            raise line.error("at most one of left/right/non-assoc")
        if "bracket" in annos:
            nts = [s for s in rhs if isinstance(s, (Sort, Contextual))]
            if ctor is not None or len(nts) != 1:
                raise line.error("bracket production needs no constructor and exactly one sort")
        if ctor is not None:
            if (lhs, ctor) in seen:
                raise GrammarError(f"duplicate production {lhs}.{ctor}", lineno, col + 1)
            seen[(lhs, ctor)] = lineno
        pid = len(lexical) + len(cf)
        prod = Production(pid, lhs, tuple(rhs), ctor, annos, lexical=(section == "lexical"))
        (lexical if section == "lexical" else cf).append(prod)

    if not lexical and not cf and start is None:
        raise GrammarError("empty grammar")
    if start is None:
        start = cf[0].lhs if cf else lexical[0].lhs
    all_prods = lexical + cf
    defined = {p.lhs for p in all_prods}
    if start not in defined:
        raise GrammarError("start symbol has no productions", start_line or None, 1 if start_line else None)
    for p in all_prods:
        for s in p.rhs:
            _check_defined(s, defined, p)

    by_name = {(p.lhs, p.constructor): p.id for p in cf if p.constructor}
    pairs = set()
    for hs, hc, ls, lc, lineno in raw_priorities:
        try:
            pairs.add((by_name[(hs, hc)], by_name[(ls, lc)]))
        except KeyError as e:
            raise GrammarError(f"priority references unknown production {e.args[0][0]}.{e.args[0][1]}", lineno, 1) from None

    return Grammar(tuple(lexical), tuple(cf), frozenset(pairs), restrictions, start,
                   any(p.lhs == LAYOUT for p in lexical))


def _check_defined(sym, defined: set, prod: Production) -> None:
    if isinstance(sym, Sort):
        if sym.name not in defined:
            raise GrammarError(f"undefined sort {sym.name} in {prod.label}")
    elif isinstance(sym, (Iter, Opt)):
        inner = sym.symbol
        # explicitly defined list/optional nonterminals need no element definition
        if symbol_name(sym) not in defined:
            _check_defined(inner, defined, prod)
