"""Grammar data model: symbols, productions, grammars."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Union

from .charclass import CharClass

LAYOUT = "LAYOUT"
LAYOUT_OPT = "LAYOUT?"
START = "<START>"

ANNOTATIONS = frozenset({"left", "right", "non-assoc", "bracket", "reject"})
ASSOC = frozenset({"left", "right", "non-assoc"})


class GrammarError(Exception):
    """Invalid grammar text or structure. ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True, order=True)
class Sort:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Lit:
    text: str

    def __post_init__(self):
        if not self.text:
            raise GrammarError("empty literal")

    def __str__(self):
        return '"' + self.text.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True, order=True)
class Iter:
    """``X+`` (op '+') or ``X*`` (op '*')."""

    symbol: "Symbol"
    op: str

    def __str__(self):
        return f"{self.symbol}{self.op}"


@dataclass(frozen=True, order=True)
class Opt:
    symbol: "Symbol"

    def __str__(self):
        return f"{self.symbol}?"


@dataclass(frozen=True, order=True)
class Contextual:
    """Nonterminal ``name`` whose leftmost/rightmost spines must avoid ``lm``/``rm``."""

    name: str
    lm: frozenset = frozenset()
    rm: frozenset = frozenset()

    def __post_init__(self):
        if not (self.lm or self.rm):
            raise ValueError("contextual symbol needs a non-empty lm or rm set")

    def __str__(self):
        return f"{self.name}{{{sorted(self.lm)}|{sorted(self.rm)}}}"


Symbol = Union[Sort, Lit, CharClass, Iter, Opt, Contextual]


def symbol_name(sym: Symbol) -> str:
    """Canonical nonterminal name for a symbol that normalizes into its own nonterminal."""
    if isinstance(sym, (Sort, Contextual)):
        return sym.name
    return str(sym)


def base_name(name: str) -> str:
    """Strip a mangled contextual suffix: ``Exp{|Exp.If}`` -> ``Exp``."""
    i = name.find("{")
    return name if i < 0 else name[:i]


@dataclass(frozen=True)
class Production:
    id: int
    lhs: str
    rhs: tuple
    constructor: str | None = None
    annotations: frozenset = frozenset()
    lexical: bool = False
    # user | literal | list | opt | layout | start
    kind: str = "user"
    # id of the production this one was copied from (itself for originals)
    lineage: int = -1

    def __post_init__(self):
        if self.lineage < 0:
            object.__setattr__(self, "lineage", self.id)

    @property
    def label(self) -> str:
        return f"{self.lhs}.{self.constructor}" if self.constructor else f"{self.lhs} = {' '.join(map(str, self.rhs))}"

    @property
    def is_bracket(self) -> bool:
        return "bracket" in self.annotations

    @property
    def is_reject(self) -> bool:
        return "reject" in self.annotations

    @property
    def assoc(self) -> str | None:
        found = self.annotations & ASSOC
        return next(iter(found)) if found else None

    @cached_property
    def args(self) -> tuple[int, ...]:
        """Indices into ``rhs`` of the non-layout symbols (argument positions)."""
        return tuple(i for i, s in enumerate(self.rhs) if not (isinstance(s, Sort) and s.name == LAYOUT_OPT))

    @cached_property
    def arguments(self) -> tuple[int, ...]:
        """Indices into ``rhs`` of nonterminal arguments: no layout, literals or characters."""
        return tuple(i for i in self.args
                     if isinstance(self.rhs[i], (Sort, Contextual)) and not self.rhs[i].name.startswith('"'))

    def with_(self, **kw) -> Production:
        return replace(self, **kw)


@dataclass(frozen=True)
class Grammar:
    lexical_productions: tuple
    cf_productions: tuple
    priorities: frozenset
    follow_restrictions: dict
    start: str
    layout_defined: bool

    @cached_property
    def productions(self) -> tuple:
        return tuple(sorted(self.lexical_productions + self.cf_productions, key=lambda p: p.id))

    def find(self, lhs: str, constructor: str) -> Production:
        for p in self.productions:
            if p.lhs == lhs and p.constructor == constructor:
                return p
        raise KeyError(f"{lhs}.{constructor}")


@dataclass(frozen=True)
class NormalizedGrammar:
    """Flat production list (index == id) over character classes and nonterminal names.

    Every rhs symbol is a ``CharClass``, a ``Sort`` naming a nonterminal, or (inside a
    contextual grammar) a ``Contextual``.
    """

    productions: tuple
    start: str
    start_production: int
    priorities: frozenset
    follow_restrictions: dict
    layout_defined: bool
    n_user: int
    source: Grammar | None = field(default=None, compare=False)

    @cached_property
    def by_lhs(self) -> dict:
        out: dict[str, list[Production]] = {}
        for p in self.productions:
            out.setdefault(p.lhs, []).append(p)
        return out

    @cached_property
    def nonterminals(self) -> tuple:
        return tuple(self.by_lhs)

    @cached_property
    def lexical_sorts(self) -> frozenset:
        return frozenset(p.lhs for p in self.productions if p.lexical)

    def label(self, pid: int) -> str:
        return self.productions[pid].label

    def find(self, lhs: str, constructor: str) -> Production:
        for p in self.productions:
            if p.lhs == lhs and p.constructor == constructor:
                return p
        raise KeyError(f"{lhs}.{constructor}")

    def is_injection(self, p: Production) -> bool:
        """Single nonterminal argument, no constructor, not derived machinery."""
        if p.constructor or p.kind != "user" or p.is_bracket or len(p.args) != 1:
            return False
        return isinstance(p.rhs[p.args[0]], (Sort, Contextual))

    def structure(self) -> tuple:
        """Id-free structural fingerprint used by equality checks in tests."""
        return tuple(sorted((p.lhs, p.constructor or "", tuple(map(str, p.rhs)), tuple(sorted(p.annotations)), p.kind)
                            for p in self.productions))
