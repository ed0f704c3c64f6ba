"""Grammar text to parse tables for each disambiguation mode."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .analysis import ContextualGrammar, TokenUniverse, analyze
from .engine import DATADEP, NONE, ParseResult, parse
from .grammar import NormalizedGrammar, normalize, parse_grammar
from .rewrite import rewrite
from .tables import ParseTable, build_table, grammar_hash

TABLE_MODES = ("none", "rewrite", "datadep")

# parse-time mode for tables of each kind: rewritten grammars need no constraint checks
PARSE_MODE = {"none": NONE, "rewrite": NONE, "datadep": DATADEP}

_TABLE_CACHE: dict[tuple[str, str], ParseTable] = {}


@dataclass
class Compiled:
    grammar: NormalizedGrammar
    shallow: frozenset
    conflicts: list
    contextual: ContextualGrammar
    universe: TokenUniverse

    @cached_property
    def hash(self) -> str:
        return grammar_hash(self.grammar)

    @cached_property
    def rewritten(self) -> NormalizedGrammar:
        return rewrite(self.contextual)

    def table(self, mode: str) -> ParseTable:
        if mode not in TABLE_MODES:
            raise ValueError(f"unknown table mode {mode!r}")
        key = (self.hash, mode)
        if key not in _TABLE_CACHE:
            if mode == "none":
                t = build_table(self.grammar, self.shallow)
            elif mode == "datadep":
                t = build_table(self.grammar, self.shallow, self.contextual, self.universe)
            else:
                t = build_table(self.rewritten, self.shallow)
            _TABLE_CACHE[key] = t
        return _TABLE_CACHE[key]

    def parse(self, text: str, mode: str) -> ParseResult:
        return parse(self.table(mode), text, PARSE_MODE[mode])


def compile_grammar(text: str) -> Compiled:
    ng = normalize(parse_grammar(text))
    shallow, conflicts, cg, universe = analyze(ng)
    return Compiled(ng, shallow, conflicts, cg, universe)
