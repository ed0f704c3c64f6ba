"""Grammar definitions: reading, printing, normalizing, classifying."""

from .charclass import CharClass, parse_charclass, partition
from .model import (LAYOUT, LAYOUT_OPT, START, Contextual, Grammar, GrammarError, Iter, Lit, NormalizedGrammar, Opt,
                    Production, Sort, base_name, symbol_name)
from .normalize import denormalize, literal_text, normalize
from .printer import grammar_structure, pretty_print
from .priorities import PriorityCycleError, priority_closure
from .reader import parse_grammar
from .shapes import OperatorShape, Spines, classify_production, edge_symbols

__all__ = [
    "CharClass", "parse_charclass", "partition", "LAYOUT", "LAYOUT_OPT", "START", "Contextual", "Grammar",
    "GrammarError", "Iter", "Lit", "NormalizedGrammar", "Opt", "Production", "Sort", "base_name", "symbol_name",
    "denormalize", "literal_text", "normalize", "grammar_structure", "pretty_print", "PriorityCycleError",
    "priority_closure", "parse_grammar", "OperatorShape", "Spines", "classify_production", "edge_symbols",
]
