"""Seeded random sentence generation and conflict/no-conflict partitioning."""

from __future__ import annotations

import random
from pathlib import Path

from .grammar import LAYOUT_OPT, CharClass, NormalizedGrammar, Production
from .pipeline import Compiled

WITH_CONFLICTS = "with-conflicts"
WITHOUT_CONFLICTS = "without-conflicts"
PARTITIONS = (WITH_CONFLICTS, WITHOUT_CONFLICTS)

_LEXICAL_DEPTH = 6


class CorpusError(ValueError):
    pass


def _heights(g: NormalizedGrammar) -> dict[str, int]:
    """Minimal derivation height per nonterminal; terminals count as height 0."""
    inf = float("inf")
    h = {n: inf for n in g.by_lhs}
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.is_reject:
                continue
            v = 1 + max((h[s.name] for s in p.rhs if not isinstance(s, CharClass)), default=0)
            if v < h[p.lhs]:
                h[p.lhs] = v
                changed = True
    return h


class SentenceGenerator:
    def __init__(self, g: NormalizedGrammar, seed: int):
        self.g = g
        self.rng = random.Random(seed)
        self.heights = _heights(g)
        self.spellings = {}
        for p in g.productions:
            if p.is_reject:
                self.spellings.setdefault(p.lhs, set()).add(self._literal(p))

    def _literal(self, p: Production) -> str:
        out = []
        for s in p.rhs:
            if isinstance(s, CharClass):
                out.append(chr(s.ranges[0][0]))
            else:
                out.append(self._literal(self.g.by_lhs[s.name][0]))
        return "".join(out)

    def _height(self, p: Production) -> float:
        return 1 + max((self.heights[s.name] for s in p.rhs if not isinstance(s, CharClass)), default=0)

    def _choose(self, name: str, budget: int) -> Production:
        options = [p for p in self.g.by_lhs[name] if not p.is_reject]
        fitting = [p for p in options if self._height(p) <= budget]
        if not fitting:
            return min(options, key=self._height)
        # favour structure over leaves while there is depth to spend
        low = min(map(self._height, fitting))
        weights = [1 if self._height(p) == low else 3 for p in fitting]
        return self.rng.choices(fitting, weights)[0]

    def _char(self, cc: CharClass) -> str:
        ranges = [(max(lo, 0x21), min(hi, 0x7E)) for lo, hi in cc.ranges if hi >= 0x21 and lo <= 0x7E]
        if not ranges:
            return chr(cc.ranges[0][0])
        lo, hi = self.rng.choice(ranges)
        return chr(self.rng.randint(lo, hi))

    def lexeme(self, name: str) -> str:
        for _ in range(100):
            text = self._lex(name, _LEXICAL_DEPTH)
            if text not in self.spellings.get(name, ()):
                return text
        raise CorpusError(f"could not generate a non-reserved {name}")

    def _lex(self, name: str, budget: int) -> str:
        p = self._choose(name, budget)
        return "".join(self._char(s) if isinstance(s, CharClass) else self._lex(s.name, budget - 1) for s in p.rhs)

    def _emit(self, name: str, budget: int, out: list) -> None:
        prods = self.g.by_lhs[name]
        if prods[0].kind == "literal":
            out.append(self._literal(prods[0]))
            return
        if prods[0].lexical:
            out.append(self.lexeme(name))
            return
        for s in self._choose(name, budget).rhs:
            if isinstance(s, CharClass):
                out.append(self._char(s))
            elif s.name != LAYOUT_OPT:
                self._emit(s.name, budget - 1, out)

    def sentence(self, max_depth: int) -> str:
        start = self.g.start
        if self.heights[start] > max_depth:
            raise CorpusError(f"no sentence of {start} fits within depth {max_depth}")
        out: list[str] = []
        self._emit(start, max_depth, out)
        return " ".join(out)


def generate(compiled: Compiled, count: int, max_depth: int, seed: int) -> list[tuple[str, str]]:
    """``count`` (partition, sentence) pairs; partition follows the datadep parse's blocked reductions."""
    gen = SentenceGenerator(compiled.grammar, seed)
    out = []
    for _ in range(count):
        s = gen.sentence(max_depth)
        r = compiled.parse(s, "datadep")
        if not r.success:
            raise CorpusError(f"generated sentence does not parse: {s!r}")
        out.append((WITH_CONFLICTS if r.stats.blocked else WITHOUT_CONFLICTS, s))
    return out


def write_corpus(pairs, out_dir: Path) -> dict[str, int]:
    out_dir = Path(out_dir)
    counts = {p: 0 for p in PARTITIONS}
    for p in PARTITIONS:
        (out_dir / p).mkdir(parents=True, exist_ok=True)
    for i, (part, text) in enumerate(pairs):
        (out_dir / part / f"s{i:05d}.txt").write_text(text + "\n", encoding="utf-8")
        counts[part] += 1
    return counts


def read_partition(corpus_dir: Path, partition: str) -> list[tuple[str, str]]:
    d = Path(corpus_dir) / partition
    if not d.is_dir():
        return []
    return [(str(f), f.read_text(encoding="utf-8")) for f in sorted(d.iterdir()) if f.is_file()]
