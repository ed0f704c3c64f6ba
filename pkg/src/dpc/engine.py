"""Scannerless GLR parsing over a graph-structured stack with reduce-time token constraints."""

from __future__ import annotations

from dataclasses import dataclass, field

from .tables import EOF, ParseTable

NONE = "none"
DATADEP = "datadep"
MODES = (NONE, DATADEP)

AMB = -1
CHAR = -2


class ParseNode:
    """Forest node. ``production`` is a production id or AMB; ``lm``/``rm`` are token bitsets."""

    __slots__ = ("production", "children", "start", "end", "lm", "rm")

    def __init__(self, production: int, children: list, start: int, end: int, lm: int = 0, rm: int = 0):
        self.production = production
        self.children = children
        self.start = start
        self.end = end
        self.lm = lm
        self.rm = rm

    def __repr__(self):
        return f"ParseNode({self.production}, {self.start}..{self.end})"


class CharNode:
    """Interned character leaf. Its span is implicit; start/end only mark it as non-empty."""

    __slots__ = ("char",)
    production = CHAR
    children = ()
    lm = 0
    rm = 0
    start = 0
    end = 1

    def __init__(self, char: int):
        self.char = char

    def __repr__(self):
        return f"CharNode({chr(self.char)!r})"


_LEAVES: dict[int, CharNode] = {}


def leaf(cp: int) -> CharNode:
    node = _LEAVES.get(cp)
    if node is None:
        node = _LEAVES[cp] = CharNode(cp)
    return node


class _Stack:
    __slots__ = ("state", "pos", "links", "serial")

    def __init__(self, state: int, pos: int, serial: int):
        self.state = state
        self.pos = pos
        self.links: list[_Link] = []
        self.serial = serial


class _Link:
    __slots__ = ("to", "tree")

    def __init__(self, to: _Stack, tree):
        self.to = to
        self.tree = tree


@dataclass
class ParseStats:
    nodes: int = 0
    reductions: int = 0
    blocked: int = 0
    clusters: int = 0

    def as_dict(self) -> dict:
        return {"nodes": self.nodes, "reductions": self.reductions, "blocked": self.blocked, "clusters": self.clusters}


@dataclass
class ParseResult:
    text: str
    root: ParseNode | None
    stats: ParseStats
    universe: tuple = ()  # token universe the bitsets range over (empty in mode none)
    error_offset: int | None = None
    expected: str = ""
    table: ParseTable | None = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return self.root is not None


def _describe(table: ParseTable, states) -> str:
    ranges = set()
    for s in states:
        for a in table.actions[s]:
            ranges.add((a.lo, a.hi))
    parts = []
    for lo, hi in sorted(ranges):
        if lo == EOF:
            parts.append("end of input")
        elif lo == hi:
            parts.append(repr(chr(lo)))
        else:
            parts.append(f"{chr(lo)!r}-{chr(min(hi, 0x10FFFF))!r}")
    return ", ".join(parts[:12]) + (", ..." if len(parts) > 12 else "")


class Parser:
    """One parse of one input; not reusable and not thread-safe."""

    def __init__(self, table: ParseTable, mode: str = NONE, on_block=None):
        if mode not in MODES:
            raise ValueError(f"unknown parse mode {mode!r}")
        self.table = table
        self.datadep = mode == DATADEP and bool(table.universe)
        self.rows = table.rows
        self.gotos = table.goto_maps
        self.lengths = [p.length for p in table.productions]
        # per-production lists: indexing is cheaper than dict lookups in the inner loop
        n = len(table.productions)
        self.meta = [None] * n
        self.bits = [0] * n
        # lexical subtrees hold no contextual tokens, so their nodes skip propagation
        self.carries = [False] * n
        if self.datadep:
            for pid, m in table.meta_by_production.items():
                self.meta[pid] = m
            for pid, b in table.bits.items():
                self.bits[pid] = b
            self.carries = [not p.lexical or self.bits[p.id] != 0 for p in table.productions]
        spellings = table.spellings
        rejects = set(table.reject_set)
        self.spell = [spellings.get(p.lhs) if p.id not in rejects else None for p in table.productions]
        self.stats = ParseStats()
        self.serial = 0
        # optional callback(production, rhs index, kids) for each blocked path
        self.on_block = on_block

    # GSS bookkeeping

    def _new_stack(self, state: int, pos: int) -> _Stack:
        self.serial += 1
        return _Stack(state, pos, self.serial)

    def parse(self, text: str) -> ParseResult:
        table = self.table
        atom_cache: dict[str, int] = {}
        atom_of = table.atom_of
        self.text = text
        bottom = self._new_stack(0, 0)
        self.bottom = bottom
        active = [bottom]
        n = len(text)
        for pos in range(n + 1):
            if pos < n:
                ch = text[pos]
                atom = atom_cache.get(ch)
                if atom is None:
                    atom = atom_cache[ch] = atom_of(ord(ch))
            else:
                atom = table.atom_count
            self.pos = pos
            self.atom = atom
            self.active = active
            self.by_state = {st.state: st for st in active}
            self.for_actor = list(active)
            self.pending = set(id(st) for st in active)
            self.for_shifter: list = []
            while self.for_actor:
                st = self.for_actor.pop(0)
                self.pending.discard(id(st))
                self._actor(st)
            if pos == n:
                return self._finish(text)
            nxt: dict[int, _Stack] = {}
            tree = leaf(ord(text[pos]))
            for st, target in self.for_shifter:
                st1 = nxt.get(target)
                if st1 is None:
                    st1 = nxt[target] = self._new_stack(target, pos + 1)
                st1.links.append(_Link(st, tree))
            if not nxt:
                return ParseResult(text, None, self.stats, self._universe(), pos,
                                   _describe(table, [st.state for st in active]), table)
            active = list(nxt.values())
        raise AssertionError("unreachable")

    def _universe(self) -> tuple:
        return self.table.universe if self.datadep else ()

    def _finish(self, text: str) -> ParseResult:
        start = self.table.start_production
        roots: list = []
        seen = set()
        for st in self.active:
            if not self.rows[st.state][self.atom][2]:
                continue
            for bottom, kids in self._paths(st, self.lengths[start], None):
                if bottom is not self.bottom:
                    continue
                key = tuple(map(id, kids))
                if key in seen:
                    continue
                seen.add(key)
                self.stats.reductions += 1
                roots.append(self._create(start, kids, 0, len(text)))
        if not roots:
            return ParseResult(text, None, self.stats, self._universe(), len(text),
                               _describe(self.table, [st.state for st in self.active]), self.table)
        root = roots[0]
        if len(roots) > 1:
            self.stats.clusters += 1
            # nothing constrains the root, so it alone may pack differing bitsets (stored as their union)
            lm = rm = 0
            for r in roots:
                lm |= r.lm
                rm |= r.rm
            root = ParseNode(AMB, roots, 0, len(text), lm, rm)
        return ParseResult(text, root, self.stats, self._universe(), table=self.table)

    def _actor(self, st: _Stack) -> None:
        shift, reduces, _ = self.rows[st.state][self.atom]
        if shift >= 0:
            self.for_shifter.append((st, shift))
        for pid in reduces:
            self._do_reductions(st, pid, None)

    def _paths(self, st: _Stack, length: int, through):
        """All (bottom, kids) for paths of ``length`` links from ``st``; only via ``through`` if given."""
        out = []

        def walk(node, k, kids, used):
            if k == 0:
                if through is None or used:
                    kids.reverse()
                    out.append((node, kids))
                return
            links = node.links
            for i, link in enumerate(links):
                # share the accumulator on the last branch
                acc = kids if i == len(links) - 1 else list(kids)
                acc.append(link.tree)
                walk(link.to, k - 1, acc, used or link is through)

        walk(st, length, [], False)
        return out

    def _do_reductions(self, st: _Stack, pid: int, through) -> None:
        meta = self.meta[pid]
        paths = self._paths(st, self.lengths[pid], through)
        if meta is None:
            for bottom, kids in paths:
                self._reducer(bottom, pid, kids)
            return
        for bottom, kids in paths:
            for j, lm, rm in meta:
                t = kids[j]
                if (t.lm & lm) or (t.rm & rm):
                    self.stats.blocked += 1
                    if self.on_block is not None:
                        self.on_block(pid, j, kids)
                    break
            else:
                self._reducer(bottom, pid, kids)

    def _create(self, pid: int, kids: list, start: int, end: int) -> ParseNode:
        self.stats.nodes += 1
        if not self.carries[pid]:
            return ParseNode(pid, kids, start, end)
        bit = self.bits[pid]
        return ParseNode(pid, kids, start, end, _left_tokens(kids, bit), _right_tokens(kids, bit))

    def _reducer(self, st0: _Stack, pid: int, kids: list) -> None:
        spell = self.spell[pid]
        if spell is not None and self.text[st0.pos:self.pos] in spell:
            return
        target = self.gotos[st0.state].get(pid)
        if target is None:
            return
        self.stats.reductions += 1
        self.stats.nodes += 1
        if self.carries[pid]:
            # inlined _create: edge children are almost always non-empty
            lm = rm = self.bits[pid]
            if kids:
                k = kids[0]
                if k.end > k.start:
                    lm |= k.lm
                else:
                    lm = _left_tokens(kids, lm)
                k = kids[-1]
                if k.end > k.start:
                    rm |= k.rm
                else:
                    rm = _right_tokens(kids, rm)
            t = ParseNode(pid, kids, st0.pos, self.pos, lm, rm)
        else:
            t = ParseNode(pid, kids, st0.pos, self.pos)
        st1 = self.by_state.get(target)
        if st1 is None:
            st1 = self._new_stack(target, self.pos)
            st1.links.append(_Link(st0, t))
            self.active.append(st1)
            self.by_state[target] = st1
            self.for_actor.append(st1)
            self.pending.add(id(st1))
            return
        for link in st1.links:
            if link.to is st0 and link.tree.lm == t.lm and link.tree.rm == t.rm:
                self._pack(link, t)
                return
        link = _Link(st0, t)
        st1.links.append(link)
        for st2 in self.active:
            if id(st2) in self.pending:
                continue
            for pid2 in self.rows[st2.state][self.atom][1]:
                self._do_reductions(st2, pid2, link)

    def _pack(self, link: _Link, t: ParseNode) -> None:
        old = link.tree
        if old.production != AMB:
            if old.production == t.production and _same_kids(old.children, t.children):
                return
            moved = ParseNode(old.production, old.children, old.start, old.end, old.lm, old.rm)
            old.production = AMB
            old.children = [moved, t]
            self.stats.clusters += 1
            return
        for alt in old.children:
            if alt.production == t.production and _same_kids(alt.children, t.children):
                return
        old.children.append(t)


def _left_tokens(kids, bit: int) -> int:
    """``bit`` plus the leftmost tokens of the first child with a non-empty span."""
    for k in kids:
        if k.end > k.start:
            return bit | k.lm
    return bit


def _right_tokens(kids, bit: int) -> int:
    for k in reversed(kids):
        if k.end > k.start:
            return bit | k.rm
    return bit


def _same_kids(a, b) -> bool:
    return len(a) == len(b) and all(x is y for x, y in zip(a, b))


def parse(table: ParseTable, text: str, mode: str = NONE, on_block=None) -> ParseResult:
    return Parser(table, mode, on_block).parse(text)


def count_ambiguities(root) -> int:
    """Ambiguity clusters reachable from ``root``, each shared node counted once."""
    seen = set()
    count = 0
    todo = [root]
    while todo:
        n = todo.pop()
        if n.production == CHAR or id(n) in seen:
            continue
        seen.add(id(n))
        if n.production == AMB:
            count += 1
        todo.extend(n.children)
    return count
