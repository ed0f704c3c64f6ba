"""SLR(1) character-level parse tables with shallow filtering in closure and constraint metadata."""

from __future__ import annotations

import bisect
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property

from .analysis import ContextualGrammar, TokenUniverse, erase, shallow_conflicts, token_universe
from .grammar import (LAYOUT_OPT, CharClass, Contextual, GrammarError, NormalizedGrammar, Sort, literal_text,
                      partition)
from .grammar.charclass import MAX_CODEPOINT

FORMAT_VERSION = 1
EOF = -1


class TableFormatError(ValueError):
    pass


# symbol roles inside a production, consulted by the parser and by implode
CHAR, LITERAL, LAYOUT_ROLE, LEXICAL, CF = "c", "l", "w", "x", "n"


@dataclass(frozen=True)
class ProductionInfo:
    id: int
    lhs: str
    constructor: str | None
    kind: str
    lexical: bool
    annotations: tuple
    roles: str  # one role code per rhs symbol
    lineage: int
    injection: bool

    @property
    def length(self) -> int:
        return len(self.roles)

    @property
    def bracket(self) -> bool:
        return "bracket" in self.annotations

    @property
    def label(self) -> str:
        return f"{self.lhs}.{self.constructor}" if self.constructor else f"{self.lhs}#{self.id}"

    def to_json(self):
        return {"id": self.id, "lhs": self.lhs, "ctor": self.constructor, "kind": self.kind, "lexical": self.lexical,
                "annotations": list(self.annotations), "roles": self.roles, "lineage": self.lineage,
                "injection": self.injection}

    @classmethod
    def from_json(cls, d):
        return cls(d["id"], d["lhs"], d["ctor"], d["kind"], d["lexical"], tuple(d["annotations"]), d["roles"],
                   d["lineage"], d["injection"])


@dataclass(frozen=True)
class Action:
    """Actions of one state on the inclusive codepoint range [lo, hi] (lo = hi = -1 is end of input)."""

    lo: int
    hi: int
    shift: int | None
    reduces: tuple
    accept: bool = False


@dataclass(frozen=True)
class ParseTable:
    grammar_hash: str
    atoms: tuple  # atom start codepoints
    actions: tuple  # per state: tuple of Action, disjoint and sorted
    gotos: tuple  # per state: tuple of (production id, state) sorted
    productions: tuple  # ProductionInfo per id
    start_production: int
    universe: tuple  # watched production ids, bit i = universe[i]
    universe_labels: tuple
    constraint_meta: tuple  # sorted (pid, rhs index, lm mask, rm mask)
    follow_meta: tuple  # sorted (pid, CharClass)
    reject_set: tuple  # ids of reject productions
    reject_spellings: tuple  # sorted (lhs, spelling)
    diagnostics: tuple = field(default=(), compare=False)

    @property
    def n_states(self) -> int:
        return len(self.actions)

    # runtime views

    @cached_property
    def atom_count(self) -> int:
        return len(self.atoms)

    def atom_of(self, cp: int) -> int:
        if cp == EOF:
            return self.atom_count
        return bisect.bisect_right(self.atoms, cp) - 1

    @cached_property
    def rows(self) -> list:
        """rows[state][atom] -> (shift state or -1, reduce ids, accept)."""
        out = []
        n = self.atom_count
        none = (-1, (), False)
        for acts in self.actions:
            row = [none] * (n + 1)
            for a in acts:
                entry = (a.shift if a.shift is not None else -1, a.reduces, a.accept)
                if a.lo == EOF:
                    row[n] = entry
                    continue
                k = self.atom_of(a.lo)
                while k < n and self.atoms[k] <= a.hi:
                    row[k] = entry
                    k += 1
            out.append(row)
        return out

    @cached_property
    def goto_maps(self) -> list:
        return [dict(g) for g in self.gotos]

    @cached_property
    def meta_by_production(self) -> dict:
        out: dict[int, list] = {}
        for pid, j, lm, rm in self.constraint_meta:
            out.setdefault(pid, []).append((j, lm, rm))
        return {pid: tuple(v) for pid, v in out.items()}

    @cached_property
    def bits(self) -> dict:
        return {pid: 1 << i for i, pid in enumerate(self.universe)}

    @cached_property
    def spellings(self) -> dict:
        out: dict[str, set] = {}
        for lhs, s in self.reject_spellings:
            out.setdefault(lhs, set()).add(s)
        return {k: frozenset(v) for k, v in out.items()}

    def sections(self) -> dict:
        """Canonical JSON text of each serialized section, for byte-level comparison."""
        doc = _to_document(self)
        return {k: json.dumps(v, sort_keys=True, separators=(",", ":")) for k, v in doc.items()}


def grammar_hash(g: NormalizedGrammar) -> str:
    text = repr((g.structure(), sorted(g.priorities), sorted((k, str(v)) for k, v in g.follow_restrictions.items())))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _roles(g: NormalizedGrammar, p) -> str:
    kinds = {q.lhs: q for q in g.productions}
    out = []
    for s in p.rhs:
        if isinstance(s, CharClass):
            out.append(CHAR)
        elif s.name == LAYOUT_OPT:
            out.append(LAYOUT_ROLE)
        elif s.name.startswith('"'):
            out.append(LITERAL)
        elif kinds[s.name].lexical:
            out.append(LEXICAL)
        else:
            out.append(CF)
    return "".join(out)


def _nullable(g: NormalizedGrammar) -> set:
    null: set = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs in null or p.is_reject:
                continue
            if all(isinstance(s, (Sort, Contextual)) and s.name in null for s in p.rhs):
                null.add(p.lhs)
                changed = True
    return null


def _check_cycles(g: NormalizedGrammar, null: set) -> None:
    """Reject hidden left recursion and cyclic derivations; ordinary GLR cannot handle them."""
    left: dict[str, set] = {}
    hidden: list[tuple[str, str, int]] = []
    unit: dict[str, set] = {}
    for p in g.productions:
        if p.is_reject:
            continue
        nts = [s.name if isinstance(s, (Sort, Contextual)) else None for s in p.rhs]
        for k, n in enumerate(nts):
            if n is None:
                break
            left.setdefault(p.lhs, set()).add(n)
            if k > 0:
                hidden.append((p.lhs, n, p.id))
            if n not in null:
                break
        for k, n in enumerate(nts):
            if n is not None and all(m is not None and m in null for i, m in enumerate(nts) if i != k):
                unit.setdefault(p.lhs, set()).add(n)

    def reaches(edges, a, b):
        seen, todo = set(), [a]
        while todo:
            n = todo.pop()
            if n == b:
                return True
            if n not in seen:
                seen.add(n)
                todo.extend(edges.get(n, ()))
        return False

    for lhs, n, pid in hidden:
        if reaches(left, n, lhs):
            raise GrammarError(f"hidden left recursion through nullable prefix in {g.label(pid)}")
    for a, outs in unit.items():
        for n in outs:
            if reaches(unit, n, a):
                raise GrammarError(f"cyclic derivation {a} =>+ {a}")


def build_table(g: NormalizedGrammar, filter: frozenset | None = None, cg: ContextualGrammar | None = None,
                universe: TokenUniverse | None = None) -> ParseTable:
    """SLR(1) table for ``g``. ``filter`` holds (parent lineage, argument, child lineage) triples."""
    if filter is None:
        filter = shallow_conflicts(g)
    if cg is not None and erase(cg.base).structure() != erase(g).structure():
        raise ValueError("contextual grammar does not match the table grammar")
    prods = g.productions
    classes = {s for p in prods for s in p.rhs if isinstance(s, CharClass)}
    classes |= set(g.follow_restrictions.values())
    atoms = partition(classes)
    n_atoms = len(atoms)
    eof_bit = 1 << n_atoms

    def mask_of(cc: CharClass) -> int:
        m = 0
        for k, lo in enumerate(atoms):
            if lo in cc:
                m |= 1 << k
        return m

    masks = {cc: mask_of(cc) for cc in classes}
    null = _nullable(g)
    _check_cycles(g, null)

    # FIRST and FOLLOW over atoms
    first: dict[str, int] = {n: 0 for n in g.by_lhs}
    changed = True
    live = [p for p in prods if not p.is_reject]
    while changed:
        changed = False
        for p in live:
            acc = first[p.lhs]
            for s in p.rhs:
                if isinstance(s, CharClass):
                    acc |= masks[s]
                    break
                acc |= first[s.name]
                if s.name not in null:
                    break
            if acc != first[p.lhs]:
                first[p.lhs] = acc
                changed = True
    follow: dict[str, int] = {n: 0 for n in g.by_lhs}
    follow[prods[g.start_production].lhs] = eof_bit
    changed = True
    while changed:
        changed = False
        for p in live:
            trailer = follow[p.lhs]
            for s in reversed(p.rhs):
                if isinstance(s, CharClass):
                    trailer = masks[s]
                    continue
                n = s.name
                if follow[n] | trailer != follow[n]:
                    follow[n] |= trailer
                    changed = True
                trailer = first[n] | trailer if n in null else first[n]

    arg_index = [{j: i for i, j in enumerate(p.arguments)} for p in prods]
    lineage = [p.lineage for p in prods]
    predict: dict[str, list[int]] = {n: [q.id for q in ps if not q.is_reject] for n, ps in g.by_lhs.items()}

    def allowed(pid: int, dot: int, qid: int) -> bool:
        a = arg_index[pid].get(dot)
        return a is None or (lineage[pid], a, lineage[qid]) not in filter

    def closure(kernel) -> frozenset:
        items = set(kernel)
        todo = list(kernel)
        while todo:
            pid, dot = todo.pop()
            rhs = prods[pid].rhs
            if dot < len(rhs) and not isinstance(rhs[dot], CharClass):
                for q in predict.get(rhs[dot].name, ()):
                    it = (q, 0)
                    if it not in items and allowed(pid, dot, q):
                        items.add(it)
                        todo.append(it)
        return frozenset(items)

    start_kernel = frozenset({(g.start_production, 0)})
    index = {start_kernel: 0}
    kernels = [start_kernel]
    state_actions: list = []
    state_gotos: list = []
    diagnostics: list = []
    restricted = {n: masks[cc] for n, cc in g.follow_restrictions.items()}

    s = 0
    while s < len(kernels):
        items = closure(kernels[s])
        shift_kernels: dict[int, set] = {}
        goto_kernels: dict[int, set] = {}
        reduce_at: dict[int, list] = {}
        accept = False
        for pid, dot in items:
            p = prods[pid]
            if dot == len(p.rhs):
                if pid == g.start_production:
                    accept = True
                    continue
                la = follow[p.lhs] & ~restricted.get(p.lhs, 0)
                reduce_at.setdefault(la, []).append(pid)
                continue
            sym = p.rhs[dot]
            if isinstance(sym, CharClass):
                m = masks[sym]
                k = 0
                while m:
                    if m & 1:
                        shift_kernels.setdefault(k, set()).add((pid, dot + 1))
                    m >>= 1
                    k += 1
        waiting: dict[str, list] = {}
        for pid, d in items:
            rhs = prods[pid].rhs
            if d < len(rhs) and not isinstance(rhs[d], CharClass):
                waiting.setdefault(rhs[d].name, []).append((pid, d))
        for q, dot in items:
            if dot != 0 or q == g.start_production:
                continue
            kern = {(pid, d + 1) for pid, d in waiting.get(prods[q].lhs, ()) if allowed(pid, d, q)}
            if kern:
                goto_kernels[q] = kern
            else:
                diagnostics.append(f"state {s}: {g.label(q)} predicted but no goto survives filtering")

        def state_of(kern) -> int:
            key = frozenset(kern)
            if key not in index:
                index[key] = len(kernels)
                kernels.append(key)
            return index[key]

        per_atom = []
        for k in range(n_atoms + 1):
            sh = state_of(shift_kernels[k]) if k in shift_kernels else None
            bit = 1 << k
            reds = tuple(sorted(pid for la, ps in reduce_at.items() if la & bit for pid in ps))
            acc = accept and k == n_atoms
            per_atom.append((sh, reds, acc))
        acts = []
        for k in range(n_atoms):
            sh, reds, acc = per_atom[k]
            if sh is None and not reds:
                continue
            lo = atoms[k]
            hi = atoms[k + 1] - 1 if k + 1 < n_atoms else MAX_CODEPOINT
            if acts and acts[-1].hi + 1 == lo and (acts[-1].shift, acts[-1].reduces) == (sh, reds):
                acts[-1] = Action(acts[-1].lo, hi, sh, reds)
            else:
                acts.append(Action(lo, hi, sh, reds))
        sh, reds, acc = per_atom[n_atoms]
        if reds or acc:
            acts.insert(0, Action(EOF, EOF, None, reds, acc))
        state_actions.append(tuple(acts))
        state_gotos.append(tuple(sorted((q, state_of(k)) for q, k in goto_kernels.items())))
        s += 1

    universe = universe or (token_universe(cg) if cg is not None else TokenUniverse(()))
    meta = []
    if cg is not None:
        for (pid, j), sym in sorted(cg.occurrences.items()):
            meta.append((pid, j, universe.mask(sym.lm), universe.mask(sym.rm)))

    infos = tuple(ProductionInfo(p.id, p.lhs, p.constructor, p.kind, p.lexical, tuple(sorted(p.annotations)),
                                 _roles(g, p), p.lineage, g.is_injection(p)) for p in prods)
    spellings = set()
    for p in prods:
        if p.is_reject:
            spellings.add((p.lhs, _spelling(g, p)))
    follow_meta = tuple((p.id, g.follow_restrictions[p.lhs]) for p in prods if p.lhs in g.follow_restrictions)
    return ParseTable(
        grammar_hash=grammar_hash(erase(g)),
        atoms=tuple(atoms),
        actions=tuple(state_actions),
        gotos=tuple(state_gotos),
        productions=infos,
        start_production=g.start_production,
        universe=universe.members,
        universe_labels=tuple(g.label(i) for i in universe.members),
        constraint_meta=tuple(meta),
        follow_meta=follow_meta,
        reject_set=tuple(p.id for p in prods if p.is_reject),
        reject_spellings=tuple(sorted(spellings)),
        diagnostics=tuple(diagnostics),
    )


def _spelling(g: NormalizedGrammar, p) -> str:
    out = []
    for s in p.rhs:
        if isinstance(s, Sort) and s.name.startswith('"'):
            out.append(literal_text(g, s.name))
        elif isinstance(s, CharClass) and len(s.ranges) == 1 and s.ranges[0][0] == s.ranges[0][1]:
            out.append(chr(s.ranges[0][0]))
        else:
            raise GrammarError(f"reject production {g.label(p.id)} is not a literal spelling")
    return "".join(out)


# serialization

def _hex(mask: int) -> str:
    return format(mask, "x")


def _to_document(t: ParseTable) -> dict:
    return {
        "grammarHash": t.grammar_hash,
        "alphabet": list(t.atoms),
        "states": t.n_states,
        "startProduction": t.start_production,
        "actions": [[{"range": [a.lo, a.hi], "shift": a.shift, "reduce": list(a.reduces), "accept": a.accept}
                     for a in acts] for acts in t.actions],
        "gotos": [[[q, s] for q, s in gs] for gs in t.gotos],
        "productions": [p.to_json() for p in t.productions],
        "universe": list(t.universe_labels),
        "universeIds": list(t.universe),
        "constraintMeta": [{"production": pid, "position": j, "lmMask": _hex(lm), "rmMask": _hex(rm)}
                           for pid, j, lm, rm in t.constraint_meta],
        "followRestrictionMeta": [[pid, [list(r) for r in cc.ranges]] for pid, cc in t.follow_meta],
        "rejectSet": list(t.reject_set),
        "rejectSpellings": [list(x) for x in t.reject_spellings],
    }


def serialize_table(t: ParseTable) -> bytes:
    body = _to_document(t)
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    doc = {"formatVersion": FORMAT_VERSION, "checksum": hashlib.sha256(canon.encode()).hexdigest(), "table": body}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def deserialize_table(data: bytes) -> ParseTable:
    try:
        doc = json.loads(data.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise TableFormatError(f"truncated or malformed table payload: {e}") from None
    if not isinstance(doc, dict) or "formatVersion" not in doc:
        raise TableFormatError("not a parse table document")
    if doc["formatVersion"] != FORMAT_VERSION:
        raise TableFormatError(f"table format version {doc['formatVersion']} is not supported (want {FORMAT_VERSION})")
    body = doc.get("table")
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"))
    if hashlib.sha256(canon.encode()).hexdigest() != doc.get("checksum"):
        raise TableFormatError("table checksum mismatch")
    try:
        return ParseTable(
            grammar_hash=body["grammarHash"],
            atoms=tuple(body["alphabet"]),
            actions=tuple(tuple(Action(a["range"][0], a["range"][1], a["shift"], tuple(a["reduce"]), a["accept"])
                                for a in acts) for acts in body["actions"]),
            gotos=tuple(tuple((q, s) for q, s in gs) for gs in body["gotos"]),
            productions=tuple(ProductionInfo.from_json(p) for p in body["productions"]),
            start_production=body["startProduction"],
            universe=tuple(body["universeIds"]),
            universe_labels=tuple(body["universe"]),
            constraint_meta=tuple((m["production"], m["position"], int(m["lmMask"], 16), int(m["rmMask"], 16))
                                  for m in body["constraintMeta"]),
            follow_meta=tuple((pid, CharClass(tuple(tuple(r) for r in rs)))
                              for pid, rs in body["followRestrictionMeta"]),
            reject_set=tuple(body["rejectSet"]),
            reject_spellings=tuple(tuple(x) for x in body["rejectSpellings"]),
        )
    except (KeyError, TypeError, IndexError) as e:
        raise TableFormatError(f"incomplete table payload: {e}") from None
