import pytest

from dpc import fixtures
from dpc.analysis import (DANGLING_ELSE, LEFTMOST, LONGEST_MATCH, OPERATOR_STYLE, RIGHTMOST, DeepConflict, analyze,
                          derive_contextual_grammar, detect_deep_conflicts, erase, shallow_conflicts, token_universe)
from dpc.grammar import Contextual, normalize, parse_grammar


def _ng(name_or_text):
    text = fixtures.text(name_or_text) if name_or_text in fixtures.NAMES else name_or_text
    return normalize(parse_grammar(text))


def _labels(g, entries):
    return sorted((g.label(p), i, g.label(q)) for p, i, q in entries)


def _conflicts(g):
    return [(c.kind, g.label(c.production), c.arg, c.side, sorted(g.label(x) for x in c.forbidden))
            for c in detect_deep_conflicts(g)]


POSTFIX = """start symbol E
lexical syntax
  N = [0-9]+
context-free syntax
  E.Add = E "+" E {left}
  E.Pow = E "^" E {right}
  E.Fact = E "!"
  E.Num = N
context-free priorities
  E.Add > E.Fact
"""


# shallow filter

def test_listing1a_shallow_filter():
    # (Add, 1, If) is absent: an if as the right operand is the preferred reading
    g = _ng("listing1a")
    assert _labels(g, shallow_conflicts(g)) == [("Exp.Add", 0, "Exp.If"), ("Exp.Add", 1, "Exp.Add")]


def test_no_priorities_no_filter():
    assert shallow_conflicts(_ng("listing1b")) == frozenset()


def test_right_assoc_and_postfix_filters():
    g = _ng(POSTFIX)
    assert _labels(g, shallow_conflicts(g)) == [("E.Add", 1, "E.Add"), ("E.Add", 1, "E.Fact"),
                                               ("E.Pow", 0, "E.Pow")]


def test_brackets_never_filtered():
    g = _ng("mini-ml")
    brackets = {p.id for p in g.productions if p.is_bracket}
    assert brackets
    assert all(p not in brackets and q not in brackets for p, _, q in shallow_conflicts(g))


def test_arith_has_shallow_but_no_deep_conflicts():
    g = _ng("arith")
    assert shallow_conflicts(g)
    assert detect_deep_conflicts(g) == []


# deep conflicts

def test_operator_style_listing1a():
    g = _ng("listing1a")
    assert _conflicts(g) == [(OPERATOR_STYLE, "Exp.Add", 0, RIGHTMOST, ["Exp.If"])]


def test_operator_style_postfix_mirror():
    g = _ng(POSTFIX)
    assert _conflicts(g) == [(OPERATOR_STYLE, "E.Add", 1, LEFTMOST, ["E.Fact"])]


def test_dangling_else_listing1b():
    # argument 1 of IfElse is the then-branch
    g = _ng("listing1b")
    assert _conflicts(g) == [(DANGLING_ELSE, "Exp.IfElse", 1, RIGHTMOST, ["Exp.If"])]


def test_longest_match_listing1c():
    g = _ng("listing1c")
    assert _conflicts(g) == [(LONGEST_MATCH, "Pat+.Cons", 0, RIGHTMOST, ["Exp.Match"])]


def test_mini_ml_all_three_classes():
    g = _ng("mini-ml")
    assert _conflicts(g) == [
        (OPERATOR_STYLE, "Exp.Add", 0, RIGHTMOST, ["Exp.If"]),
        (OPERATOR_STYLE, "Exp.Add", 0, RIGHTMOST, ["Exp.IfElse"]),
        (OPERATOR_STYLE, "Exp.Add", 0, RIGHTMOST, ["Exp.Match"]),
        (DANGLING_ELSE, "Exp.IfElse", 1, RIGHTMOST, ["Exp.If"]),
        (LONGEST_MATCH, "Pat+.Cons", 0, RIGHTMOST, ["Exp.Match"]),
    ]


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_detection_is_deterministic_and_well_formed(name):
    g = _ng(name)
    a, b = detect_deep_conflicts(g), detect_deep_conflicts(_ng(name))
    assert a == b
    for c in a:
        assert c.forbidden and c.production not in c.forbidden
        assert c.side in (LEFTMOST, RIGHTMOST)


# contextual grammar and universe

def test_listing3_contextual_grammar():
    g = _ng("listing3")
    cg = derive_contextual_grammar(g, detect_deep_conflicts(g))
    add = cg.base.find("Exp", "Add")
    if_ = g.find("Exp", "If").id
    assert add.rhs[0] == Contextual("Exp", frozenset(), frozenset({if_}))
    assert list(cg.occurrences) == [(add.id, 0)]
    changed = [p for p, q in zip(cg.base.productions, g.productions) if p != q]
    assert changed == [add]


def test_empty_conflicts_leave_grammar_unchanged():
    g = _ng("arith")
    cg = derive_contextual_grammar(g, [])
    assert cg.base.structure() == g.structure()
    assert len(token_universe(cg)) == 0


def test_same_site_conflicts_are_united():
    g = _ng("mini-ml")
    add = g.find("Exp", "Add").id
    if_, match = g.find("Exp", "If").id, g.find("Exp", "Match").id
    cs = [DeepConflict(OPERATOR_STYLE, add, 0, RIGHTMOST, frozenset({if_})),
          DeepConflict(OPERATOR_STYLE, add, 0, RIGHTMOST, frozenset({match}))]
    cg = derive_contextual_grammar(g, cs)
    assert cg.occurrences == {(add, 0): Contextual("Exp", frozenset(), frozenset({if_, match}))}


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_erasure_round_trip(name):
    g = _ng(name)
    cg = derive_contextual_grammar(g, detect_deep_conflicts(g))
    assert erase(cg.base).structure() == g.structure()
    assert len(cg.base.productions) == len(g.productions)


def test_listing3_universe():
    g = _ng("listing3")
    _, _, _, u = analyze(g)
    assert u.members == (g.find("Exp", "If").id,)


def test_mini_ml_universe():
    g = _ng("mini-ml")
    _, conflicts, cg, u = analyze(g)
    assert [g.label(i) for i in u.members] == ["Exp.If", "Exp.IfElse", "Exp.Match"]
    assert set(u.members) == set().union(*(c.forbidden for c in conflicts))
    assert list(u.members) == sorted(u.members)
    assert [u.bit(i) for i in u.members] == [1, 2, 4]


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_universe_members_all_appear_in_some_set(name):
    _, _, cg, u = analyze(_ng(name))
    used = set()
    for sym in cg.occurrences.values():
        used |= sym.lm | sym.rm
    assert set(u.members) == used
    assert len(u) <= sum(1 for p in cg.base.productions if p.kind == "user" and not p.lexical)
