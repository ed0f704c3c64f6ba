import json

import pytest

from dpc import fixtures
from dpc.engine import parse
from dpc.grammar import GrammarError
from dpc.pipeline import TABLE_MODES, compile_grammar
from dpc.tables import EOF, TableFormatError, build_table, deserialize_table, serialize_table

from oracles import compiled, readings

STRUCTURAL = ("alphabet", "states", "actions", "gotos", "startProduction")


def test_listing3_constraint_meta():
    c = compiled("listing3")
    t = c.table("datadep")
    add = c.grammar.find("Exp", "Add").id
    if_ = c.grammar.find("Exp", "If").id
    assert t.universe == (if_,)
    assert t.universe_labels == ("Exp.If",)
    assert t.constraint_meta == ((add, 0, 0, 1),)


def test_listing3_serialized_mask_is_hex():
    t = compiled("listing3").table("datadep")
    body = json.loads(serialize_table(t))["table"]
    assert body["constraintMeta"] == [{"production": compiled("listing3").grammar.find("Exp", "Add").id,
                                       "position": 0, "lmMask": "0", "rmMask": "1"}]


def test_left_argument_closure_excludes_if():
    # with If filtered from Add's left operand, "if INT + INT" cannot read as (if INT) + INT
    c = compiled("listing3")
    text = "if INT + INT"
    filtered = parse(c.table("none"), text)
    assert readings(filtered) == {'(If (Add (Int "INT") (Int "INT")))'}
    unfiltered = parse(build_table(c.grammar, frozenset()), text)
    assert readings(unfiltered) == {'(If (Add (Int "INT") (Int "INT")))', '(Add (If (Int "INT")) (Int "INT"))'}
    assert c.table("none").n_states != build_table(c.grammar, frozenset()).n_states


def test_minimal_grammar():
    c = compile_grammar('start symbol S\ncontext-free syntax\n  S.A = "a"\n')
    t = c.table("none")
    shifts = [(s, a) for s, acts in enumerate(t.actions) for a in acts if a.shift is not None]
    assert len(shifts) == 1 and (shifts[0][1].lo, shifts[0][1].hi) == (ord("a"), ord("a"))
    accepts = [a for acts in t.actions for a in acts if a.accept]
    assert len(accepts) == 1 and accepts[0].lo == EOF
    sa = c.grammar.find("S", "A").id
    assert sum(a.reduces.count(sa) for acts in t.actions for a in acts) == 1


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_metadata_is_additive(name):
    c = compiled(name)
    bare = build_table(c.grammar, c.shallow)
    meta = c.table("datadep")
    assert all(lm == 0 and rm == 0 for _, _, lm, rm in bare.constraint_meta)
    assert bare.universe == ()
    a, b = bare.sections(), meta.sections()
    for k in STRUCTURAL:
        assert a[k] == b[k], k


@pytest.mark.parametrize("name", fixtures.NAMES)
@pytest.mark.parametrize("mode", TABLE_MODES)
def test_round_trip(name, mode):
    t = compiled(name).table(mode)
    data = serialize_table(t)
    back = deserialize_table(data)
    assert back == t
    assert serialize_table(back) == data


@pytest.mark.parametrize("name", fixtures.NAMES)
@pytest.mark.parametrize("mode", TABLE_MODES)
def test_ranges_disjoint_and_references_valid(name, mode):
    t = compiled(name).table(mode)
    n = len(t.productions)
    full = (1 << len(t.universe)) - 1
    for acts in t.actions:
        bounds = [(a.lo, a.hi) for a in acts]
        assert bounds == sorted(bounds)
        for (_, h), (l, _) in zip(bounds, bounds[1:]):
            assert h < l
        for a in acts:
            assert all(0 <= r < n for r in a.reduces)
            assert a.shift is None or 0 <= a.shift < t.n_states
    for gotos in t.gotos:
        assert all(0 <= q < n and 0 <= s < t.n_states for q, s in gotos)
    for _, _, lm, rm in t.constraint_meta:
        assert lm & ~full == 0 and rm & ~full == 0


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_atom_rows_cover_exactly_the_action_ranges(name):
    t = compiled(name).table("none")
    for s, acts in enumerate(t.actions):
        covered = set()
        for a in acts:
            if a.lo != EOF:
                covered |= {k for k in range(t.atom_count) if a.lo <= t.atoms[k] <= a.hi}
        live = {k for k in range(t.atom_count) if t.rows[s][k] != (-1, (), False)}
        assert live == covered


def test_follow_restrictions_and_rejects_recorded():
    c = compiled("mini-ml")
    t = c.table("none")
    labels = {t.productions[pid].lhs for pid, _ in t.follow_meta}
    assert {"ID", "INT", '"if"'} <= labels
    assert {t.productions[pid].lhs for pid in t.reject_set} == {"ID"}
    assert dict(t.reject_spellings).keys() == {"ID"}
    assert {s for lhs, s in t.reject_spellings} == {"if", "then", "else", "match", "with"}


def _payload(t):
    return json.loads(serialize_table(t))


def test_version_mismatch():
    doc = _payload(compiled("listing3").table("none"))
    doc["formatVersion"] += 1
    with pytest.raises(TableFormatError, match="version"):
        deserialize_table(json.dumps(doc).encode())


def test_truncated_payload():
    data = serialize_table(compiled("listing3").table("none"))
    with pytest.raises(TableFormatError, match="truncated"):
        deserialize_table(data[: len(data) // 2])


def test_checksum_failure():
    doc = _payload(compiled("listing3").table("none"))
    doc["table"]["states"] += 1
    with pytest.raises(TableFormatError, match="checksum"):
        deserialize_table(json.dumps(doc).encode())


@pytest.mark.parametrize("text, message", [
    ('start symbol S\ncontext-free syntax\n  S.A = S\n  S.B = "b"\n', "cyclic derivation"),
    ('start symbol S\nlexical syntax\n  N = [0-9]\ncontext-free syntax\n  S.A = O S "x"\n  S.B = N\n  O.E = \n',
     "hidden left recursion"),
])
def test_unsupported_recursion_rejected(text, message):
    with pytest.raises(GrammarError, match=message):
        compile_grammar(text).table("none")
