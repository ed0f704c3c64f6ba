from hypothesis import given, settings
from hypothesis import strategies as st

from dpc import fixtures
from dpc.analysis import TokenUniverse
from dpc.corpus import SentenceGenerator
from dpc.engine import count_ambiguities
from dpc.implode import implode

from oracles import compiled, constraint_violations, readings, shallow_violations, spine_mismatches

CONFLICTED = [n for n in fixtures.NAMES if n != "arith"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CONFLICTED), st.integers(0, 2**32 - 1))
def test_datadep_matches_rewrite_on_random_sentences(name, seed):
    c = compiled(name)
    s = SentenceGenerator(c.grammar, seed).sentence(7)
    dd, rw, none = (c.parse(s, m) for m in ("datadep", "rewrite", "none"))
    assert dd.success and rw.success and none.success
    assert implode(dd) == implode(rw)
    assert count_ambiguities(dd.root) == 0
    # deep filtering only removes readings
    assert readings(dd) <= readings(none)
    assert spine_mismatches(dd) == [] and constraint_violations(dd) == []
    assert shallow_violations(dd, c.shallow) == []


@given(st.lists(st.integers(0, 500), min_size=1, max_size=128, unique=True), st.data())
def test_mask_round_trip(members, data):
    u = TokenUniverse(tuple(sorted(members)))
    a = frozenset(data.draw(st.lists(st.sampled_from(members))))
    b = frozenset(data.draw(st.lists(st.sampled_from(members))))
    assert u.ids(u.mask(a)) == a
    assert u.ids(u.mask(a) | u.mask(b)) == a | b
    assert u.ids(u.mask(a) & u.mask(b)) == a & b
    assert u.mask(a | {1000}) == u.mask(a) and u.bit(1000) == 0
