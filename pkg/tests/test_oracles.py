import functools

import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from markedgroups.oracles import (ElementIndex, FinitelyPresentedGroup, MarkedGroupError, SpecError,
                                  UnknownVerdictError, canonical_spec, catalog, closure_member,
                                  instantiate, parse_spec, remark)
from markedgroups.words import concat, cyclic_reduce, free_reduce, inverse, parse_word

group = functools.lru_cache(maxsize=None)(instantiate)

letters2 = st.integers(min_value=-2, max_value=2).filter(bool)
words2 = st.lists(letters2, max_size=16).map(free_reduce)

REFERENCE = {
    "free:2": ref.free_trivial,
    "abelian:2": lambda w: ref.abelian_trivial(w, 2),
    "cyclic:5": lambda w: ref.cyclic_trivial(w, 5),
    "heisenberg": ref.heisenberg_trivial,
    "bs:1,2": lambda w: ref.bs1n_trivial(w, 2),
    "bs:1,3": lambda w: ref.bs1n_trivial(w, 3),
    "lamplighter": ref.lamplighter_trivial,
    "symshift": ref.symshift_trivial,
    "symshift_fin:4": lambda w: ref.symshift_trivial(w, 4),
    "remark(abelian:1;a,1)": ref.z_embedded_trivial,
}


@pytest.mark.parametrize("spec", sorted(REFERENCE))
def test_oracle_matches_reference_on_short_words(spec):
    from markedgroups.words import enumerate_words
    g = instantiate(spec)
    want = REFERENCE[spec]
    for w in enumerate_words(2, 7):
        assert g.is_identity(w) == want(w), (spec, w)


@pytest.mark.parametrize("spec", sorted(REFERENCE))
@settings(max_examples=150)
@given(w=words2)
def test_oracle_matches_reference_random(spec, w):
    assert group(spec).is_identity(w) == REFERENCE[spec](w)


COHERENT = ["free:2", "abelian:2", "cyclic:6", "heisenberg", "bs:2,3", "lamplighter",
            "symshift", "symshift_fin:5", "grigL:(012)", "grigL:01(2)"]


@pytest.mark.parametrize("spec", COHERENT)
@settings(max_examples=60)
@given(u=words2, v=words2)
def test_oracle_coherence(spec, u, v):
    g = group(spec)
    assert g.is_identity(concat(u, inverse(u)))
    # triviality is conjugation invariant
    assert g.is_identity(v) == g.is_identity(concat(u, v, inverse(u)))
    assert g.is_identity(v) == g.is_identity(cyclic_reduce(v))
    assert g.equal(u, v) == g.equal(v, u)
    if g.exact_keys:
        assert (g.key(u) == g.key(v)) == g.equal(u, v)
    elif g.key(u) is not None and g.equal(u, v):
        assert g.key(u) == g.key(v)


def test_bs_examples():
    g = instantiate("bs:2,3")
    assert g.is_identity(parse_word("baaBAAA"))
    assert not g.is_identity(parse_word("baB"))
    assert not g.is_identity(parse_word("ab"))


def test_lamplighter_lamps_commute():
    g = instantiate("lamplighter")
    assert g.is_identity(parse_word("abaBAbAB"))
    assert not g.is_identity(parse_word("ab"))


def test_heisenberg_center():
    g = instantiate("heisenberg")
    c = parse_word("abAB")
    assert g.is_identity(concat(c, (1,), inverse(c), (-1,)))
    assert not g.is_identity(c)


def test_torsion_free_orders_are_certified():
    for spec in ("free:2", "abelian:2", "heisenberg", "bs:2,3"):
        r = instantiate(spec).element_order(parse_word("ab"), 10)
        assert r.value is None and r.infinite
    assert instantiate("lamplighter").element_order(parse_word("a"), 10).value == 2
    assert instantiate("lamplighter").element_order(parse_word("b"), 10).infinite
    assert instantiate("cyclic:6").element_order(parse_word("aa"), 10).value == 3
    assert instantiate("symshift_fin:4").element_order(parse_word("b"), 10).value == 4


def test_closure_membership():
    rels = [parse_word("abAB")]
    assert closure_member(rels, parse_word("baBA"), 1000).is_trivial
    assert closure_member(rels, parse_word("aabAAB"), 1000).is_trivial
    g = FinitelyPresentedGroup(2, [parse_word("aaa"), parse_word("bb")], budget=3000)
    assert g.is_identity(parse_word("aaa"))
    assert g.is_identity(parse_word("abbA"))
    with pytest.raises(UnknownVerdictError):
        g.is_identity(parse_word("ab"))


def test_fp_agrees_with_normal_form_on_proofs():
    fp = FinitelyPresentedGroup(2, [parse_word("abAB")], budget=500)
    ab = instantiate("abelian:2")
    from markedgroups.words import enumerate_words
    proved = 0
    for w in enumerate_words(2, 4):
        v = fp.oracle(w)
        if v.is_trivial:
            proved += 1
            assert ab.is_identity(w)
    assert proved > 1


def test_remark_translates_marks():
    g = instantiate("remark(free:2;ab,b)")
    assert g.arity == 2
    assert g.is_identity(parse_word("aBA")) is False
    assert g.is_identity(parse_word("abAB")) is False
    z = remark(instantiate("cyclic:4"), [(1, 1), (1,)])
    assert z.is_identity(parse_word("aa"))
    assert z.is_identity(parse_word("abb"))
    with pytest.raises(Exception):
        remark(instantiate("free:2"), [(1,)])


def test_element_index_dedupes():
    g = instantiate("cyclic:3")
    idx = ElementIndex(g)
    for w in ["1", "a", "A", "aa", "aaa", "b", "ab"]:
        idx.find_or_add(parse_word(w))
    assert len(idx) == 3


SPECS_OK = [
    ("free:3", "free:3"), ("abelian:2", "abelian:2"), ("cyclic:7", "cyclic:7"),
    ("heisenberg", "heisenberg"), ("bs:2,3", "bs:2,3"), ("lamplighter", "lamplighter"),
    ("symshift", "symshift"), ("symshift_fin:5", "symshift_fin:5"),
    ("grig:(012)", "grig:(012)"), ("grig:012(012)", "grig:(012)"), ("grigL:01(2)", "grigL:01(2)"),
    ("griglim:(0)", "griglim:(0)"), ("fp:2:abAB", "fp:2:abAB"),
    ("remark(free:2;ab,B)", "remark(free:2;ab,B)"),
    ("remark(abelian:1;a,1)", "remark(abelian:1;a,1)"),
]


@pytest.mark.parametrize("text,canon", SPECS_OK)
def test_spec_round_trip(text, canon):
    assert canonical_spec(text) == canon
    assert canonical_spec(canon) == canon
    g = instantiate(text)
    assert g.arity == parse_spec(text).arity


@pytest.mark.parametrize("text,pos", [
    ("free:0", 5), ("cyclic:x", 7), ("bs:2", 4), ("grig:(3)", 5), ("nope", 0),
    ("free:2x", 6), ("remark(free:2;a)", 15), ("fp:2:ac", 5), ("symshift_fin:1", 13),
    ("griglim:(01)", 0),
])
def test_spec_errors_are_positional(text, pos):
    with pytest.raises(SpecError) as exc:
        parse_spec(text)
    assert exc.value.pos == pos
    assert f"position {pos}" in str(exc.value)
    assert isinstance(exc.value, MarkedGroupError)


def test_catalog_lists_every_family():
    forms = [c["form"].split(":")[0].split("(")[0] for c in catalog()]
    for kind in ("free", "abelian", "cyclic", "heisenberg", "bs", "lamplighter", "symshift",
                 "symshift_fin", "grig", "grigL", "griglim", "fp", "remark"):
        assert kind in forms
