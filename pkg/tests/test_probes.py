from fractions import Fraction

import pytest

from markedgroups.oracles import LamplighterGroup, instantiate
from markedgroups.probes import (abelian_check, endo_probe, folner_ratio, folner_search,
                                 index_probe, lamplighter_box_ratio, local_embedding_check,
                                 nilpotency_class_probe, solvable_degree_probe, torsion_probe)
from markedgroups.space import ball
from markedgroups.words import parse_word

P = parse_word


def test_abelian_check():
    assert abelian_check(instantiate("abelian:2")).holds
    v = abelian_check(instantiate("free:2"))
    assert v.fails and v.witness == "abAB" and v.level == "exact"
    g = instantiate("grig:(012)")
    w = abelian_check(g)
    assert w.fails and not g.is_identity(P(w.witness))


def test_nilpotency():
    H = instantiate("heisenberg")
    assert nilpotency_class_probe(H, 2).holds
    v = nilpotency_class_probe(H, 1)
    assert v.fails and v.witness == "abAB"
    assert nilpotency_class_probe(instantiate("abelian:2"), 1).holds
    for k in range(1, 5):
        assert nilpotency_class_probe(instantiate("free:2"), k).fails
    with pytest.raises(ValueError):
        nilpotency_class_probe(H, 0)


def test_solvable():
    assert solvable_degree_probe(instantiate("abelian:2"), 1, 8).holds
    v = solvable_degree_probe(instantiate("grig:(0)"), 2, 8)
    assert v.holds and v.level == "at_scale"
    assert solvable_degree_probe(instantiate("free:2"), 2, 14).fails
    assert solvable_degree_probe(instantiate("heisenberg"), 2, 14).holds


def test_grig_first_group_not_metabelian_at_length_14():
    g = instantiate("grig:(012)")
    v = solvable_degree_probe(g, 2, 14)
    assert v.fails and v.level == "exact"
    assert len(P(v.witness)) == 14
    assert not g.is_identity(P(v.witness))


def test_torsion():
    t = torsion_probe(instantiate("free:2"), 3, 100)
    assert t["summary"] == "torsion-free-consistent"
    assert t["finite"] == 0 and t["certified_infinite"] == len(t["elements"])
    t = torsion_probe(instantiate("cyclic:6"), 1, 100)
    assert {r["word"]: r["order"] for r in t["elements"]}["a"] == 6
    t = torsion_probe(instantiate("grig:(012)"), 4, 2 ** 13)
    assert t["summary"] == "periodic-consistent"
    assert all(r["order"] in (2, 4, 8, 16) for r in t["elements"])


def test_folner_ratio_examples():
    for k in (3, 5):
        g = instantiate(f"cyclic:{k}")
        F = [(1,) * i for i in range(k)]
        assert folner_ratio(g, F, (1,)) == 0
        assert folner_ratio(g, F, (2, 1)) == 0
    F = ball(instantiate("free:2"), 1).words
    assert folner_ratio(instantiate("free:2"), F, (1,)) == Fraction(6, 5)


@pytest.mark.parametrize("width", [1, 2, 3, 4])
def test_box_ratio_matches_oracle(width):
    g = instantiate("lamplighter")
    F = [LamplighterGroup.box_element_word(e, width) for e in LamplighterGroup.left_box(width)]
    assert len({tuple(w) for w in F}) == width << width
    for letter in (1, 2, -2):
        assert lamplighter_box_ratio(width, letter) == folner_ratio(g, F, (letter,))
    assert lamplighter_box_ratio(width, 2) == Fraction(2, width)
    assert lamplighter_box_ratio(width, 1) == 0


def test_folner_search():
    r = folner_search(instantiate("lamplighter"), [(1,), (2,)], 4, "boxes")
    assert r.found and r.best_max_ratio <= Fraction(1, 4)
    r = folner_search(instantiate("abelian:2"), [(1,), (2,)], 10, "balls", max_param=30)
    assert r.found and r.best_max_ratio <= Fraction(1, 10)
    r = folner_search(instantiate("free:2"), [(1,), (2,)], 2, "balls", max_param=4)
    assert not r.found and r.best_max_ratio >= Fraction(1, 2)
    r = folner_search(instantiate("cyclic:4"), [(1,)], 100, "balls")
    assert r.found and r.best_max_ratio == 0
    with pytest.raises(Exception):
        folner_search(instantiate("free:2"), [(1,)], 2, "boxes")


def test_endo_probe():
    F = instantiate("free:2")
    ident = endo_probe(F, [(1,), (2,)], 3)
    assert all(v.holds for v in ident.values())
    r = endo_probe(F, [(1, 1), (2,)], 3)
    assert r["welldefined"].holds and r["injective"].holds
    assert r["surjective"].fails and r["surjective"].witness == "a"
    r = endo_probe(instantiate("abelian:2"), [(1, 2), (2,)], 3)
    assert all(v.holds for v in r.values())
    # a -> 1 collapses the abelian plane onto a line
    r = endo_probe(instantiate("abelian:2"), [(), (2,)], 2)
    assert r["injective"].fails and r["injective"].level == "exact"
    # b is trivial in cyclic:2 but its image a is not
    r = endo_probe(instantiate("cyclic:2"), [(1,), (1,)], 2)
    assert r["welldefined"].fails and r["welldefined"].level == "exact"


def test_index_probe():
    A = instantiate("abelian:2")
    v = index_probe(A, [(1, 1), (2,)], 3, 6)
    assert v.holds and v.details["cosets"] == 2 and v.level == "exact"
    assert index_probe(A, [(1,), (2,)], 2).details["cosets"] == 1
    v = index_probe(instantiate("free:2"), [(1,)], 5, 6)
    assert v.fails and v.level == "at_scale"


def test_local_embedding():
    S = instantiate("symshift")
    E = ball(S, 2).words
    assert local_embedding_check(S, E, instantiate("symshift_fin:7")).holds
    assert local_embedding_check(S, E, S).holds
    # symshift_fin:3 is too small for the radius-2 ball
    assert local_embedding_check(S, E, instantiate("symshift_fin:3")).fails
    collapse = local_embedding_check(instantiate("free:2"), [(1,), (2,)], instantiate("free:2"),
                                     phi=lambda w: ())
    assert collapse.fails


@pytest.mark.parametrize("letter", [1, -1, 2, -2])
def test_box_ratio_matches_element_count(letter):
    for width in range(1, 9):
        box = list(LamplighterGroup.left_box(width))
        out = sum(not LamplighterGroup.in_left_box(
            LamplighterGroup.left_translate(e, letter, width), width) for e in box)
        assert lamplighter_box_ratio(width, letter) == Fraction(2 * out, len(box))
