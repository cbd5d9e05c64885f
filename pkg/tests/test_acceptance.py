"""One test per acceptance criterion; conftest prints a PASS/FAIL line for each."""

import functools
import itertools
import subprocess
import sys
import time
from fractions import Fraction

import pytest

import reference as ref
from markedgroups.grigorchuk import Engine, TernarySequence, reduce as grig_reduce
from markedgroups.hierarchy import NINE_SEQUENCES, expectation_report, reduce
from markedgroups.oracles import LamplighterGroup, instantiate
from markedgroups.probes import (abelian_check, folner_ratio, folner_search,
                                 nilpotency_class_probe, solvable_degree_probe)
from markedgroups.space import (ball, ball_isomorphic, converge_table, growth, growth_classify,
                                mu_distance, nu_distance, relation_set)
from markedgroups.words import parse_word

group = functools.lru_cache(maxsize=None)(instantiate)
Z = "remark(abelian:1;a,1)"


def raw_words(alphabet: str, n: int):
    for k in range(n + 1):
        for t in itertools.product(alphabet, repeat=k):
            yield "".join(t)


# 1 -------------------------------------------------------------------------------

def test_criterion_01_relation_sets_match_balls():
    # the tree group enters through its 2-generated marking
    specs = ["free:2", "abelian:2"] + [f"cyclic:{k}" for k in range(3, 9)] + \
            ["bs:2,3", "lamplighter", "grigL:(012)"]
    start = time.perf_counter()
    W = {(s, k): relation_set(group(s), 2 * k + 1).members for s in specs for k in range(4)}
    B = {(s, k): ball(group(s), k) for s in specs for k in range(4)}
    exceptions = []
    checks = 0
    for a, b in itertools.combinations(specs, 2):
        for k in range(4):
            checks += 1
            same_w = W[a, k] == W[b, k]
            same_b = ball_isomorphic(B[a, k], B[b, k])
            if same_w != same_b:
                exceptions.append((a, b, k, same_w, same_b))
    elapsed = time.perf_counter() - start
    print(f"criterion 1: {checks} checks, {len(exceptions)} exceptions, {elapsed:.1f}s")
    assert not exceptions
    assert elapsed < 60


# 2 -------------------------------------------------------------------------------

def test_criterion_02_exact_distances():
    F, A = group("free:2"), group("abelian:2")
    mu = mu_distance(F, A, 6)
    nu = nu_distance(F, A, 8)
    assert mu.exact and mu.value == Fraction(1, 2)
    assert nu.exact and nu.value == Fraction(1, 8)
    for k in range(3, 9):
        d = nu_distance(group(f"cyclic:{k}"), group(Z), 12)
        assert d.exact and d.value == Fraction(1, 2 ** (k - 1)), k


# 3 -------------------------------------------------------------------------------

def test_criterion_03_convergence_tables():
    start = time.perf_counter()
    cyc = converge_table([group(f"cyclic:{k}") for k in range(2, 13)], group(Z), 8)
    bs = converge_table([group(f"bs:{m},{m + 1}") for m in range(2, 7)], group("free:2"), 8)
    sym = converge_table([group(f"symshift_fin:{k}") for k in range(3, 11)],
                         group("symshift"), 8)
    elapsed = time.perf_counter() - start
    for name, t in (("cyclic->Z", cyc), ("bs->free", bs), ("symshift", sym)):
        print(f"criterion 3 {name}: exponents {t.exponents}")
    assert cyc.nonincreasing and cyc.distances[-1].value <= Fraction(1, 2 ** 4)
    assert bs.strictly_decreasing
    assert sym.nonincreasing and sym.distances[-1].value <= Fraction(1, 2 ** 3)
    assert elapsed < 300


# 4 -------------------------------------------------------------------------------

DEPTH = 10


def _trivial_by_action(text: str, n: int) -> dict[str, bool]:
    """Depth-10 action of every raw word of length <= n, built along the prefix tree."""
    a = TernarySequence.parse(text)
    f = ref.sequence_fn(a.prefix, a.tail)
    perms = {ch: ref.grig_level_perm(ch, f, DEPTH) for ch in "abcd"}
    ident = tuple(range(1 << DEPTH))
    out = {"": True}
    layer = {"": ident}
    for _ in range(n):
        nxt = {}
        for w, acc in layer.items():
            for ch in "abcd":
                p = perms[ch]
                q = tuple(p[i] for i in acc)
                nxt[w + ch] = q
                out[w + ch] = q == ident
        layer = nxt
    return out


def test_criterion_04_grigorchuk_engine():
    checks = 0
    mismatches = []
    for text in ("(012)", "(0)", "01(2)"):
        e = Engine(TernarySequence.parse(text))
        for w, acted in _trivial_by_action(text, 6).items():
            checks += 1
            if e.is_trivial(w).is_trivial != acted:
                mismatches.append((text, w))
    print(f"criterion 4: {checks} word problem checks, {len(mismatches)} mismatches")
    assert not mismatches

    assert Engine(TernarySequence.parse("(012)")).order("a").value == 2
    assert Engine(TernarySequence.parse("(0)")).order("d").value == 1

    e = Engine(TernarySequence.parse("(012)"))
    bad = []
    orders = {}
    for w in raw_words("abcd", 6):
        r = grig_reduce(w)
        if r in orders:
            continue
        res = e.order(r, budget=10 ** 6)
        orders[r] = res.value
        if res.value is None or res.value > 2 ** 16 or not e.verify_order(r, res.value):
            bad.append((w, res))
    print(f"criterion 4: {len(orders)} distinct reduced elements, max order "
          f"{max(v for v in orders.values() if v)}")
    assert not bad


# 5 -------------------------------------------------------------------------------

def test_criterion_05_growth():
    assert growth(group("free:2"), 6) == [2 * 3 ** x - 1 for x in range(7)]
    assert growth(group("abelian:2"), 6) == [2 * x * x + 2 * x + 1 for x in range(7)]
    g = group("grig:(012)")
    auto = growth(g, 8)
    certified = growth(g, 8, mode="certified")
    print(f"criterion 5: grig:(012) growth {auto}")
    assert auto == certified
    f = growth_classify(growth(group("free:2"), 8))
    a = growth_classify(growth(group("abelian:2"), 8))
    assert f["exponential_consistent"] and f["a_star"] >= 2.9
    assert a["polynomial_consistent"] and abs(a["degree_estimate"] - 2) <= 0.2


# 6 -------------------------------------------------------------------------------

def test_criterion_06_direct_vs_limit():
    lim = reduce("(0)", "G4", 1, mode="limit", stability=3, cap=12)
    direct = reduce("(0)", "G4", 1, mode="direct")
    print(f"criterion 6: limit {len(lim)} vertices, direct {len(direct)}, "
          f"approximants {lim.stats['approximants']}")
    assert len(lim) == 5 and len(direct) == 3
    assert lim.stats["approximants"][-1] <= 12


# 7 -------------------------------------------------------------------------------

def test_criterion_07_expectation_suite():
    failures = []
    for s in NINE_SEQUENCES:
        rep = expectation_report(s)
        if rep.contradictions:
            failures.append(f"{s}: {rep.contradictions}")

    g = group("grig:(012)")
    v = solvable_degree_probe(g, 2, 10)
    print(f"criterion 7: grig:(012) k=2 L=10 -> {v.status} ({v.details})")
    if not v.fails:
        failures.append(f"grig:(012) k=2 L=10 gave {v.status}, expected fails")
    elif g.is_identity(parse_word(v.witness)):
        failures.append(f"witness {v.witness} is trivial")

    v = solvable_degree_probe(group("grig:(0)"), 2, 8)
    if not (v.holds and v.level == "at_scale"):
        failures.append(f"grig:(0) k=2 L=8 gave {v.status}/{v.level}")
    assert not failures, "; ".join(failures)


# 8 -------------------------------------------------------------------------------

def test_criterion_08_folner():
    L = group("lamplighter")
    for m in range(2, 9):
        r = folner_search(L, [(1,), (2,)], m, "boxes")
        assert r.found and r.best_max_ratio <= Fraction(1, m), m
        assert all(isinstance(x, Fraction) for x in r.ratios.values())
    # the box itself, checked against the oracle directly
    width = 4
    F = [LamplighterGroup.box_element_word(e, width) for e in LamplighterGroup.left_box(width)]
    assert folner_ratio(L, F, (2,)) == Fraction(1, 2)
    r = folner_search(group("free:2"), [(1,), (2,)], 2, "balls", max_param=4)
    print(f"criterion 8: free:2 best ratio {r.best_max_ratio}")
    assert not r.found
    assert isinstance(r.best_max_ratio, Fraction) and r.best_max_ratio >= Fraction(1, 2)


# 9 -------------------------------------------------------------------------------

def test_criterion_09_probe_exactness():
    A, H, F = group("abelian:2"), group("heisenberg"), group("free:2")
    assert abelian_check(A).holds
    assert abelian_check(H).fails and abelian_check(F).fails
    assert nilpotency_class_probe(A, 1).holds
    assert nilpotency_class_probe(H, 1).fails
    assert nilpotency_class_probe(H, 2).holds
    for k in range(1, 5):
        v = nilpotency_class_probe(F, k)
        assert v.fails and v.level == "exact"
        assert not F.is_identity(parse_word(v.witness))


# 10 ------------------------------------------------------------------------------

MATRIX = [
    ["ball", "--group", "grig:(012)", "--radius", "3"],
    ["ball", "--group", "lamplighter", "--radius", "2", "--format", "dot"],
    ["dist", "--a", "free:2", "--b", "abelian:2", "--metric", "mu", "--resolution", "6"],
    ["dist", "--a", "cyclic:5", "--b", Z, "--metric", "nu", "--resolution", "8"],
    ["growth", "--group", "grig:(012)", "--x", "6", "--format", "csv"],
    ["probe", "--group", "heisenberg", "--kind", "nilpotent", "--k", "2"],
    ["probe", "--group", "grig:(0)", "--kind", "solvable", "--k", "2", "--length", "8"],
    ["folner", "--group", "lamplighter", "--m", "4", "--strategy", "boxes"],
    ["converge", "--template", "cyclic:{k}", "--from", "2", "--to", "6", "--limit", Z,
     "--resolution", "4"],
    ["grig", "order", "--seq", "(012)", "--word", "abad"],
    ["reduce", "--seq", "(0)", "--radius", "2"],
    ["expect", "--seq", "(012)", "--length", "6", "--x", "5"],
    ["check", "--group", "bs:1,2", "--seed", "3", "--count", "40"],
]


def _cli(argv):
    p = subprocess.run([sys.executable, "-m", "markedgroups", *argv], capture_output=True)
    return p.returncode, p.stdout


@pytest.mark.parametrize("argv", [MATRIX], ids=["matrix"])
def test_criterion_10_cli_determinism(argv):
    differing = []
    for cmd in argv:
        first = _cli(cmd + ["--threads", "1"])
        second = _cli(cmd + ["--threads", "1"])
        wide = _cli(cmd + ["--threads", "8"])
        assert first[0] == 0, cmd
        if not first == second == wide:
            differing.append(" ".join(cmd))
    print(f"criterion 10: {len(argv)} invocations, {len(differing)} nondeterministic")
    assert not differing
