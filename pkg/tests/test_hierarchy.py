import pytest

from markedgroups.grigorchuk import TernarySequence
from markedgroups.hierarchy import (NINE_SEQUENCES, Scales, continuity_experiment,
                                    expectation_report, predictions, reduce)
from markedgroups.oracles import MarkedGroupError
from markedgroups.space import canonical_certificate

SAMPLE = list(NINE_SEQUENCES) + ["012012(1)", "0120(1)", "0(1)", "2(0)", "(01)"]


def test_reduce_modes():
    lim = reduce("(0)", "G4", 1, mode="limit")
    direct = reduce("(0)", "G4", 1, mode="direct")
    assert len(lim) == 5 and len(direct) == 3
    assert reduce("(0)", "G4", 1).stats["mode"] == "limit"
    assert reduce("(012)", "G4", 1).stats["mode"] == "direct"
    assert len(reduce("(012)", "G4", 1)) == 5
    for s in ("(0)", "(012)", "01(2)"):
        assert len(reduce(s, "L2", 0)) == 1
    with pytest.raises(MarkedGroupError):
        reduce("(012)", "G4", 1, mode="limit")
    with pytest.raises(MarkedGroupError):
        reduce("(012)", "G7", 1)


def test_reduce_reads_finitely_many_symbols():
    reads = {}
    certs = {}
    for s in SAMPLE:
        for k in range(1, 5):
            b = reduce(s, "G4", k)
            reads[s, k] = b.stats["symbols_read"]
            certs[s, k] = canonical_certificate(b)
    p = {k: max(reads[s, k] for s in SAMPLE) for k in range(1, 5)}
    assert all(p[k] <= p[k + 1] for k in range(1, 4))
    # balls only depend on the first p(k) symbols
    for a in SAMPLE:
        for b in SAMPLE:
            n = TernarySequence.parse(a).common_prefix_length(TernarySequence.parse(b))
            if n is None:
                continue
            for k in range(1, 5):
                if p[k] <= n:
                    assert certs[a, k] == certs[b, k], (a, b, k)


def test_continuity_experiment():
    pairs = [("(012)", "0(12)"), ("(012)", "01(2)"), ("(012)", "012012(1)"), ("0(1)", "1(0)"),
             ("0(1)", "02(1)")]
    out = continuity_experiment(pairs, "G4", 4)
    rows = {(r["alpha"], r["beta"]): r for r in out["rows"]}
    assert rows["(012)", "012012(1)"]["prefix"] == 6
    assert rows["(012)", "012012(1)"]["mu_exponent"] >= 2
    assert rows["0(1)", "1(0)"]["prefix"] == 0
    # boundary row: recorded, nothing asserted beyond its presence
    assert rows["0(1)", "02(1)"]["prefix"] == 1
    assert out["nonincreasing"] and out["all_within_bound"]
    with pytest.raises(MarkedGroupError):
        continuity_experiment([("(012)", "012(012)")])


def test_predictions_come_from_the_class():
    p = predictions(TernarySequence.parse("(012)"))
    assert p["periodic"] and not p["solvable"] and p["growth"] == "intermediate"
    p = predictions(TernarySequence.parse("(0)"))
    assert p["solvable"] and not p["periodic"]
    assert p["decidable_word_problem"]


def test_expectation_first_group():
    rep = expectation_report("(012)")
    assert rep.agreement
    obs = rep.observed
    assert obs["torsion"]["summary"] == "periodic-consistent"
    assert not obs["growth"]["exponential_consistent"]


def test_expectation_non_periodic_witness():
    rep = expectation_report("01(01)")
    assert rep.sequence == "(01)"
    assert not rep.predicted["periodic"]
    assert rep.observed["torsion"]["exceeds_budget"] > 0
    assert rep.observed["torsion"]["certified_infinite"]


def test_expectation_L2_constant():
    rep = expectation_report("(0)", "L2", Scales(solvable_k=3, solvable_len=8))
    assert rep.agreement
    assert rep.observed["solvable_probe"]["status"] == "holds"
    assert rep.observed["solvable_probe"]["level"] == "at_scale"
