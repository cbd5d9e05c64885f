"""The map alpha -> (G_alpha, S_alpha) at finite resolution, and the
experiments comparing sequence classes with observed group behaviour."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from markedgroups.grigorchuk.groups import (G4_MARKS, L2_MARKS, GrigorchukGroup,
                                            GrigorchukLimit, fingerprint_depth)
from markedgroups.grigorchuk.sequences import TernarySequence, classify
from markedgroups.oracles.base import MarkedGroupError
from markedgroups.probes import solvable_degree_probe, torsion_probe
from markedgroups.space import (BallBuilder, CayleyBall, ball_isomorphic, growth,
                                growth_classify)

MARKINGS = {"G4": G4_MARKS, "L2": L2_MARKS}


def _seq(alpha: TernarySequence | str) -> TernarySequence:
    return TernarySequence.parse(alpha) if isinstance(alpha, str) else alpha


def _marks(marking: str) -> tuple[str, ...]:
    try:
        return MARKINGS[marking]
    except KeyError:
        raise MarkedGroupError(f"marking must be G4 or L2, got {marking!r}") from None


def default_mode(alpha: TernarySequence) -> str:
    return "limit" if classify(alpha).in_E else "direct"


def direct_group(alpha: TernarySequence | str, marking: str = "G4",
                 radius: int = 4) -> GrigorchukGroup:
    alpha = _seq(alpha)
    marks = _marks(marking)
    stretch = max(len(m) for m in marks)
    return GrigorchukGroup(alpha, marks, depth=fingerprint_depth(radius * stretch))


def reduce(alpha: TernarySequence | str, marking: str = "G4", radius: int = 1,
           mode: str | None = None, stability: int = 3, cap: int = 12,
           threads: int = 1) -> CayleyBall:
    """Ball of radius k around f(alpha).

    ``mode`` is ``direct`` (the tree group itself) or ``limit`` (the limit
    point, only for eventually constant alpha); by default the limit is
    used exactly when alpha is eventually constant.  The number of alpha
    symbols the computation looked at is recorded in ``ball.stats``.
    """
    alpha = _seq(alpha)
    if mode is None:
        mode = default_mode(alpha)
    if mode == "direct":
        g = direct_group(alpha, marking, radius)
        b = BallBuilder(g, threads=threads).ball(radius)
        b.stats["symbols_read"] = g.symbols_read()
    elif mode == "limit":
        if not classify(alpha).in_E:
            raise MarkedGroupError(f"limit mode needs an eventually constant sequence, "
                                   f"got {alpha.text}")
        lim = GrigorchukLimit(alpha, _marks(marking), stability=stability, cap=cap)
        b = lim.limit_ball(radius, threads=threads)
        b.stats.update(lim.last_run)
    else:
        raise MarkedGroupError(f"mode must be direct or limit, got {mode!r}")
    b.stats["mode"] = mode
    b.stats["sequence"] = alpha.canonical_text()
    return b


def _mu_exponent(a: TernarySequence, b: TernarySequence, marking: str,
                 resolution: int) -> tuple[int, bool]:
    for r in range(0, resolution + 1):
        if not ball_isomorphic(reduce(a, marking, r), reduce(b, marking, r)):
            return r - 1, True
    return resolution, False


def continuity_experiment(pairs: Sequence[tuple[Any, Any]], marking: str = "G4",
                          resolution: int = 4) -> dict[str, Any]:
    """mu-distance between f(alpha) and f(beta) against their common prefix.

    Checks that distances shrink as prefixes grow and stay below
    2^-floor((n-1)/2); the 2^-(n-1) bound is reported for comparison only.
    """
    rows = []
    for a, b in pairs:
        a, b = _seq(a), _seq(b)
        n = a.common_prefix_length(b)
        if n is None:
            raise MarkedGroupError(f"sequences {a.text} and {b.text} are equal")
        k, exact = _mu_exponent(a, b, marking, resolution)
        bound = (n - 1) // 2 if n >= 1 else 0
        rows.append({
            "alpha": a.canonical_text(), "beta": b.canonical_text(), "prefix": n,
            "mu_exponent": k, "exact": exact,
            "within_bound": k >= min(bound, resolution),
            "informational_bound_exponent": max(n - 1, 0),
            "meets_informational_bound": k >= max(n - 1, 0),
        })
    ordered = sorted(rows, key=lambda r: r["prefix"])
    monotone = True
    for prev, cur in zip(ordered, ordered[1:]):
        if cur["prefix"] > prev["prefix"] and cur["mu_exponent"] < prev["mu_exponent"]:
            monotone = False
    return {"marking": marking, "resolution": resolution, "rows": rows,
            "nonincreasing": monotone,
            "all_within_bound": all(r["within_bound"] for r in rows if r["prefix"] >= 1)}


@dataclass
class Scales:
    torsion_len: int = 4
    order_budget: int = 2 ** 13
    solvable_k: int = 2
    solvable_len: int = 10
    growth_x: int = 8

    def to_json(self) -> dict[str, int]:
        return dict(self.__dict__)


@dataclass
class ExpectationReport:
    sequence: str
    marking: str
    predicted: dict[str, Any]
    observed: dict[str, Any]
    contradictions: list[str] = field(default_factory=list)

    @property
    def agreement(self) -> bool:
        return not self.contradictions

    def to_json(self) -> dict[str, Any]:
        return {"sequence": self.sequence, "marking": self.marking,
                "predicted": self.predicted, "observed": self.observed,
                "contradictions": self.contradictions, "agreement": self.agreement}


def predictions(alpha: TernarySequence) -> dict[str, Any]:
    c = classify(alpha)
    return {
        "class": c.to_json(),
        "periodic": c.in_I,
        "growth": "polynomial-or-exponential" if c.in_E else "intermediate",
        "solvable": c.in_E,
        "decidable_word_problem": c.in_C,
    }


def expectation_report(alpha: TernarySequence | str, marking: str = "G4",
                       scales: Scales | None = None) -> ExpectationReport:
    """Predictions from the sequence class against probes of the direct group.

    Only certified observations can contradict: a certified infinite order
    when periodicity is predicted, or a solvability witness of degree k
    when solvability of degree <= k is predicted (never, as no degree is
    predicted).  Everything else is recorded as consistent evidence.
    """
    alpha = _seq(alpha)
    scales = scales or Scales()
    pred = predictions(alpha)
    g = direct_group(alpha, marking, max(scales.torsion_len, scales.growth_x))

    tors = torsion_probe(g, scales.torsion_len, scales.order_budget)
    infinite = [r["word"] for r in tors["elements"] if r.get("certified_infinite")]
    solv = solvable_degree_probe(g, scales.solvable_k, scales.solvable_len)
    table = growth(g, scales.growth_x)
    cls = growth_classify(table)

    observed = {
        "torsion": {"summary": tors["summary"], "finite": tors["finite"],
                    "exceeds_budget": tors["exceeds_budget"],
                    "certified_infinite": infinite[:5]},
        "solvable_probe": solv.to_json(),
        "growth": {"table": table, **cls},
    }
    contradictions = []
    if pred["periodic"] and infinite:
        contradictions.append(f"periodic predicted but {infinite[0]} has certified infinite order")
    return ExpectationReport(alpha.canonical_text(), marking, pred, observed, contradictions)


NINE_SEQUENCES = ("(0)", "(1)", "(2)", "(01)", "(02)", "(12)", "(012)", "0(12)", "01(2)")
