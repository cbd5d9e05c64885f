"""The Grigorchuk family G_alpha over ternary sequences."""

from markedgroups.grigorchuk.engine import (Decomposition, Engine, GrigWordError, act, reduce,
                                            root_perm, wreath_decompose)
from markedgroups.grigorchuk.groups import (G4_MARKS, L2_MARKS, GrigorchukGroup, GrigorchukLimit,
                                            StabilizationError, limit_ball, marked_G4, marked_L2)
from markedgroups.grigorchuk.sequences import (SequenceClass, SequenceError, SequenceReader,
                                               TernarySequence, classify, shift)


def is_trivial(alpha, w, budget=10**6):
    return Engine(_seq(alpha)).is_trivial(w, budget)


def order(alpha, w, budget=10**6):
    return Engine(_seq(alpha)).order(w, budget)


def _seq(alpha):
    return TernarySequence.parse(alpha) if isinstance(alpha, str) else alpha


__all__ = [
    "Decomposition", "Engine", "GrigWordError", "act", "reduce", "root_perm", "wreath_decompose",
    "G4_MARKS", "L2_MARKS", "GrigorchukGroup", "GrigorchukLimit", "StabilizationError",
    "limit_ball", "marked_G4", "marked_L2", "SequenceClass", "SequenceError", "SequenceReader",
    "TernarySequence", "classify", "shift", "is_trivial", "order",
]
