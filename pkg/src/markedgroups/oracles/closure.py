"""Budgeted membership in the normal closure of finitely many relators."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from markedgroups.oracles.base import TRIVIAL, MarkedGroup, Verdict
from markedgroups.words import Word, cyclic_reduce, format_word, free_reduce, inverse


def _canonical_cyclic(w: Word) -> Word:
    w = cyclic_reduce(w)
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def _pieces(relators: Sequence[Word]) -> list[tuple[Word, Word]]:
    """(u, v^-1) for every split rho = u v of every cyclic permutation of
    every relator and its inverse, with u nonempty or v the whole relator."""
    out = set()
    for r in relators:
        r = cyclic_reduce(r)
        if not r:
            continue
        for rr in (r, inverse(r)):
            for i in range(len(rr)):
                rho = rr[i:] + rr[:i]
                for cut in range(len(rho) + 1):
                    out.add((rho[:cut], inverse(rho[cut:])))
    return sorted(out, key=lambda p: (len(p[0]) - len(p[1]), p))


def closure_member(relators: Sequence[Sequence[int]], w: Sequence[int], budget: int,
                   slack: int | None = None) -> Verdict:
    """Search for a certificate that ``w`` lies in the normal closure.

    States are cyclic words up to rotation (conjugation preserves closure
    membership).  A move replaces a prefix u of some rotation by v^-1,
    where u v is a cyclic permutation of a relator or its inverse; each
    move multiplies by a conjugate of a relator, so reaching the empty word
    certifies membership.  Breadth-first, so shorter certificates come
    first.  Never answers nontrivial.
    """
    rels = [free_reduce(r) for r in relators]
    start = _canonical_cyclic(free_reduce(w))
    if not start:
        return TRIVIAL
    pieces = _pieces(rels)
    if not pieces:
        return Verdict.unknown("no relators")
    if slack is None:
        slack = max(len(r) for r in rels)
    cap = len(start) + slack
    seen = {start}
    queue = deque([start])
    expanded = 0
    while queue:
        if expanded >= budget:
            return Verdict.unknown(f"budget {budget} states exhausted, length cap {cap}")
        x = queue.popleft()
        expanded += 1
        for i in range(len(x)):
            rot = x[i:] + x[:i]
            for u, v_inv in pieces:
                if rot[:len(u)] != u:
                    continue
                y = _canonical_cyclic(v_inv + rot[len(u):])
                if not y:
                    return TRIVIAL
                if len(y) <= cap and y not in seen:
                    seen.add(y)
                    queue.append(y)
    return Verdict.unknown(f"search space exhausted at length cap {cap} after {expanded} states")


class FinitelyPresentedGroup(MarkedGroup):
    """<g_1..g_n | relators> with a semi-decision for the word problem."""

    def __init__(self, n: int, relators: Sequence[Sequence[int]], budget: int = 20000):
        self.arity = n
        self.relators = tuple(free_reduce(r) for r in relators)
        self.budget = budget
        self.spec = f"fp:{n}:" + ",".join(format_word(r) for r in self.relators)

    def oracle(self, word: Sequence[int]) -> Verdict:
        return closure_member(self.relators, word, self.budget)
