"""Finite-scale checks of group properties.

Exact verdicts come only from genuinely finite questions (commutators of
the marked generators, a given finite set).  Everything quantifying over
infinitely many words reports the scale it looked at.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from markedgroups.oracles.base import (ElementIndex, MarkedGroup, MarkedGroupError,
                                       UnknownVerdictError)
from markedgroups.oracles.families import LamplighterGroup
from markedgroups.space import ball
from markedgroups.words import (Word, concat, derived_witnesses, enumerate_words, format_word,
                                free_reduce, inverse, letter_order, simple_commutator,
                                substitute)

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
EXACT, AT_SCALE = "exact", "at_scale"


@dataclass
class ProbeVerdict:
    status: str
    level: str
    witness: Any = None
    scale: dict[str, Any] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status, "level": self.level}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.scale:
            out["scale"] = self.scale
        if self.details:
            out["details"] = self.details
        return out


def _trivial(g: MarkedGroup, w: Sequence[int]) -> bool:
    return g.is_identity(w)


# -- commutator checks -------------------------------------------------------

def abelian_check(g: MarkedGroup) -> ProbeVerdict:
    for i, j in itertools.combinations(range(1, g.arity + 1), 2):
        c = simple_commutator((i, j))
        if not _trivial(g, c):
            return ProbeVerdict(FAILS, EXACT, format_word(c))
    return ProbeVerdict(HOLDS, EXACT)


def nilpotency_class_probe(g: MarkedGroup, k: int) -> ProbeVerdict:
    """Class <= k iff every left-normed [g_i1, ..., g_i(k+1)] is trivial."""
    if k < 1:
        raise ValueError("nilpotency class bound must be >= 1")
    for idx in itertools.product(range(1, g.arity + 1), repeat=k + 1):
        c = simple_commutator(idx)
        if c and not _trivial(g, c):
            return ProbeVerdict(FAILS, EXACT, format_word(c), details={"indices": list(idx)})
    return ProbeVerdict(HOLDS, EXACT, details={"checked": g.arity ** (k + 1)})


def solvable_degree_probe(g: MarkedGroup, k: int, max_len: int) -> ProbeVerdict:
    """Fails with a nontrivial element of the k-th derived subgroup of the
    free group, if one of length <= max_len exists; otherwise Holds at
    that scale.  A Fails witness certifies derived length > k."""
    scale = {"degree": k, "max_len": max_len}
    checked = 0
    for w in derived_witnesses(g.arity, k, max_len):
        checked += 1
        if not _trivial(g, w):
            return ProbeVerdict(FAILS, EXACT, format_word(w), scale,
                                {"witnesses_checked": checked})
    return ProbeVerdict(HOLDS, AT_SCALE, None, scale, {"witnesses_checked": checked})


# -- torsion -----------------------------------------------------------------

def torsion_probe(g: MarkedGroup, max_len: int, order_budget: int) -> dict[str, Any]:
    """Orders of the nontrivial elements in the ball of radius max_len."""
    b = ball(g, max_len)
    rows = []
    finite = unbounded = certified_infinite = 0
    for w in b.words[1:]:
        r = g.element_order(w, order_budget)
        row: dict[str, Any] = {"word": format_word(w), "order": r.value}
        if r.value is None:
            unbounded += 1
            row["exceeds_budget"] = True
            if r.infinite:
                certified_infinite += 1
                row["certified_infinite"] = True
        else:
            finite += 1
        rows.append(row)
    if unbounded == 0:
        summary = "periodic-consistent"
    elif finite == 0:
        summary = "torsion-free-consistent"
    else:
        summary = "mixed"
    return {"elements": rows, "summary": summary, "finite": finite,
            "exceeds_budget": unbounded, "certified_infinite": certified_infinite,
            "scale": {"max_len": max_len, "order_budget": order_budget}}


# -- Følner sets -------------------------------------------------------------

def _dedupe(g: MarkedGroup, F: Iterable[Sequence[int]]) -> ElementIndex:
    index = ElementIndex(g)
    for w in F:
        index.find_or_add(free_reduce(w))
    return index


def _ratio_on_index(index: ElementIndex, gen: Word) -> Fraction:
    outside = 0
    for w in index.reps:
        if index.find(concat(gen, w)) is None:
            outside += 1
    # left multiplication is a bijection, so |gF \ F| = |F \ gF|
    return Fraction(2 * outside, len(index))


def folner_ratio(g: MarkedGroup, F: Sequence[Sequence[int]], gen: Sequence[int]) -> Fraction:
    """|gen F delta F| / |F| for the set of elements represented by F."""
    if not F:
        raise MarkedGroupError("Følner set must be nonempty")
    return _ratio_on_index(_dedupe(g, F), free_reduce(gen))


def lamplighter_box_ratio(width: int, letter: int) -> Fraction:
    """Exact ratio for the width-w box under left multiplication by a
    generator letter.

    A generator moves the lamp pattern along with the cursor or toggles a
    lamp inside the window, so whether an element leaves the box depends
    on its cursor only.  Each cursor is decided on the empty and the full
    pattern (which must agree) and weighted by the 2^w patterns.
    """
    off = width + 1
    full = (1 << width) - 1
    outside = 0
    for q in range(-width + 1, 1):
        left = [not LamplighterGroup.in_left_box(
                    LamplighterGroup.left_translate((sub << (q + off), q), letter, width), width)
                for sub in (0, full)]
        if left[0] != left[1]:
            raise MarkedGroupError("box membership depends on the lamp pattern")
        outside += left[0]
    return Fraction(2 * outside, width)


@dataclass
class FolnerResult:
    found: bool
    strategy: str
    ratios: dict[str, Fraction]
    parameter: int | None
    size: int | None
    best_max_ratio: Fraction | None
    words: list[Word] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "found": self.found,
            "strategy": self.strategy,
            "ratios": {k: str(v) for k, v in sorted(self.ratios.items())},
            "best_max_ratio": None if self.best_max_ratio is None else str(self.best_max_ratio),
        }
        key = "width" if self.strategy == "boxes" else "radius"
        out[key] = self.parameter
        out["size"] = self.size
        return out


def folner_search(g: MarkedGroup, K: Sequence[Sequence[int]], m: int, strategy: str = "balls",
                  budget: int = 200_000, max_param: int = 64) -> FolnerResult:
    """Look for F with folner ratio <= 1/m for every element of K.

    ``balls`` tries metric balls of growing radius; ``boxes`` (lamplighter
    only, generator letters only) tries the boxes of growing width.
    ``budget`` caps the candidate set size.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    target = Fraction(1, m)
    K = [free_reduce(k) for k in K]
    best: tuple[Fraction, dict[str, Fraction], int, int] | None = None

    def consider(ratios: dict[str, Fraction], param: int, size: int) -> bool:
        nonlocal best
        worst = max(ratios.values())
        if best is None or worst < best[0]:
            best = (worst, ratios, param, size)
        return worst <= target

    if strategy == "boxes":
        if not isinstance(g, LamplighterGroup):
            raise MarkedGroupError("the boxes strategy is only defined for the lamplighter group")
        if any(len(k) != 1 for k in K):
            raise MarkedGroupError("the boxes strategy takes generator letters only")
        # nothing is materialized, so the size budget does not apply
        for width in range(1, max_param + 1):
            size = width << width
            ratios = {format_word(k): lamplighter_box_ratio(width, k[0]) for k in K}
            if consider(ratios, width, size):
                return FolnerResult(True, "boxes", ratios, width, size, max(ratios.values()))
    elif strategy == "balls":
        from markedgroups.space import BallBuilder, _tuned

        builder = BallBuilder(_tuned(g, max_param), vertex_cap=budget)
        previous = 0
        for radius in range(0, max_param + 1):
            try:
                words = builder.ball(radius).words
            except MarkedGroupError:
                break
            if len(words) == previous:
                break  # the ball is the whole (finite) group and was tried already
            previous = len(words)
            index = _dedupe(g, words)
            ratios = {format_word(k): _ratio_on_index(index, k) for k in K}
            if consider(ratios, radius, len(index)):
                return FolnerResult(True, "balls", ratios, radius, len(index),
                                    max(ratios.values()), list(words))
    else:
        raise ValueError(f"unknown Følner strategy {strategy!r}")
    if best is None:
        return FolnerResult(False, strategy, {}, None, None, None)
    return FolnerResult(False, strategy, best[1], best[2], best[3], best[0])


# -- endomorphisms -----------------------------------------------------------

def endo_probe(g: MarkedGroup, images: Sequence[Sequence[int]], L: int,
               L_prime: int | None = None) -> dict[str, ProbeVerdict]:
    """Is g_i -> images[i] a well-defined, injective, surjective
    endomorphism, as far as words of length <= L (and preimages of length
    <= L_prime) can tell?"""
    n = g.arity
    if len(images) != n:
        raise MarkedGroupError(f"need {n} images, got {len(images)}")
    images = [free_reduce(w, n) for w in images]
    if L_prime is None:
        L_prime = 2 * L
    scale = {"L": L, "L_prime": L_prime}
    words = list(enumerate_words(n, L))

    source = ElementIndex(g)
    classes: list[int] = []
    for w in words:
        classes.append(source.find_or_add(w)[0])

    # well-defined: equal sources have equal images
    welldefined = ProbeVerdict(HOLDS, AT_SCALE, scale=scale)
    first_image: dict[int, Word] = {}
    first_word: dict[int, Word] = {}
    for w, c in zip(words, classes):
        img = substitute(w, images)
        if c not in first_image:
            first_image[c] = img
            first_word[c] = w
        elif not g.equal(img, first_image[c]):
            welldefined = ProbeVerdict(FAILS, EXACT, [format_word(first_word[c]), format_word(w)],
                                       scale)
            break

    # injective: equal images come from equal sources
    injective = ProbeVerdict(HOLDS, AT_SCALE, scale=scale)
    target = ElementIndex(g)
    owner: dict[int, int] = {}
    for c in sorted(first_image):
        t, new = target.find_or_add(first_image[c])
        if not new and owner[t] != c:
            injective = ProbeVerdict(FAILS, EXACT,
                                     [format_word(first_word[owner[t]]), format_word(first_word[c])],
                                     scale)
            break
        owner.setdefault(t, c)

    # surjective: every element of the L-ball is an image of a short word
    reach = ElementIndex(g)
    for w in enumerate_words(n, L_prime):
        reach.find_or_add(substitute(w, images))
    surjective = ProbeVerdict(HOLDS, AT_SCALE, scale=scale)
    for w in ball(g, L).words:
        if reach.find(w) is None:
            surjective = ProbeVerdict(FAILS, AT_SCALE, format_word(w), scale)
            break
    return {"welldefined": welldefined, "injective": injective, "surjective": surjective}


# -- finite index ------------------------------------------------------------

def subgroup_ball(g: MarkedGroup, A: Sequence[Word], B: int) -> ElementIndex:
    """Elements of <A> given by words of length <= B in the letters A^(+-1)."""
    letters = [free_reduce(a) for a in A] + [inverse(free_reduce(a)) for a in A]
    index = ElementIndex(g)
    index.add(())
    frontier = [()]
    for _ in range(B):
        nxt = []
        for w in frontier:
            for a in letters:
                i, new = index.find_or_add(concat(w, a))
                if new:
                    nxt.append(index.reps[i])
        if not nxt:
            break
        frontier = nxt
    return index


def index_probe(g: MarkedGroup, A: Sequence[Sequence[int]], j: int,
                B: int | None = None, max_cosets: int | None = None) -> ProbeVerdict:
    """Is [G : <A>] < j?  Left cosets are explored by multiplying
    representatives on the left by generators; two cosets merge when
    r'^-1 r is found among the elements of <A> of A-length <= B.

    A closed table with c < j cosets certifies index <= c.  Reaching j
    cosets with no merge found is separation at scale B only.
    """
    if j < 2:
        raise ValueError("j must be >= 2")
    A = [free_reduce(a, g.arity) for a in A]
    if B is None:
        B = 2 * max((len(a) for a in A), default=1) * j
    H = subgroup_ball(g, A, B)
    scale = {"B": B, "subgroup_elements": len(H)}
    reps: list[Word] = [()]
    queue = [0]
    qi = 0
    while qi < len(queue):
        r = reps[queue[qi]]
        qi += 1
        for x in letter_order(g.arity):
            cand = concat((x,), r)
            if any(H.find(concat(inverse(s), cand)) is not None for s in reps):
                continue
            reps.append(cand)
            queue.append(len(reps) - 1)
            if len(reps) >= j:
                return ProbeVerdict(FAILS, AT_SCALE, [format_word(w) for w in reps], scale,
                                    {"cosets_separated": len(reps)})
    return ProbeVerdict(HOLDS, EXACT, [format_word(w) for w in reps], scale,
                        {"cosets": len(reps)})


# -- local embeddings --------------------------------------------------------

def local_embedding_check(source: MarkedGroup, E: Sequence[Sequence[int]], target: MarkedGroup,
                          phi: Callable[[Word], Word] | None = None) -> ProbeVerdict:
    """Is phi, given on words of E and E.E, a multiplicative injection of
    the finite set E into the target?"""
    if phi is None:
        if source.arity != target.arity:
            raise MarkedGroupError("generator-induced map needs equal arities")
        phi = lambda w: w  # noqa: E731
    E = [free_reduce(w) for w in E]
    pool = list(dict.fromkeys(E + [concat(g, h) for g in E for h in E]))

    # well defined on E and E.E: equal sources, equal images
    src = ElementIndex(source)
    first: dict[int, Word] = {}
    for w in pool:
        i, new = src.find_or_add(w)
        if new:
            first[i] = w
        elif not target.equal(phi(w), phi(first[i])):
            return ProbeVerdict(FAILS, EXACT, [format_word(first[i]), format_word(w)],
                                details={"reason": "not well defined"})
    for g in E:
        for h in E:
            if not target.equal(phi(concat(g, h)), concat(phi(g), phi(h))):
                return ProbeVerdict(FAILS, EXACT, [format_word(g), format_word(h)],
                                    details={"reason": "not multiplicative"})
    img = ElementIndex(target)
    owner: dict[int, Word] = {}
    seen_src = ElementIndex(source)
    for w in E:
        _, new_src = seen_src.find_or_add(w)
        if not new_src:
            continue
        t, new = img.find_or_add(phi(w))
        if not new:
            return ProbeVerdict(FAILS, EXACT, [format_word(owner[t]), format_word(w)],
                                details={"reason": "not injective"})
        owner[t] = w
    return ProbeVerdict(HOLDS, EXACT, details={"elements": len(seen_src), "pool": len(pool)})


__all__ = [
    "ProbeVerdict", "abelian_check", "nilpotency_class_probe", "solvable_degree_probe",
    "torsion_probe", "folner_ratio", "folner_search", "lamplighter_box_ratio", "FolnerResult",
    "endo_probe", "index_probe", "subgroup_ball", "local_embedding_check", "UnknownVerdictError",
]
