"""G_alpha and L_alpha as marked groups, and limit points at eventually
constant sequences."""

from __future__ import annotations

import math
from typing import Hashable, Sequence

from markedgroups.grigorchuk.engine import Engine, act, reduce
from markedgroups.grigorchuk.sequences import TernarySequence, classify
from markedgroups.oracles.base import MarkedGroupError, MarkedGroup, OrderResult, Verdict
from markedgroups.words import WordError, format_word

G4_MARKS = ("a", "b", "c", "d")
L2_MARKS = ("d", "ab")

MAX_FINGERPRINT_DEPTH = 8  # 256 vertices, so level actions fit in bytes


class StabilizationError(MarkedGroupError):
    pass


def fingerprint_depth(radius: int) -> int:
    return max(3, min(MAX_FINGERPRINT_DEPTH, math.ceil(math.log2(radius + 1)) + 3))


class GrigorchukGroup(MarkedGroup):
    """G_alpha marked by words in a, b, c, d.

    Keys are level actions (bytes, one image per vertex of level D); equal
    keys do not imply equal elements, so index merges are verified.
    """

    exact_keys = False

    def __init__(self, alpha: TernarySequence, marks: Sequence[str] = G4_MARKS,
                 spec: str | None = None, depth: int = 4, budget: int = 10**6):
        self.alpha = alpha
        self.marks = tuple(reduce(m) for m in marks)
        self.arity = len(self.marks)
        self.depth = depth
        self.budget = budget
        if spec is None:
            kind = {G4_MARKS: "grig", L2_MARKS: "grigL"}.get(self.marks)
            if kind is None:
                raise WordError("custom Grigorchuk markings need an explicit spec")
            spec = f"{kind}:{alpha.text}"
        self.spec = spec
        self.engine = Engine(alpha)
        self._inverse_marks = tuple(m[::-1] for m in self.marks)
        self._letter_perm = self._build_perms(depth)
        self._key_cache: dict[tuple[int, ...], bytes] = {}

    def _build_perms(self, depth: int) -> dict[int, bytes]:
        verts = [format(i, f"0{depth}b") for i in range(1 << depth)]
        for j in range(depth):
            self.engine.reader[j]
        # padded to 256 entries so bytes.translate can compose them
        pad = bytes(range(len(verts), 256))
        perms = {}
        for i, m in enumerate(self.marks, start=1):
            perms[i] = bytes(int(act(self.alpha, m, v), 2) for v in verts) + pad
            perms[-i] = bytes(int(act(self.alpha, m[::-1], v), 2) for v in verts) + pad
        return perms

    def for_radius(self, radius: int) -> GrigorchukGroup:
        d = fingerprint_depth(radius)
        if d == self.depth:
            return self
        return GrigorchukGroup(self.alpha, self.marks, self.spec, depth=d, budget=self.budget)

    def translate(self, word: Sequence[int]) -> str:
        out = []
        for x in word:
            if x == 0 or abs(x) > self.arity:
                raise WordError(f"letter {x} out of range for {self.spec}")
            out.append(self.marks[x - 1] if x > 0 else self._inverse_marks[-x - 1])
        return reduce("".join(out))

    def oracle(self, word: Sequence[int]) -> Verdict:
        return self.engine.is_trivial(self.translate(word), self.budget)

    def key(self, word: Sequence[int]) -> Hashable:
        word = tuple(word)
        hit = self._key_cache.get(word)
        if hit is not None:
            return hit
        if not word:
            fp = bytes(range(1 << self.depth))
        else:
            parent = self._key_cache.get(word[:-1])
            if parent is None:
                parent = self.key(word[:-1])
            try:
                perm = self._letter_perm[word[-1]]
            except KeyError:
                raise WordError(f"letter {word[-1]} out of range for {self.spec}") from None
            fp = parent.translate(perm)
        if len(self._key_cache) < 1_000_000:
            self._key_cache[word] = fp
        return fp

    def element_order(self, word: Sequence[int], budget: int) -> OrderResult:
        return self.engine.order(self.translate(word), budget)

    def symbols_read(self) -> int:
        return self.engine.reader.symbols_read


def marked_G4(alpha: TernarySequence | str) -> GrigorchukGroup:
    if isinstance(alpha, str):
        alpha = TernarySequence.parse(alpha)
    return GrigorchukGroup(alpha, G4_MARKS)


def marked_L2(alpha: TernarySequence | str) -> GrigorchukGroup:
    if isinstance(alpha, str):
        alpha = TernarySequence.parse(alpha)
    return GrigorchukGroup(alpha, L2_MARKS)


def approximant(alpha: TernarySequence, m: int, tail: str = "012") -> TernarySequence:
    return TernarySequence(alpha.prefix + alpha.tail[0] * m, tail)


class GrigorchukLimit(MarkedGroup):
    """Limit point replacing G_alpha for eventually constant alpha.

    Only balls are available: a ball is read off the approximants
    prefix + c^m + (012) once its certificate stops changing.
    """

    ball_only = True

    def __init__(self, alpha: TernarySequence, marks: Sequence[str] = G4_MARKS,
                 spec: str | None = None, stability: int = 3, cap: int = 12,
                 approximant_tail: str = "012"):
        canon = alpha.canonical()
        if len(canon.tail) != 1:
            raise MarkedGroupError(
                f"limit replacement needs an eventually constant sequence, got {alpha.text}")
        if stability < 2:
            raise MarkedGroupError("stability must be at least 2")
        self.alpha = canon
        self.marks = tuple(reduce(m) for m in marks)
        self.arity = len(self.marks)
        self.stability = stability
        self.cap = cap
        self.approximant_tail = approximant_tail
        if spec is None:
            spec = f"griglim:{canon.text}"
            if self.marks != G4_MARKS:
                spec = f"remark({spec};" + ",".join(self.marks) + ")"
        self.spec = spec
        self.last_run: dict = {}

    def oracle(self, word: Sequence[int]) -> Verdict:
        raise MarkedGroupError(
            f"{self.spec}: limit points support ball queries only, not {format_word(word)}")

    def approximant_group(self, m: int, radius: int) -> GrigorchukGroup:
        beta = approximant(self.alpha, m, self.approximant_tail)
        return GrigorchukGroup(beta, self.marks, spec=f"approx[{beta.text}]",
                               depth=fingerprint_depth(radius * max(map(len, self.marks))))

    def limit_ball(self, radius: int, **ball_kwargs):
        from markedgroups.space import ball, canonical_certificate

        history: list[tuple[int, bytes]] = []
        reads = 0
        start = radius + 1
        for m in range(start, max(self.cap, start) + 1):
            g = self.approximant_group(m, radius)
            b = ball(g, radius, **ball_kwargs)
            reads = max(reads, min(g.symbols_read(), len(self.alpha.prefix) + m))
            history.append((m, canonical_certificate(b)))
            tail = history[-self.stability:]
            if len(tail) == self.stability and len({c for _, c in tail}) == 1:
                first_m = tail[0][0]
                self.last_run = {"approximants": [m for m, _ in history],
                                 "stable_from": first_m, "symbols_read": reads}
                b.group_spec = self.spec
                return b
        raise StabilizationError(
            f"{self.spec}: radius-{radius} ball did not stabilize over {self.stability} "
            f"consecutive approximants with m <= {self.cap}")


def limit_ball(alpha: TernarySequence | str, radius: int, stability: int = 3,
               marking: str = "G4", cap: int = 12):
    if isinstance(alpha, str):
        alpha = TernarySequence.parse(alpha)
    marks = G4_MARKS if marking == "G4" else L2_MARKS
    return GrigorchukLimit(alpha, marks, stability=stability, cap=cap).limit_ball(radius)


def is_limit_point(alpha: TernarySequence) -> bool:
    return classify(alpha).in_E
