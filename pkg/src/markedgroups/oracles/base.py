"""Marked groups as word-problem oracles.

A marked group on n generators is a normal subgroup N of F_n, and we only
ever touch it through a procedure deciding ``w in N``.  Families with a
normal form also expose element keys, which lets ball construction and
the probes bucket words by element instead of comparing pairwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Sequence

from markedgroups.words import (Word, WordError, concat, format_word, free_reduce,
                                inverse, substitute)


class MarkedGroupError(Exception):
    """Base class for computational failures (CLI exit code 1)."""


class UnknownVerdictError(MarkedGroupError):
    def __init__(self, group: str, word: Sequence[int], effort: str = ""):
        self.word = tuple(word)
        self.effort = effort
        super().__init__(
            f"{group}: no certified verdict for {format_word(word)}"
            + (f" ({effort})" if effort else ""))


class BudgetExceededError(MarkedGroupError):
    pass


@dataclass(frozen=True)
class Verdict:
    status: str  # "trivial", "nontrivial" or "unknown"
    effort: str | None = None

    @classmethod
    def unknown(cls, effort: str) -> Verdict:
        return cls("unknown", effort)

    @property
    def is_trivial(self) -> bool:
        return self.status == "trivial"

    @property
    def is_nontrivial(self) -> bool:
        return self.status == "nontrivial"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"

    def __str__(self) -> str:
        if self.effort:
            return f"{self.status} ({self.effort})"
        return self.status


TRIVIAL = Verdict("trivial")
NONTRIVIAL = Verdict("nontrivial")


@dataclass(frozen=True)
class OrderResult:
    """Order of an element; ``value is None`` means the budget ran out.

    ``infinite`` is set when the search certified infinite order.
    """

    value: int | None
    infinite: bool = False
    note: str = ""

    @property
    def finite(self) -> bool:
        return self.value is not None

    def to_json(self) -> dict[str, Any]:
        if self.value is not None:
            return {"order": self.value}
        out: dict[str, Any] = {"order": None, "exceeds_budget": True}
        if self.infinite:
            out["certified_infinite"] = True
        return out


class MarkedGroup:
    """A point of G_n given by a membership oracle for N.

    Subclasses override :meth:`oracle`.  ``key`` returns a hashable
    invariant of the element represented by a word (or None when the
    family has none).  With ``exact_keys`` the key is a normal form: equal
    keys mean equal elements.  Otherwise it is only a fingerprint: unequal
    keys still certify distinct elements, equal keys must be verified.
    """

    arity: int
    spec: str
    exact_keys: bool = False
    ball_only: bool = False

    def oracle(self, word: Sequence[int]) -> Verdict:
        raise NotImplementedError

    def key(self, word: Sequence[int]) -> Hashable | None:
        return None

    def is_identity(self, word: Sequence[int]) -> bool:
        v = self.oracle(word)
        if v.is_unknown:
            raise UnknownVerdictError(self.spec, word, v.effort or "")
        return v.is_trivial

    def equal(self, u: Sequence[int], v: Sequence[int]) -> bool:
        if self.exact_keys:
            return self.key(free_reduce(u)) == self.key(free_reduce(v))
        return self.is_identity(concat(u, inverse(v)))

    def element_order(self, word: Sequence[int], budget: int) -> OrderResult:
        """Least m <= budget with word^m trivial, by direct powering."""
        w = free_reduce(word)
        acc: Word = ()
        for m in range(1, budget + 1):
            acc = concat(acc, w)
            if self.is_identity(acc):
                return OrderResult(m)
        return OrderResult(None, note=f"no power up to {budget} is trivial")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"


class NormalFormGroup(MarkedGroup):
    """Groups given by an exact normal form, evaluated letter by letter.

    Subclasses define ``start()``, ``step(state, letter)`` and
    ``freeze(state)``; the frozen identity state decides triviality.
    """

    exact_keys = True

    def start(self) -> Any:
        raise NotImplementedError

    def step(self, state: Any, letter: int) -> Any:
        raise NotImplementedError

    def freeze(self, state: Any) -> Hashable:
        return state

    def _check(self, word: Sequence[int]) -> None:
        for x in word:
            if x == 0 or abs(x) > self.arity:
                raise WordError(f"letter {x} out of range for {self.spec}")

    def evaluate(self, word: Sequence[int]) -> Any:
        self._check(word)
        state = self.start()
        for x in word:
            state = self.step(state, x)
        return state

    def key(self, word: Sequence[int]) -> Hashable:
        return self.freeze(self.evaluate(word))

    def oracle(self, word: Sequence[int]) -> Verdict:
        return TRIVIAL if self.key(word) == self.identity_key else NONTRIVIAL

    @property
    def identity_key(self) -> Hashable:
        return self.freeze(self.start())

    def element_order(self, word: Sequence[int], budget: int) -> OrderResult:
        w = free_reduce(word)
        self._check(w)
        ident = self.identity_key
        state = self.start()
        for m in range(1, budget + 1):
            for x in w:
                state = self.step(state, x)
            if self.freeze(state) == ident:
                return OrderResult(m)
        return OrderResult(None, note=f"no power up to {budget} is trivial")


class RemarkedGroup(MarkedGroup):
    """(<marks>, marks): the subgroup generated by words in the old marking."""

    def __init__(self, base: MarkedGroup, marks: Sequence[Sequence[int]], spec: str | None = None):
        if len(marks) < 1:
            raise WordError("remark needs at least one mark")
        for m in marks:
            for x in m:
                if abs(x) > base.arity:
                    raise WordError(f"mark {format_word(m)} uses letters beyond arity {base.arity}")
        self.base = base
        self.marks = tuple(free_reduce(m) for m in marks)
        self.arity = len(self.marks)
        self.exact_keys = base.exact_keys
        self.spec = spec or (f"remark({base.spec};"
                             + ",".join(format_word(m) for m in self.marks) + ")")

    def translate(self, word: Sequence[int]) -> Word:
        return substitute(word, self.marks)

    def oracle(self, word: Sequence[int]) -> Verdict:
        return self.base.oracle(self.translate(word))

    def key(self, word: Sequence[int]) -> Hashable | None:
        return self.base.key(self.translate(word))

    def element_order(self, word: Sequence[int], budget: int) -> OrderResult:
        return self.base.element_order(self.translate(word), budget)

    def for_radius(self, radius: int) -> MarkedGroup:
        tune = getattr(self.base, "for_radius", None)
        if tune is None:
            return self
        # marks stretch words, so budget the base for the stretched length
        stretch = max((len(m) for m in self.marks), default=1) or 1
        return RemarkedGroup(tune(radius * stretch), self.marks, self.spec)


def remark(g: MarkedGroup, marks: Sequence[Sequence[int]]) -> MarkedGroup:
    if len(marks) < 2:
        raise WordError("remark needs at least two marks")
    return RemarkedGroup(g, marks)


class ElementIndex:
    """Buckets words by the group element they represent.

    Uses the group's keys when it has them; every merge through a
    fingerprint key, or through plain oracle comparison, is verified.
    """

    def __init__(self, group: MarkedGroup, use_keys: bool = True):
        self.group = group
        self.reps: list[Word] = []
        self._buckets: dict[Hashable, list[int]] = {}
        self._use_keys = use_keys and group.key(()) is not None
        self.verifications = 0
        self.collisions = 0

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def uses_keys(self) -> bool:
        return self._use_keys

    def key_of(self, word: Sequence[int]) -> Hashable | None:
        return self.group.key(word) if self._use_keys else None

    def find(self, word: Sequence[int], key: Hashable | None = None,
             candidates: Sequence[int] | None = None) -> int | None:
        """Index of the stored element equal to ``word``, or None.

        ``candidates`` restricts the oracle scan for keyless groups.
        """
        g = self.group
        if self._use_keys:
            if key is None:
                key = g.key(word)
            bucket = self._buckets.get(key, ())
            if g.exact_keys:
                return bucket[0] if bucket else None
            for i in bucket:
                self.verifications += 1
                if g.is_identity(concat(word, inverse(self.reps[i]))):
                    return i
                self.collisions += 1
            return None
        scan = range(len(self.reps)) if candidates is None else candidates
        for i in scan:
            self.verifications += 1
            if g.is_identity(concat(word, inverse(self.reps[i]))):
                return i
        return None

    def add(self, word: Sequence[int], key: Hashable | None = None) -> int:
        idx = len(self.reps)
        self.reps.append(tuple(word))
        if self._use_keys:
            if key is None:
                key = self.group.key(word)
            self._buckets.setdefault(key, []).append(idx)
        return idx

    def find_or_add(self, word: Sequence[int]) -> tuple[int, bool]:
        key = self.key_of(word)
        i = self.find(word, key)
        if i is not None:
            return i, False
        return self.add(word, key), True
