"""Finitely described ternary sequences: a prefix followed by a periodic tail."""

from __future__ import annotations

import re
from dataclasses import dataclass

_SEQ_RE = re.compile(r"^([012]*)\(([012]+)\)$")


class SequenceError(ValueError):
    pass


def _primitive_root(s: str) -> str:
    n = len(s)
    for d in range(1, n + 1):
        if n % d == 0 and s[:d] * (n // d) == s:
            return s[:d]
    return s


@dataclass(frozen=True)
class TernarySequence:
    """alpha = prefix + tail + tail + ...; raw form kept as given."""

    prefix: str
    tail: str

    def __post_init__(self):
        if not self.tail:
            raise SequenceError("tail must be nonempty")
        if set(self.prefix + self.tail) - set("012"):
            raise SequenceError(f"sequence symbols must be 0, 1 or 2: {self.prefix}({self.tail})")

    @classmethod
    def parse(cls, text: str) -> TernarySequence:
        m = _SEQ_RE.match(text.strip())
        if not m:
            raise SequenceError(f"expected PREFIX(TAIL) over 0,1,2, got {text!r}")
        return cls(m.group(1), m.group(2))

    def __getitem__(self, i: int) -> int:
        p = len(self.prefix)
        if i < p:
            return int(self.prefix[i])
        return int(self.tail[(i - p) % len(self.tail)])

    def head(self, n: int) -> str:
        return "".join(str(self[i]) for i in range(n))

    def canonical(self) -> TernarySequence:
        """Shortest prefix, primitive tail: one spelling per sequence."""
        prefix, tail = self.prefix, _primitive_root(self.tail)
        while prefix and prefix[-1] == tail[-1]:
            prefix = prefix[:-1]
            tail = tail[-1] + tail[:-1]
        return TernarySequence(prefix, tail)

    @property
    def text(self) -> str:
        return f"{self.prefix}({self.tail})"

    def canonical_text(self) -> str:
        return self.canonical().text

    def __str__(self) -> str:
        return self.text

    def same_as(self, other: TernarySequence) -> bool:
        return self.canonical() == other.canonical()

    @property
    def period(self) -> int:
        return len(_primitive_root(self.tail))

    def reduce_offset(self, i: int) -> int:
        """Smallest offset j with shift^j alpha == shift^i alpha (for memo keys)."""
        p = len(self.prefix)
        if i < p:
            return i
        return p + (i - p) % self.period

    def common_prefix_length(self, other: TernarySequence) -> int | None:
        """Length of the longest common prefix, None if the sequences agree."""
        horizon = (max(len(self.prefix), len(other.prefix))
                   + len(self.tail) * len(other.tail) + 1)
        for i in range(horizon):
            if self[i] != other[i]:
                return i
        return None


def shift(alpha: TernarySequence) -> TernarySequence:
    """Drop the first symbol; with an empty prefix the tail rotates."""
    if alpha.prefix:
        return TernarySequence(alpha.prefix[1:], alpha.tail)
    return TernarySequence("", alpha.tail[1:] + alpha.tail[0])


@dataclass(frozen=True)
class SequenceClass:
    in_E: bool
    in_I: bool
    in_C: bool = True

    def to_json(self) -> dict[str, bool]:
        return {"E": self.in_E, "I": self.in_I, "C": self.in_C}


def classify(alpha: TernarySequence) -> SequenceClass:
    """E: eventually constant; I: every symbol recurs; C: recursive (always)."""
    tail = _primitive_root(alpha.tail)
    return SequenceClass(in_E=len(tail) == 1, in_I=set(tail) == {"0", "1", "2"})


class SequenceReader:
    """Reads symbols of a sequence and remembers the deepest index touched."""

    def __init__(self, alpha: TernarySequence):
        self.alpha = alpha
        self.max_index = -1

    def __getitem__(self, i: int) -> int:
        if i > self.max_index:
            self.max_index = i
        return self.alpha[i]

    @property
    def symbols_read(self) -> int:
        return self.max_index + 1

    def reset(self) -> None:
        self.max_index = -1
