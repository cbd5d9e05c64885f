"""Textual group specs: parsing, canonical text, and instantiation."""

from __future__ import annotations

from dataclasses import dataclass, field

from markedgroups.oracles.base import MarkedGroup, MarkedGroupError, RemarkedGroup
from markedgroups.oracles.closure import FinitelyPresentedGroup
from markedgroups.oracles.families import (BaumslagSolitarGroup, CyclicGroup, FreeAbelianGroup,
                                           FreeGroup, HeisenbergGroup, LamplighterGroup,
                                           SymShiftFiniteGroup, SymShiftGroup)
from markedgroups.words import MAX_ARITY, Word, WordError, format_word, parse_word


class SpecError(MarkedGroupError, ValueError):
    """Malformed or out-of-range group spec (a usage error at the CLI)."""

    def __init__(self, text: str, pos: int, msg: str):
        self.text = text
        self.pos = pos
        super().__init__(f"{msg} at position {pos} in spec {text!r}")


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    ints: tuple[int, ...] = ()
    seq: str | None = None
    words: tuple[Word, ...] = ()
    base: GroupSpec | None = field(default=None)

    @property
    def arity(self) -> int:
        k = self.kind
        if k in ("free", "abelian"):
            return self.ints[0]
        if k == "fp":
            return self.ints[0]
        if k == "remark":
            return len(self.words)
        if k == "grig" or k == "griglim":
            return 4
        return 2

    def text(self) -> str:
        k = self.kind
        if k in ("heisenberg", "lamplighter", "symshift"):
            return k
        if k in ("free", "abelian", "cyclic", "symshift_fin"):
            return f"{k}:{self.ints[0]}"
        if k == "bs":
            return f"bs:{self.ints[0]},{self.ints[1]}"
        if k in ("grig", "grigL", "griglim"):
            return f"{k}:{self.seq}"
        if k == "fp":
            return f"fp:{self.ints[0]}:" + ",".join(format_word(w) for w in self.words)
        assert self.base is not None
        return f"remark({self.base.text()};" + ",".join(format_word(w) for w in self.words) + ")"

    def __str__(self) -> str:
        return self.text()


_KINDS = ("free", "abelian", "cyclic", "heisenberg", "bs", "lamplighter", "symshift_fin",
          "symshift", "griglim", "grigL", "grig", "fp", "remark")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str, pos: int | None = None) -> SpecError:
        return SpecError(self.text, self.pos if pos is None else pos, msg)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, s: str) -> None:
        if not self.text.startswith(s, self.pos):
            found = self.peek() or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def integer(self, lo: int, what: str, hi: int | None = None) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error(f"expected an integer for {what}")
        v = int(self.text[start:self.pos])
        if v < lo or (hi is not None and v > hi):
            rng = f">= {lo}" if hi is None else f"in {lo}..{hi}"
            raise self.error(f"{what} must be {rng}, got {v}", start)
        return v

    def word(self, arity: int | None) -> Word:
        start = self.pos
        while self.peek().isalpha() or self.peek() == "1":
            self.pos += 1
        raw = self.text[start:self.pos]
        if not raw:
            raise self.error("expected a word")
        try:
            return parse_word(raw, arity)
        except WordError as exc:
            raise self.error(str(exc), start) from None

    def words(self, arity: int | None) -> tuple[Word, ...]:
        out = [self.word(arity)]
        while self.peek() == ",":
            self.pos += 1
            out.append(self.word(arity))
        return tuple(out)

    def sequence(self) -> str:
        from markedgroups.grigorchuk.sequences import SequenceError, TernarySequence

        start = self.pos
        depth_ok = False
        while self.pos < len(self.text) and self.text[self.pos] in "012()":
            ch = self.text[self.pos]
            self.pos += 1
            if ch == ")":
                depth_ok = True
                break
        raw = self.text[start:self.pos]
        if not depth_ok:
            raise self.error("expected a sequence PREFIX(TAIL) over 0,1,2", start)
        try:
            return TernarySequence.parse(raw).canonical_text()
        except SequenceError as exc:
            raise self.error(str(exc), start) from None

    def spec(self) -> GroupSpec:
        start = self.pos
        for kind in _KINDS:
            if self.text.startswith(kind, self.pos):
                nxt = self.text[self.pos + len(kind): self.pos + len(kind) + 1]
                # "grig" must not swallow "grigL"/"griglim", "symshift" not "symshift_fin"
                if nxt.isalnum() or nxt == "_":
                    continue
                self.pos += len(kind)
                return self._body(kind, start)
        raise self.error("unknown group family")

    def _body(self, kind: str, start: int) -> GroupSpec:
        if kind in ("heisenberg", "lamplighter", "symshift"):
            return GroupSpec(kind)
        if kind == "remark":
            self.expect("(")
            base = self.spec()
            self.expect(";")
            marks = self.words(base.arity)
            if len(marks) < 2:
                raise self.error("remark needs at least two marks")
            self.expect(")")
            return GroupSpec("remark", words=marks, base=base)
        self.expect(":")
        if kind in ("free", "abelian"):
            return GroupSpec(kind, (self.integer(1, "rank", MAX_ARITY),))
        if kind == "cyclic":
            return GroupSpec(kind, (self.integer(1, "cyclic order"),))
        if kind == "symshift_fin":
            return GroupSpec(kind, (self.integer(2, "cycle length"),))
        if kind == "bs":
            m = self.integer(1, "first exponent")
            self.expect(",")
            return GroupSpec(kind, (m, self.integer(1, "second exponent")))
        if kind in ("grig", "grigL", "griglim"):
            seq = self.sequence()
            if kind == "griglim" and len(seq[seq.index("(") + 1:-1]) != 1:
                raise self.error("griglim needs an eventually constant sequence", start)
            return GroupSpec(kind, seq=seq)
        if kind == "fp":
            n = self.integer(1, "rank", MAX_ARITY)
            self.expect(":")
            return GroupSpec(kind, (n,), words=self.words(n))
        raise self.error(f"unhandled family {kind}")  # pragma: no cover


def parse_spec(text: str) -> GroupSpec:
    p = _Parser(text.strip())
    spec = p.spec()
    if p.pos != len(p.text):
        raise p.error("unexpected trailing input")
    return spec


def canonical_spec(text: str) -> str:
    return parse_spec(text).text()


def instantiate(spec: GroupSpec | str, closure_budget: int = 20000) -> MarkedGroup:
    if isinstance(spec, str):
        spec = parse_spec(spec)
    k, ints = spec.kind, spec.ints
    if k == "free":
        return FreeGroup(ints[0])
    if k == "abelian":
        return FreeAbelianGroup(ints[0])
    if k == "cyclic":
        return CyclicGroup(ints[0])
    if k == "heisenberg":
        return HeisenbergGroup()
    if k == "bs":
        return BaumslagSolitarGroup(*ints)
    if k == "lamplighter":
        return LamplighterGroup()
    if k == "symshift":
        return SymShiftGroup()
    if k == "symshift_fin":
        return SymShiftFiniteGroup(ints[0])
    if k in ("grig", "grigL", "griglim"):
        from markedgroups.grigorchuk.groups import (GrigorchukLimit, TernarySequence,
                                                    marked_G4, marked_L2)

        alpha = TernarySequence.parse(spec.seq or "")
        if k == "grig":
            return marked_G4(alpha)
        if k == "grigL":
            return marked_L2(alpha)
        return GrigorchukLimit(alpha)
    if k == "fp":
        return FinitelyPresentedGroup(ints[0], spec.words, budget=closure_budget)
    if k == "remark":
        assert spec.base is not None
        base = instantiate(spec.base, closure_budget)
        return _remark(base, spec.words, spec.text())
    raise MarkedGroupError(f"unsupported spec {spec.text()}")


def _remark(base: MarkedGroup, marks: tuple[Word, ...], text: str) -> MarkedGroup:
    from markedgroups.grigorchuk.groups import GrigorchukGroup, GrigorchukLimit

    if isinstance(base, GrigorchukGroup):
        # compose the marks so level-action keys stay incremental
        return GrigorchukGroup(base.alpha, [base.translate(m) for m in marks], spec=text,
                               depth=base.depth, budget=base.budget)
    if isinstance(base, GrigorchukLimit):
        composed = [_grig_word(base.marks, m) for m in marks]
        return GrigorchukLimit(base.alpha, composed, spec=text, stability=base.stability,
                               cap=base.cap)
    return RemarkedGroup(base, marks, text)


def _grig_word(marks: tuple[str, ...], w: Word) -> str:
    from markedgroups.grigorchuk.engine import reduce

    return reduce("".join(marks[x - 1] if x > 0 else marks[-x - 1][::-1] for x in w))


CATALOG = (
    ("free:N", "N", "free group F_N"),
    ("abelian:N", "N", "free abelian group Z^N"),
    ("cyclic:K", "2", "Z/K marked (1, 0)"),
    ("heisenberg", "2", "integer Heisenberg group marked (x, y)"),
    ("bs:M,N", "2", "Baumslag-Solitar group <a, t | t a^M t^-1 = a^N> marked (a, t)"),
    ("lamplighter", "2", "Z_2 wreath Z marked (lamp, shift)"),
    ("symshift", "2", "finitary permutations of Z by Z, marked (transposition (0 1), shift)"),
    ("symshift_fin:K", "2", "S_K by Z_K, marked like symshift"),
    ("grig:SEQ", "4", "Grigorchuk group G_alpha marked (a, b, c, d)"),
    ("grigL:SEQ", "2", "subgroup L_alpha marked (d, ab)"),
    ("griglim:SEQ", "4", "limit point at an eventually constant sequence (balls only)"),
    ("fp:N:W,...", "N", "finitely presented group, budgeted semi-decision"),
    ("remark(SPEC;W,...)", "number of marks", "subgroup generated by the given words"),
)


def catalog() -> list[dict[str, str]]:
    return [{"form": f, "arity": a, "description": d} for f, a, d in CATALOG]

