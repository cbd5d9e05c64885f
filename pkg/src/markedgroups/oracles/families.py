"""Catalog families with exact normal forms."""

from __future__ import annotations

from typing import Iterator

from markedgroups.oracles.base import NormalFormGroup, OrderResult
from markedgroups.words import Word, free_reduce


class _TorsionFree(NormalFormGroup):
    """Families known to be torsion-free: every nontrivial element has
    infinite order, so no powering is needed."""

    def element_order(self, word, budget: int) -> OrderResult:
        if self.oracle(word).is_trivial:
            return OrderResult(1)
        return OrderResult(None, infinite=True, note="torsion-free family")


class FreeGroup(_TorsionFree):
    def __init__(self, n: int):
        self.arity = n
        self.spec = f"free:{n}"

    def start(self) -> Word:
        return ()

    def step(self, state: Word, letter: int) -> Word:
        if state and state[-1] == -letter:
            return state[:-1]
        return state + (letter,)

    def key(self, word) -> Word:
        self._check(word)
        return free_reduce(word)


class FreeAbelianGroup(_TorsionFree):
    """Z^n marked by the standard basis; normal form = exponent vector."""

    def __init__(self, n: int):
        self.arity = n
        self.spec = f"abelian:{n}"

    def start(self) -> tuple[int, ...]:
        return (0,) * self.arity

    def step(self, state, letter):
        i = abs(letter) - 1
        s = list(state)
        s[i] += 1 if letter > 0 else -1
        return tuple(s)


class CyclicGroup(NormalFormGroup):
    """Z/k marked by (1, 0) inside G_2."""

    def __init__(self, k: int):
        self.k = k
        self.arity = 2
        self.spec = f"cyclic:{k}"

    def start(self) -> int:
        return 0

    def step(self, state, letter):
        if letter == 1:
            return (state + 1) % self.k
        if letter == -1:
            return (state - 1) % self.k
        return state


class HeisenbergGroup(_TorsionFree):
    """Integer Heisenberg group marked by x, y; state (p, q, r) = x^p y^q z^r.

    Concretely the upper unitriangular matrix [[1, p, r], [0, 1, q], [0, 0, 1]].
    """

    arity = 2
    spec = "heisenberg"

    def start(self):
        return (0, 0, 0)

    def step(self, state, letter):
        p, q, r = state
        if letter == 1:
            return (p + 1, q, r)
        if letter == -1:
            return (p - 1, q, r)
        if letter == 2:
            return (p, q + 1, r + p)
        return (p, q - 1, r - p)


class BaumslagSolitarGroup(_TorsionFree):
    """B(m, n) = <a, t | t a^m t^-1 = a^n>, marked (a, t).

    Britton normal form: a^k0 t^e1 a^r1 ... t^es a^rs with 0 <= r_i < m
    after t and 0 <= r_i < n after t^-1, and no pinch t^e a^0 t^-e.
    Appending a letter only ever rewrites the tail, carrying powers of a
    leftwards through t a^m = a^n t and t^-1 a^n = a^m t^-1.
    """

    def __init__(self, m: int, n: int):
        self.m = m
        self.n = n
        self.arity = 2
        self.spec = f"bs:{m},{n}"

    def start(self):
        return (0, ())

    def _normalize(self, k: int, syl: list[list[int]]) -> tuple:
        i = len(syl) - 1
        while i >= 0:
            e, r = syl[i]
            mod = self.m if e == 1 else self.n
            q, r2 = divmod(r, mod)
            if q == 0:
                break
            syl[i][1] = r2
            carry = q * (self.n if e == 1 else self.m)
            if i == 0:
                k += carry
            else:
                syl[i - 1][1] += carry
            i -= 1
        return (k, tuple(tuple(s) for s in syl))

    def step(self, state, letter):
        k, syls = state
        syl = [list(s) for s in syls]
        if abs(letter) == 1:
            d = 1 if letter > 0 else -1
            if not syl:
                return (k + d, ())
            syl[-1][1] += d
            return self._normalize(k, syl)
        e = 1 if letter > 0 else -1
        if syl and syl[-1][0] == -e and syl[-1][1] == 0:
            syl.pop()
            return (k, tuple(tuple(s) for s in syl))
        syl.append([e, 0])
        return (k, tuple(tuple(s) for s in syl))


class LamplighterGroup(NormalFormGroup):
    """Z_2 wreath Z marked by (lamp toggle a, shift t).

    State is (lit lamp positions, cursor).  Words act left to right:
    ``a`` toggles the lamp under the cursor, ``t`` moves the cursor.
    """

    arity = 2
    spec = "lamplighter"

    def start(self):
        return (frozenset(), 0)

    def step(self, state, letter):
        lamps, pos = state
        if abs(letter) == 1:
            return (lamps ^ {pos}, pos)
        return (lamps, pos + (1 if letter > 0 else -1))

    def element_order(self, word, budget: int) -> OrderResult:
        lamps, pos = self.evaluate(free_reduce(word))
        if pos != 0:
            return OrderResult(None, infinite=True, note="cursor moves")
        return OrderResult(2 if lamps else 1)

    # Følner boxes live in left-translation coordinates:
    #   F_w = {(M, q) : -w < q <= 0, M subset of [q, q + w)}.
    # Lamp sets are bitmasks, bit j standing for position j - (w + 1), so
    # one left translation by t or T stays representable.
    @staticmethod
    def left_box(width: int) -> Iterator[tuple[int, int]]:
        off = width + 1
        for q in range(-width + 1, 1):
            for sub in range(1 << width):
                yield (sub << (q + off), q)

    @staticmethod
    def in_left_box(elem: tuple[int, int], width: int) -> bool:
        mask, q = elem
        if not -width < q <= 0:
            return False
        lo = q + width + 1
        return mask >> lo << lo == mask and mask >> (lo + width) == 0

    @staticmethod
    def left_translate(elem: tuple[int, int], letter: int, width: int) -> tuple[int, int]:
        """``letter * elem`` for a box element in bitmask coordinates."""
        mask, q = elem
        if abs(letter) == 1:
            return (mask ^ (1 << (width + 1)), q)
        if letter > 0:
            return (mask << 1, q + 1)
        return (mask >> 1, q - 1)

    @staticmethod
    def box_element_word(elem: tuple[int, int], width: int) -> Word:
        mask, q = elem
        off = width + 1
        out: list[int] = []
        pos = 0
        for p in (j - off for j in range(mask.bit_length()) if mask >> j & 1):
            out.extend([2 if p > pos else -2] * abs(p - pos))
            out.append(1)
            pos = p
        out.extend([2 if q > pos else -2] * abs(q - pos))
        return free_reduce(out)


class _SymShiftBase(NormalFormGroup):
    """Shared update rule for Sym_f(Z) x| Z and S_k x| Z_k.

    An element is the pair (pi, j) acting by x -> pi(x) + j.  Appending
    the transposition composes pi with (-j, 1-j) on the left; appending the
    shift changes j.
    """

    arity = 2
    modulus: int | None = None

    def _wrap(self, x: int) -> int:
        return x % self.modulus if self.modulus else x

    def start(self):
        return ((), 0)

    def step(self, state, letter):
        moved, j = state
        if abs(letter) == 2:
            j += 1 if letter > 0 else -1
            return (moved, self._wrap(j))
        pi = dict(moved)
        u, v = self._wrap(-j), self._wrap(1 - j)
        inv = {val: x for x, val in pi.items()}
        xu = inv.get(u, u)
        xv = inv.get(v, v)
        pi[xu] = v
        pi[xv] = u
        moved = tuple(sorted((x, y) for x, y in pi.items() if x != y))
        return (moved, j)


class SymShiftGroup(_SymShiftBase):
    """Finitely supported permutations of Z extended by the shift, marked
    by the transposition (0 1) and the shift."""

    spec = "symshift"

    def element_order(self, word, budget: int) -> OrderResult:
        _, j = self.evaluate(free_reduce(word))
        if j != 0:
            return OrderResult(None, infinite=True, note="nonzero shift")
        return super().element_order(word, budget)


class SymShiftFiniteGroup(_SymShiftBase):
    """S_k x| Z_k with the same marking as :class:`SymShiftGroup`."""

    def __init__(self, k: int):
        self.k = k
        self.modulus = k
        self.spec = f"symshift_fin:{k}"

