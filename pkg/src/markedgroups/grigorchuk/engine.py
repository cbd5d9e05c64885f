"""Tree automorphisms a, b_alpha, c_alpha, d_alpha and the algorithms on them.

Words act on the right: in ``uv`` the letter ``u`` moves a vertex first.
With that convention the section of a product is
``(uv)_x = u_x v_{u(x)}`` and the square of a root-swapping element has
section ``w_0 w_1`` at vertex 0.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from markedgroups.oracles.base import NONTRIVIAL, TRIVIAL, OrderResult, Verdict
from markedgroups.grigorchuk.sequences import SequenceReader, TernarySequence

LETTERS = "abcd"

# symbol -> section of b, c, d under branch 0 ("a" or "" for the identity)
TABLES = {
    "b": ("a", "a", ""),
    "c": ("a", "", "a"),
    "d": ("", "a", "a"),
}

_KLEIN = {
    ("b", "c"): "d", ("c", "b"): "d",
    ("c", "d"): "b", ("d", "c"): "b",
    ("b", "d"): "c", ("d", "b"): "c",
}


class GrigWordError(ValueError):
    pass


def reduce(raw: str) -> str:
    """Canonical alternating form: a^2 = b^2 = c^2 = d^2 = 1, bc = d, ..."""
    stack: list[str] = []
    for pos, ch in enumerate(raw):
        if ch not in LETTERS:
            raise GrigWordError(f"unknown letter {ch!r} at position {pos} in {raw!r}")
        if not stack:
            stack.append(ch)
        elif ch == "a":
            if stack[-1] == "a":
                stack.pop()
            else:
                stack.append(ch)
        elif stack[-1] == "a":
            stack.append(ch)
        else:
            top = stack.pop()
            if top != ch:
                stack.append(_KLEIN[top, ch])
    return "".join(stack)


def inverse(w: str) -> str:
    # every generator is an involution
    return w[::-1]


def root_perm(w: str) -> int:
    """1 if w swaps the two first-level vertices, else 0."""
    return w.count("a") % 2


def _sections(w: str, symbol: int) -> tuple[str, str]:
    parts: list[list[str]] = [[], []]
    for start in (0, 1):
        s = start
        for ch in w:
            if ch == "a":
                s ^= 1
            elif s == 0:
                parts[start].append(TABLES[ch][symbol])
            else:
                parts[start].append(ch)
    return reduce("".join(parts[0])), reduce("".join(parts[1]))


@dataclass(frozen=True)
class Decomposition:
    w0: str
    w1: str
    swap: bool

    def to_json(self) -> dict:
        return {"w0": self.w0 or "1", "w1": self.w1 or "1",
                "perm": "swap" if self.swap else "id"}


def wreath_decompose(w: str, alpha: TernarySequence) -> Decomposition:
    """Sections at 0 and 1 (words in the generators of G_{shift alpha}) and
    the root permutation."""
    w = reduce(w)
    w0, w1 = _sections(w, alpha[0])
    return Decomposition(w0, w1, bool(root_perm(w)))


def act(alpha: TernarySequence, w: str, vertex: str) -> str:
    """Image of a vertex (binary string) under w, letters applied in order."""
    if set(vertex) - set("01"):
        raise GrigWordError(f"vertex must be a binary string, got {vertex!r}")
    v = list(vertex)
    n = len(v)
    for pos, ch in enumerate(w):
        if ch not in LETTERS:
            raise GrigWordError(f"unknown letter {ch!r} at position {pos} in {w!r}")
        if not n:
            continue
        if ch == "a":
            v[0] = "1" if v[0] == "0" else "0"
            continue
        # walk down the 1-branch to the first 0, then apply the table there
        try:
            j = v.index("0")
        except ValueError:
            continue
        if j + 1 < n and TABLES[ch][alpha[j]] == "a":
            v[j + 1] = "1" if v[j + 1] == "0" else "0"
    return "".join(v)


class _Budget(Exception):
    pass


class Engine:
    """Word problem and element orders in G_alpha.

    All reads of alpha go through ``self.reader`` so callers can see how
    much of the sequence a computation depended on.  The triviality memo
    is keyed by absolute depth, so a memo hit never hides a read.
    """

    def __init__(self, alpha: TernarySequence):
        self.alpha = alpha
        self.reader = SequenceReader(alpha)
        self._trivial_memo: dict[tuple[int, str], bool] = {}

    # -- word problem ------------------------------------------------------

    def _letter_trivial(self, x: str, depth: int) -> bool:
        table = TABLES[x]
        a = self.alpha
        stop = max(depth, len(a.prefix)) + a.period
        for j in range(depth, stop):
            if table[self.reader[j]] == "a":
                return False
        return True

    def _trivial(self, w: str, depth: int, counter: list[int], budget: int) -> bool:
        if not w:
            return True
        if len(w) == 1:
            return w != "a" and self._letter_trivial(w, depth)
        if root_perm(w):
            return False
        key = (depth, w)
        hit = self._trivial_memo.get(key)
        if hit is not None:
            return hit
        counter[0] += 1
        if counter[0] > budget:
            raise _Budget
        w0, w1 = _sections(w, self.reader[depth])
        res = (self._trivial(w0, depth + 1, counter, budget)
               and self._trivial(w1, depth + 1, counter, budget))
        self._trivial_memo[key] = res
        return res

    def is_trivial(self, w: str, budget: int = 10**6, depth: int = 0) -> Verdict:
        w = reduce(w)
        counter = [0]
        try:
            ok = self._trivial(w, depth, counter, budget)
        except _Budget:
            return Verdict.unknown(f"recursion budget {budget} nodes exhausted")
        return TRIVIAL if ok else NONTRIVIAL

    # -- orders ------------------------------------------------------------

    def order(self, w: str, budget: int = 10**6) -> OrderResult:
        """Order of w, from order(w) = lcm(order(w0), order(w1)) when w fixes
        the root and order(w) = 2 order(w0 w1) when it swaps.

        A repeat of (offset, word) along the recursion path that passes a
        swap step forces order(w) >= 2 order(w), so the element has
        infinite order.  A repeat through lcm steps only adds nothing.
        """
        w = reduce(w)
        alpha = self.alpha
        memo: dict[tuple[int, str], int | None] = {}
        on_path: dict[tuple[int, str], int] = {}
        swaps: list[int] = []  # swaps[j]: edge from path node j to j+1 swaps
        count = [0]
        big = sys.maxsize

        def rec(u: str, i: int) -> tuple[int | None, int]:
            key = (i, u)
            if key in memo:
                return memo[key], big
            if key in on_path:
                pos = on_path[key]
                if any(swaps[pos:]):
                    return None, pos
                return 1, pos
            if not u:
                return 1, big
            if u == "a":
                return 2, big
            if len(u) == 1:
                return (1 if self._letter_trivial(u, i) else 2), big
            count[0] += 1
            if count[0] > budget:
                raise _Budget
            d = len(on_path)
            on_path[key] = d
            w0, w1 = _sections(u, alpha[i])
            nxt = alpha.reduce_offset(i + 1)
            if root_perm(u):
                swaps.append(1)
                o, low = rec(reduce(w0 + w1), nxt)
                swaps.pop()
                val = None if o is None else 2 * o
            else:
                swaps.append(0)
                o0, l0 = rec(w0, nxt)
                o1, l1 = (None, big) if o0 is None else rec(w1, nxt)
                swaps.pop()
                low = min(l0, l1)
                val = None if o0 is None or o1 is None else math.lcm(o0, o1)
            del on_path[key]
            if val is None or low >= d:
                memo[key] = val
            return val, low

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 20000))
        try:
            m, _ = rec(w, alpha.reduce_offset(0))
        except _Budget:
            return OrderResult(None, note=f"recursion budget {budget} nodes exhausted")
        finally:
            sys.setrecursionlimit(old)
        if m is None:
            return OrderResult(None, infinite=True,
                               note="section recursion returns to itself through a root swap")
        if m > budget:
            return OrderResult(None, note=f"order {m} exceeds budget {budget}")
        if not self.verify_order(w, m):
            return OrderResult(None, note=f"candidate order {m} failed verification")
        return OrderResult(m)

    def verify_order(self, w: str, m: int) -> bool:
        """w^m trivial and w^(m/p) nontrivial for every prime p | m."""
        if not self.is_trivial(w * m).is_trivial:
            return False
        for p in _prime_factors(m):
            if self.is_trivial(w * (m // p)).is_trivial:
                return False
        return True


def _prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out
