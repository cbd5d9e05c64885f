"""Free-group words over marked generators.

A word is a tuple of nonzero ints: ``i`` stands for the generator
gamma_i and ``-i`` for its inverse.  Everything here is pure and works on
plain tuples so that the hot loops (enumeration, ball BFS) stay cheap.

Text syntax: ``a``..``z`` are gamma_1..gamma_26, uppercase letters are
inverses, and the empty word is spelled ``1``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from typing import Iterable, Iterator, Sequence

Word = tuple[int, ...]

EMPTY: Word = ()
MAX_ARITY = 26


class WordError(ValueError):
    pass


def letter_order(arity: int) -> list[int]:
    """Letters in enumeration order: g1 < g1^-1 < g2 < g2^-1 < ..."""
    return [x for i in range(1, arity + 1) for x in (i, -i)]


def _check_letters(letters: Iterable[int], arity: int | None) -> None:
    for x in letters:
        if x == 0 or (arity is not None and abs(x) > arity):
            raise WordError(f"letter {x} out of range for arity {arity}")


def free_reduce(letters: Iterable[int], arity: int | None = None) -> Word:
    if arity is not None:
        letters = list(letters)
        _check_letters(letters, arity)
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise WordError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words: Sequence[int]) -> Word:
    return free_reduce(itertools.chain.from_iterable(words))


def is_reduced(w: Sequence[int]) -> bool:
    return all(a != -b for a, b in zip(w, w[1:]))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return tuple(w[i:j])


def power(w: Sequence[int], m: int) -> Word:
    if m < 0:
        return power(inverse(w), -m)
    return free_reduce(tuple(w) * m)


# -- text syntax -----------------------------------------------------------

def parse_word(text: str, arity: int | None = None) -> Word:
    text = text.strip()
    if text == "1" or text == "":
        return EMPTY
    letters = []
    for pos, ch in enumerate(text):
        if "a" <= ch <= "z":
            letters.append(ord(ch) - ord("a") + 1)
        elif "A" <= ch <= "Z":
            letters.append(-(ord(ch) - ord("A") + 1))
        else:
            raise WordError(f"bad character {ch!r} at position {pos} in word {text!r}")
        if arity is not None and abs(letters[-1]) > arity:
            raise WordError(
                f"letter {ch!r} at position {pos} exceeds arity {arity} in word {text!r}")
    return free_reduce(letters)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in w)


# -- enumeration -----------------------------------------------------------

def words_of_length(arity: int, length: int) -> Iterator[Word]:
    """Reduced words of exactly ``length`` letters, in lexicographic order."""
    letters = letter_order(arity)
    if length == 0:
        yield EMPTY
        return
    prefix: list[int] = []

    def extend(remaining: int) -> Iterator[Word]:
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            if remaining == 1:
                yield tuple(prefix)
            else:
                yield from extend(remaining - 1)
            prefix.pop()

    yield from extend(length)


def enumerate_words(arity: int, max_len: int) -> Iterator[Word]:
    """Every reduced word of length <= max_len exactly once, length-lex order."""
    if max_len < 0:
        raise WordError("max_len must be >= 0")
    for length in range(max_len + 1):
        yield from words_of_length(arity, length)


def enumerate_all(arity: int) -> Iterator[Word]:
    """The fixed enumeration (g_i) of the whole free group, g_0 = empty."""
    for length in itertools.count():
        yield from words_of_length(arity, length)


def count_reduced(arity: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * arity * (2 * arity - 1) ** (length - 1)


def word_sort_key(w: Sequence[int]) -> tuple:
    """Sort key matching the length-lex enumeration order."""
    return (len(w), tuple(2 * abs(x) - (x > 0) for x in w))


# -- algebra ---------------------------------------------------------------

def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    """[u, v] = u v u^-1 v^-1, freely reduced."""
    return concat(u, v, inverse(u), inverse(v))


def simple_commutator(indices: Sequence[int]) -> Word:
    """Left-normed commutator [g_i1, g_i2, ..., g_ik] = [[g_i1, g_i2], ...].

    Negative entries stand for inverse generators.
    """
    if not indices:
        raise WordError("simple_commutator needs at least one generator index")
    acc: Word = (indices[0],)
    for i in indices[1:]:
        acc = commutator(acc, (i,))
    return acc


def substitute(w: Sequence[int], images: Sequence[Sequence[int]],
               target_arity: int | None = None) -> Word:
    """Image of ``w`` under the endomorphism g_i -> images[i-1]."""
    for x in w:
        if abs(x) > len(images):
            raise WordError(f"letter {x} has no image (only {len(images)} images given)")
    if target_arity is not None:
        for img in images:
            _check_letters(img, target_arity)
    inv = [inverse(img) for img in images]
    return free_reduce(itertools.chain.from_iterable(
        images[x - 1] if x > 0 else inv[-x - 1] for x in w))


def exponent_sums(w: Sequence[int], arity: int) -> tuple[int, ...]:
    sums = [0] * arity
    for x in w:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


# -- derived-series witnesses ---------------------------------------------

def _second_derived_words(arity: int, length: int) -> Iterator[Word]:
    # Closed paths in the Z^n lattice with zero net flow on every edge are
    # exactly the elements of F'' (F'/F'' is the first homology of that graph).
    letters = letter_order(arity)
    pos = [0] * arity
    flow: Counter = Counter()
    word: list[int] = []
    nonzero = 0

    def dfs(remaining: int) -> Iterator[Word]:
        nonlocal nonzero
        if nonzero > remaining or sum(map(abs, pos)) > remaining:
            return
        if remaining == 0:
            yield tuple(word)
            return
        for x in letters:
            if word and word[-1] == -x:
                continue
            g = abs(x) - 1
            if x > 0:
                edge = (tuple(pos), g)
                step = 1
            else:
                pos[g] -= 1
                edge = (tuple(pos), g)
                pos[g] += 1
                step = -1
            old = flow[edge]
            new = old + step
            nonzero += (new != 0) - (old != 0)
            flow[edge] = new
            pos[g] += step
            word.append(x)
            yield from dfs(remaining - 1)
            word.pop()
            pos[g] -= step
            flow[edge] = old
            nonzero -= (new != 0) - (old != 0)

    yield from dfs(length)


def derived_witnesses(arity: int, degree: int, max_len: int) -> Iterator[Word]:
    """Nonempty reduced words of length <= max_len lying in F_n^(degree).

    Degrees 1 and 2 are enumerated exhaustively (exponent sums, lattice
    flows).  Degree >= 3 uses commutators of degree-(k-1) witnesses, which
    is a guaranteed subset but not exhaustive.  Output is length-lex.
    """
    if degree < 1:
        raise WordError("degree must be >= 1")
    if max_len < 0:
        raise WordError("max_len must be >= 0")
    if degree == 1:
        for w in enumerate_words(arity, max_len):
            if w and not any(exponent_sums(w, arity)):
                yield w
        return
    if degree == 2:
        for length in range(2, max_len + 1, 2):
            yield from _second_derived_words(arity, length)
        return
    lower = list(derived_witnesses(arity, degree - 1, max_len))
    found = set()
    for u, v in itertools.combinations(lower, 2):
        c = commutator(u, v)
        if c and len(c) <= max_len:
            found.add(c)
    yield from sorted(found, key=word_sort_key)
