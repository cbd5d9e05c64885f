"""Finite-resolution geometry of G_n: relation sets, Cayley balls, metrics,
growth tables and convergence tables."""

from __future__ import annotations

import math
import struct
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from markedgroups.oracles.base import (BudgetExceededError, ElementIndex, MarkedGroup,
                                       MarkedGroupError, UnknownVerdictError)
from markedgroups.words import (Word, enumerate_words, format_word, letter_order,
                                parse_word, words_of_length)

DEFAULT_VERTEX_CAP = 2_000_000
_CERT_MAGIC = b"MGB1"


def _slot(x: int) -> int:
    # position of a letter in enumeration order g1, g1^-1, g2, ...
    return 2 * (abs(x) - 1) + (x < 0)


# -- relation sets -----------------------------------------------------------

@dataclass(frozen=True)
class RelationSet:
    k: int
    members: frozenset[Word]

    def __contains__(self, w: Word) -> bool:
        return w in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted_words(self) -> list[str]:
        from markedgroups.words import word_sort_key
        return [format_word(w) for w in sorted(self.members, key=word_sort_key)]


def _verdict(g: MarkedGroup, w: Word) -> bool:
    v = g.oracle(w)
    if v.is_unknown:
        raise UnknownVerdictError(g.spec, w, v.effort or "")
    return v.is_trivial


def relation_set(g: MarkedGroup, k: int) -> RelationSet:
    """W(N, k): reduced words of length <= k that are trivial in g."""
    return RelationSet(k, frozenset(w for w in enumerate_words(g.arity, k) if _verdict(g, w)))


# -- balls -------------------------------------------------------------------

@dataclass
class CayleyBall:
    """B[N, k] with vertices numbered in breadth-first order.

    ``nbr[v][slot(x)]`` is the vertex reached from v along letter x, or -1
    when that neighbour lies outside the ball.  Edges are induced.
    """

    radius: int
    arity: int
    words: list[Word]
    distance: list[int]
    nbr: list[list[int]]
    group_spec: str = ""
    stats: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def num_vertices(self) -> int:
        return len(self.words)

    def edges(self) -> list[tuple[int, int, int]]:
        """(from, generator index, to) for positive generators."""
        out = []
        for v, row in enumerate(self.nbr):
            for i in range(1, self.arity + 1):
                t = row[2 * (i - 1)]
                if t >= 0:
                    out.append((v, i, t))
        return out

    def neighbor(self, v: int, letter: int) -> int:
        return self.nbr[v][_slot(letter)]

    def restrict(self, r: int) -> CayleyBall:
        if r > self.radius:
            raise MarkedGroupError(f"cannot restrict a radius-{self.radius} ball to radius {r}")
        keep = [v for v in range(len(self.words)) if self.distance[v] <= r]
        # BFS numbering puts closer vertices first, so keep is a prefix
        n = len(keep)
        nbr = [[t if 0 <= t < n else -1 for t in self.nbr[v]] for v in keep]
        return CayleyBall(r, self.arity, self.words[:n], self.distance[:n], nbr,
                          self.group_spec, dict(self.stats))

    def sphere_sizes(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for d in self.distance:
            out[d] += 1
        return out

    def growth(self) -> list[int]:
        acc, out = 0, []
        for s in self.sphere_sizes():
            acc += s
            out.append(acc)
        return out

    # serialization
    def to_json(self) -> dict[str, Any]:
        return {
            "radius": self.radius,
            "arity": self.arity,
            "group": self.group_spec,
            "vertices": [{"id": v, "distance": self.distance[v], "word": format_word(w)}
                         for v, w in enumerate(self.words)],
            "edges": [{"from": a, "label": f"g{i}", "to": b} for a, i, b in self.edges()],
            "certificate_hex": canonical_certificate(self).hex(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> CayleyBall:
        n = data["arity"]
        words = [parse_word(v["word"], n) for v in data["vertices"]]
        dist = [v["distance"] for v in data["vertices"]]
        nbr = [[-1] * (2 * n) for _ in words]
        for e in data["edges"]:
            i = int(e["label"][1:])
            nbr[e["from"]][2 * (i - 1)] = e["to"]
            nbr[e["to"]][2 * (i - 1) + 1] = e["from"]
        return cls(data["radius"], n, words, dist, nbr, data.get("group", ""))

    def to_dot(self) -> str:
        lines = ["digraph ball {", '  node [shape=circle];']
        for v, w in enumerate(self.words):
            shape = ", shape=doublecircle" if v == 0 else ""
            lines.append(f'  v{v} [label="{format_word(w)}"{shape}];')
        for a, i, b in self.edges():
            lines.append(f'  v{a} -> v{b} [label="g{i}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class BallBuilder:
    """Breadth-first construction of B[N, k], one layer at a time.

    Candidate words are ``rep(v) + x`` for v on the frontier and x in letter
    order; a candidate becomes a new vertex only after the index certifies
    it differs from every vertex it could equal (same or adjacent layer).
    """

    def __init__(self, g: MarkedGroup, mode: str = "auto", vertex_cap: int = DEFAULT_VERTEX_CAP,
                 threads: int = 1):
        if mode not in ("auto", "certified"):
            raise ValueError(f"unknown ball mode {mode!r}")
        self.g = g
        self.mode = mode
        self.vertex_cap = vertex_cap
        self.threads = max(1, threads)
        self.n = g.arity
        self.letters = letter_order(self.n)
        self.index = ElementIndex(g, use_keys=(mode == "auto"))
        self.index.add(())
        self.distance = [0]
        self.nbr: list[list[int]] = [[-1] * (2 * self.n)]
        self.layers: list[list[int]] = [[0]]
        self.explored = 0  # layers whose out-neighbours are all known

    def _keys(self, words: list[Word]) -> list[Any]:
        if not self.index.uses_keys:
            return [None] * len(words)
        if self.threads > 1 and len(words) > 256:
            with ThreadPoolExecutor(self.threads) as pool:
                return list(pool.map(self.g.key, words, chunksize=64))
        return [self.g.key(w) for w in words]

    def _explore(self, d: int, add: bool) -> dict[tuple[int, int], int]:
        """Resolve every neighbour of layer d.  With ``add`` unseen ones
        become layer d+1; otherwise they are reported as outside (-1)."""
        reps = self.index.reps
        todo: list[tuple[int, int, Word]] = []
        found: dict[tuple[int, int], int] = {}
        for v in self.layers[d]:
            w = reps[v]
            for x in self.letters:
                if w and w[-1] == -x:
                    found[v, x] = self._parent_of(v, w)
                    continue
                todo.append((v, x, w + (x,)))
        keys = self._keys([t[2] for t in todo])
        new_layer: list[int] = []
        near = self.layers[d - 1] if d > 0 else []
        for (v, x, cand), key in zip(todo, keys):
            cands = None
            if not self.index.uses_keys:
                cands = near + self.layers[d] + new_layer
            hit = self.index.find(cand, key, cands)
            if hit is None and add:
                if len(self.index) >= self.vertex_cap:
                    raise BudgetExceededError(
                        f"{self.g.spec}: ball exceeds the vertex cap of {self.vertex_cap}")
                hit = self.index.add(cand, key)
                self.distance.append(d + 1)
                self.nbr.append([-1] * (2 * self.n))
                new_layer.append(hit)
            found[v, x] = -1 if hit is None else hit
        if add:
            self.layers.append(new_layer)
        return found

    def _parent_of(self, v: int, w: Word) -> int:
        # the vertex reached by dropping the last letter is v's BFS parent
        p = self.nbr[v][_slot(-w[-1])]
        if p < 0:
            raise AssertionError("parent edge missing")  # pragma: no cover
        return p

    def _record(self, found: dict[tuple[int, int], int]) -> None:
        for (v, x), t in found.items():
            self.nbr[v][_slot(x)] = t
            if t >= 0:
                self.nbr[t][_slot(-x)] = v

    def grow_to(self, r: int) -> None:
        while self.explored < r:
            self._record(self._explore(self.explored, add=True))
            self.explored += 1

    def ball(self, r: int) -> CayleyBall:
        self.grow_to(r)
        n_in = sum(len(self.layers[i]) for i in range(r + 1))
        nbr = [[t if 0 <= t < n_in else -1 for t in self.nbr[v]] for v in range(n_in)]
        if self.explored == r:
            # sphere of radius r not explored yet: look its neighbours up
            for (v, x), t in self._explore(r, add=False).items():
                if 0 <= t < n_in:
                    nbr[v][_slot(x)] = t
                    nbr[t][_slot(-x)] = v
        stats = {"mode": self.mode, "verifications": self.index.verifications,
                 "collisions": self.index.collisions}
        return CayleyBall(r, self.n, list(self.index.reps[:n_in]), self.distance[:n_in], nbr,
                          self.g.spec, stats)

    def sizes(self, r: int) -> list[int]:
        """Gamma(0..r) without resolving the edges of the outer sphere."""
        self.grow_to(r)
        out, acc = [], 0
        for i in range(r + 1):
            acc += len(self.layers[i])
            out.append(acc)
        return out


def _tuned(g: MarkedGroup, k: int) -> MarkedGroup:
    tune = getattr(g, "for_radius", None)
    return tune(k) if tune else g


def ball(g: MarkedGroup, k: int, mode: str = "auto", vertex_cap: int = DEFAULT_VERTEX_CAP,
         threads: int = 1) -> CayleyBall:
    if k < 0:
        raise ValueError("radius must be >= 0")
    if g.ball_only:
        return g.limit_ball(k, mode=mode, vertex_cap=vertex_cap, threads=threads)
    return BallBuilder(_tuned(g, k), mode, vertex_cap, threads).ball(k)


def canonical_certificate(b: CayleyBall) -> bytes:
    """Radius, arity and the neighbour table in a canonical BFS numbering.

    Exploring each vertex's out- then in-edge for every generator in turn
    numbers the vertices of isomorphic balls identically, so the bytes
    coincide exactly when the balls are isomorphic.
    """
    n2 = 2 * b.arity
    order = {0: 0}
    queue = deque([0])
    rows: list[list[int]] = []
    while queue:
        v = queue.popleft()
        row = []
        for s in range(n2):
            t = b.nbr[v][s]
            if t < 0:
                row.append(0)
                continue
            if t not in order:
                order[t] = len(order)
                queue.append(t)
            row.append(order[t] + 1)
        rows.append(row)
    count = len(rows)
    fmt = "B" if count < 255 else ("H" if count < 65535 else "I")
    out = bytearray(_CERT_MAGIC)
    out += struct.pack("<IIIc", b.radius, b.arity, count, fmt.encode())
    pack = struct.Struct("<" + fmt * n2).pack
    for row in rows:
        out += pack(*row)
    return bytes(out)


def ball_isomorphic(b1: CayleyBall, b2: CayleyBall) -> bool:
    """Root- and label-preserving isomorphism by synchronized BFS."""
    if b1.radius != b2.radius:
        raise MarkedGroupError(f"radius mismatch: {b1.radius} vs {b2.radius}")
    if b1.arity != b2.arity or len(b1) != len(b2):
        return False
    fwd = {0: 0}
    back = {0: 0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        w = fwd[v]
        for t1, t2 in zip(b1.nbr[v], b2.nbr[w]):
            if (t1 < 0) != (t2 < 0):
                return False
            if t1 < 0:
                continue
            m1 = fwd.get(t1)
            m2 = back.get(t2)
            if m1 is None and m2 is None:
                fwd[t1] = t2
                back[t2] = t1
                queue.append(t1)
            elif m1 != t2 or m2 != t1:
                return False
    return len(fwd) == len(b1)


# -- distances ---------------------------------------------------------------

@dataclass(frozen=True)
class DistanceValue:
    """Exact(2^-k) or AtMost(2^-k); never zero at finite resolution.

    For mu, k = -1 when the radius-0 balls already differ (a generator is
    trivial in one group only): the max over an empty set of radii.
    """

    metric: str
    exponent: int
    exact: bool
    witness: str | None = None

    @property
    def value(self) -> Fraction:
        return Fraction(2) ** -self.exponent

    @property
    def upper(self) -> Fraction:
        return self.value

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"metric": self.metric}
        if self.exact:
            out["exact_exponent"] = self.exponent
        else:
            out["at_most_exponent"] = self.exponent
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def __str__(self) -> str:
        kind = "exactly" if self.exact else "at most"
        return f"{self.metric} {kind} 2^-{self.exponent}"


def _check_arity(g1: MarkedGroup, g2: MarkedGroup) -> None:
    if g1.arity != g2.arity:
        raise MarkedGroupError(f"arity mismatch: {g1.spec} has {g1.arity} generators, "
                               f"{g2.spec} has {g2.arity}")


def nu_distance(g1: MarkedGroup, g2: MarkedGroup, resolution: int) -> DistanceValue:
    _check_arity(g1, g2)
    for length in range(1, resolution + 1):
        for w in words_of_length(g1.arity, length):
            if _verdict(g1, w) != _verdict(g2, w):
                return DistanceValue("nu", length - 1, True, format_word(w))
    return DistanceValue("nu", resolution, False)


def d_distance(g1: MarkedGroup, g2: MarkedGroup, resolution: int) -> DistanceValue:
    """Index metric over the length-lex enumeration g_0 = 1, g_1, ..."""
    _check_arity(g1, g2)
    i = 0
    for w in enumerate_words(g1.arity, resolution):
        if i > resolution:
            break
        if _verdict(g1, w) != _verdict(g2, w):
            return DistanceValue("d", i, True, format_word(w))
        i += 1
    return DistanceValue("d", resolution + 1, False)


def _ball_builder(g: MarkedGroup, r: int, mode: str, threads: int) -> BallBuilder | None:
    if g.ball_only:
        return None
    return BallBuilder(_tuned(g, r), mode, threads=threads)


def mu_distance(g1: MarkedGroup, g2: MarkedGroup, resolution: int, mode: str = "auto",
                threads: int = 1) -> DistanceValue:
    _check_arity(g1, g2)
    b1 = _ball_builder(g1, resolution, mode, threads)
    b2 = _ball_builder(g2, resolution, mode, threads)
    for r in range(0, resolution + 1):
        x = b1.ball(r) if b1 else ball(g1, r, mode)
        y = b2.ball(r) if b2 else ball(g2, r, mode)
        if not ball_isomorphic(x, y):
            return DistanceValue("mu", r - 1, True)
    return DistanceValue("mu", resolution, False)


# -- growth ------------------------------------------------------------------

def growth(g: MarkedGroup, X: int, mode: str = "auto", vertex_cap: int = DEFAULT_VERTEX_CAP,
           threads: int = 1) -> list[int]:
    if g.ball_only:
        return ball(g, X, mode, vertex_cap, threads).growth()
    return BallBuilder(_tuned(g, X), mode, vertex_cap, threads).sizes(X)


def growth_csv(table: Sequence[int]) -> str:
    return "x,gamma\n" + "".join(f"{x},{v}\n" for x, v in enumerate(table))


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    den = sum((x - mx) ** 2 for x in xs)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / den if den else 0.0


def growth_classify(table: Sequence[int]) -> dict[str, Any]:
    """Consistency flags for a finite growth table; never a classification.

    The exponential witness is a* = min Gamma(x)^(1/x).  Polynomial degree
    is read from sphere sizes: 1 + the log-log slope of S(x), compared
    between the middle and the upper part of the table.
    """
    X = len(table) - 1
    if X < 3:
        raise ValueError("growth_classify needs Gamma(0..X) with X >= 3")
    spheres = [table[0]] + [table[x] - table[x - 1] for x in range(1, X + 1)]
    a_star = min(table[x] ** (1 / x) for x in range(1, X + 1))
    drift = table[X // 2] ** (1 / (X // 2)) / table[X] ** (1 / X)

    def sphere_slope(lo: int, hi: int) -> float:
        xs = [x for x in range(max(lo, 1), hi + 1) if spheres[x] > 0]
        if len(xs) < 2:
            return 0.0
        return _slope([math.log(x) for x in xs], [math.log(spheres[x]) for x in xs])

    finite = spheres[X] == 0
    if finite:
        degree = 0.0
        poly = True
    else:
        lower = sphere_slope(max(1, X // 4), X // 2)
        upper = sphere_slope(X // 2, X)
        degree = 1 + upper
        poly = abs(upper - lower) <= 0.35
    return {
        "a_star": round(a_star, 6),
        "exponential_consistent": (not finite) and a_star > 1.05 and drift <= 1.15,
        "polynomial_consistent": poly,
        "degree_estimate": round(degree, 6),
        "note": "finite-scale evidence, not a classification",
    }


# -- convergence -------------------------------------------------------------

@dataclass
class ConvergenceTable:
    labels: list[str]
    distances: list[DistanceValue]

    @property
    def exponents(self) -> list[int]:
        return [d.exponent for d in self.distances]

    @property
    def nonincreasing(self) -> bool:
        e = self.exponents
        return all(a <= b for a, b in zip(e, e[1:]))

    @property
    def strictly_decreasing(self) -> bool:
        e = self.exponents
        return all(a < b for a, b in zip(e, e[1:])) and all(d.exact for d in self.distances)

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": [dict(term=lab, **d.to_json()) for lab, d in zip(self.labels, self.distances)],
            "nonincreasing": self.nonincreasing,
            "strictly_decreasing": self.strictly_decreasing,
            "final_exponent": self.exponents[-1] if self.distances else None,
        }


def converge_table(groups: Iterable[MarkedGroup], limit: MarkedGroup, resolution: int,
                   metric: str = "mu", threads: int = 1) -> ConvergenceTable:
    labels, out = [], []
    for g in groups:
        labels.append(g.spec)
        if metric == "mu":
            out.append(mu_distance(g, limit, resolution, threads=threads))
        elif metric == "nu":
            out.append(nu_distance(g, limit, resolution))
        else:
            out.append(d_distance(g, limit, resolution))
    return ConvergenceTable(labels, out)
