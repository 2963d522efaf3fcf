"""Instance families: carousel tournaments, planted carousels, random
tournaments, the sparse forward/backward model, and the explicit covers
used to bound tau_t on them.

Randomness comes from numpy's PCG64 bit generator seeded with the given
64-bit integer, so instances are reproducible across runs and machines.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digraph import Digraph, is_triangle_free, serialize
from .exact import CoverSet

SHORT_CYCLE_LENGTH = 6


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_carousel5() -> Digraph:
    """Each vertex ``i`` beats ``i+1`` and ``i+2`` (mod 5)."""
    return Digraph.from_arcs(5, [(i, (i + d) % 5) for d in (1, 2) for i in range(5)])


def gen_transitive(n: int) -> Digraph:
    return Digraph.from_arcs(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def gen_planted_carousels(k: int) -> Digraph:
    """Transitive tournament on ``5k`` vertices with each consecutive block of
    five reoriented as a carousel."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    n = 5 * k
    g = Digraph(n)
    for i in range(n):
        for j in range(i + 1, n):
            if i // 5 != j // 5:
                g.add_arc(i, j)
            elif (j - i) in (1, 2):
                g.add_arc(i, j)
            else:
                g.add_arc(j, i)
    return g


def gen_random_tournament(n: int, seed: int) -> Digraph:
    """Every pair ``i < j`` is oriented by an independent fair coin."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    pairs = list(itertools.combinations(range(n), 2))
    coins = rng_for(seed).integers(0, 2, size=len(pairs))
    return Digraph.from_arcs(n, [(i, j) if c else (j, i) for (i, j), c in zip(pairs, coins)])


def gen_random_digraph(n: int, seed: int, p: float = 0.5) -> Digraph:
    """Each ordered pair independently with probability ``p``; bigons occur."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    draws = rng_for(seed).random(len(pairs))
    return Digraph.from_arcs(n, [pq for pq, x in zip(pairs, draws) if x < p])


@dataclass(frozen=True)
class SparseInstance:
    digraph: Digraph
    forward: frozenset[int]
    short_cycle_vertices: frozenset[int]
    p: float
    seed: int

    @property
    def backward(self) -> frozenset[int]:
        return frozenset(self.digraph.arc_ids) - self.forward

    def label(self, arc_id: int) -> str:
        return "forward" if arc_id in self.forward else "backward"

    def serialize(self) -> str:
        g = self.digraph
        header = [
            f"generator: sparse n={g.n} seed={self.seed} p={self.p!r}",
            "A: " + " ".join(map(str, sorted(self.short_cycle_vertices))),
        ]
        return serialize(g, header, {a: self.label(a) for a in g.arc_ids})


def sparse_probability(n: int) -> float:
    return float(n) ** (-11 / 12)


def gen_sparse(n: int, seed: int) -> SparseInstance:
    """Forward arcs with probability ``n**(-11/12)`` per ordered pair, then a
    backward arc ``w -> u`` closing every forward path ``u -> v -> w``.

    A backward arc that coincides with a forward arc is not duplicated and
    keeps the forward label.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    p = sparse_probability(n)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    draws = rng_for(seed).random(len(pairs))
    g = Digraph(n)
    forward = set()
    out: list[list[int]] = [[] for _ in range(n)]
    for (u, v), x in zip(pairs, draws):
        if x < p:
            forward.add(g.add_arc(u, v))
            out[u].append(v)
    for u in range(n):
        for v in out[u]:
            for w in out[v]:
                if w != u and not g.has_arc(w, u):
                    g.add_arc(w, u)
    short = short_cycle_vertices(n, [(g.arc(a).tail, g.arc(a).head) for a in sorted(forward)])
    return SparseInstance(g, frozenset(forward), frozenset(short), p, seed)


def short_cycle_vertices(n: int, edges: Sequence[tuple[int, int]], length: int = SHORT_CYCLE_LENGTH) -> set[int]:
    """Vertices on a cycle of at most ``length`` edges in the underlying
    undirected multigraph of ``edges`` (orientation ignored).

    An edge ``uv`` lies on such a cycle iff ``u`` and ``v`` are joined by a
    path of at most ``length - 1`` edges avoiding that edge.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(edges):
        adj[u].append((v, i))
        adj[v].append((u, i))
    found: set[int] = set()
    for i, (u, v) in enumerate(edges):
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if dist[x] >= length - 1:
                continue
            for y, j in adj[x]:
                if j == i or y in dist:
                    continue
                dist[y] = dist[x] + 1
                queue.append(y)
        if v in dist:
            found.update((u, v))
    return found


# -- explicit covers --------------------------------------------------------------


def ordering_cover(g: Digraph, order: Sequence[int]) -> CoverSet:
    """Arcs pointing backwards in ``order``, or forwards if that is lighter.

    Either set leaves an acyclic, hence triangle-free, digraph.
    """
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    back = [a.id for a in g.arcs if pos[a.tail] > pos[a.head]]
    ahead = [a.id for a in g.arcs if pos[a.tail] < pos[a.head]]
    back_cover, ahead_cover = CoverSet.of(g, back), CoverSet.of(g, ahead)
    return ahead_cover if ahead_cover.weight < back_cover.weight else back_cover


def bipartition_cover(instance: SparseInstance, seed: int) -> tuple[CoverSet, frozenset[int]]:
    """Random split X/Y; take forward arcs inside X, inside Y and from X to Y,
    plus every arc touching a short-cycle vertex.  Returns the cover and X.

    Raises ``AssertionError`` if the cover leaves a triangle behind.
    """
    g = instance.digraph
    in_x = rng_for(seed).integers(0, 2, size=g.n).astype(bool)
    short = instance.short_cycle_vertices
    arcs = set()
    for a in g.arcs:
        if a.tail in short or a.head in short:
            arcs.add(a.id)
        elif a.id in instance.forward and not (not in_x[a.tail] and in_x[a.head]):
            arcs.add(a.id)
    cover = CoverSet.of(g, arcs)
    if not is_triangle_free(g.remove_arcs(cover.arcs)):
        raise AssertionError(f"bipartition cover misses a triangle (seed {seed})")
    return cover, frozenset(v for v in range(g.n) if in_x[v])


def backward_witness(instance: SparseInstance, arc_id: int) -> int | None:
    """A vertex ``v`` with forward arcs ``u -> v -> w`` for backward arc ``w -> u``."""
    g = instance.digraph
    a = g.arc(arc_id)
    w, u = a.tail, a.head
    for v in range(g.n):
        if any(x in instance.forward for x in g.arcs_between(u, v)) and any(
            x in instance.forward for x in g.arcs_between(v, w)
        ):
            return v
    return None


# -- specs ------------------------------------------------------------------------

KINDS = ("carousel5", "planted", "random_tournament", "random_digraph", "sparse", "transitive")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int | None = None
    k: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator {self.kind!r}; expected one of {KINDS}")
        random_kind = self.kind in ("random_tournament", "random_digraph", "sparse")
        if random_kind and self.seed is None:
            raise ValueError(f"{self.kind} needs a seed")
        if not random_kind and self.seed is not None:
            raise ValueError(f"{self.kind} takes no seed")
        if self.kind == "planted" and (self.k is None or self.k < 1):
            raise ValueError("planted needs k >= 1")
        if self.kind in ("random_tournament", "random_digraph", "transitive", "sparse"):
            if self.n is None or self.n < 1:
                raise ValueError(f"{self.kind} needs n >= 1")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def label(self) -> str:
        if self.kind == "carousel5":
            return "carousel5"
        if self.kind == "planted":
            return f"planted-k{self.k}"
        if self.kind == "transitive":
            return f"transitive-n{self.n}"
        return f"{self.kind}-n{self.n}-s{self.seed}"

    def build(self) -> Digraph | SparseInstance:
        if self.kind == "carousel5":
            return gen_carousel5()
        if self.kind == "planted":
            return gen_planted_carousels(self.k)
        if self.kind == "transitive":
            return gen_transitive(self.n)
        if self.kind == "random_tournament":
            return gen_random_tournament(self.n, self.seed)
        if self.kind == "random_digraph":
            return gen_random_digraph(self.n, self.seed)
        return gen_sparse(self.n, self.seed)

    def digraph(self) -> Digraph:
        built = self.build()
        return built.digraph if isinstance(built, SparseInstance) else built

    def text(self) -> str:
        built = self.build()
        if isinstance(built, SparseInstance):
            return built.serialize()
        return serialize(built, [f"generator: {self.label}"])
