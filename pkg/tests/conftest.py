from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dtpack.digraph import Digraph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def digraphs(draw, min_n=0, max_n=6, multigraph=False, weighted=False, max_mult=2):
    """Random digraphs with bigons; parallel arcs when ``multigraph``."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    g = Digraph(n, multigraph=multigraph)
    weight = st.fractions(min_value=0, max_value=3, max_denominator=6) if weighted else st.just(Fraction(1))
    for u, v in pairs:
        copies = draw(st.integers(0, max_mult if multigraph else 1))
        for _ in range(copies):
            g.add_arc(u, v, draw(weight))
    return g


@st.composite
def tournaments(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    g = Digraph(n)
    for u, v in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            g.add_arc(u, v)
        else:
            g.add_arc(v, u)
    return g


def c3() -> Digraph:
    return Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)])


def bidirected_k3() -> Digraph:
    return Digraph.from_arcs(3, [(u, v) for u in range(3) for v in range(3) if u != v])


def brute_triangles(g: Digraph) -> set[tuple[int, int, int]]:
    """Arc-id triples of directed 3-cycles by looping over every arc triple."""
    out = set()
    arcs = g.arcs
    for a, b, c in itertools.permutations(arcs, 3):
        if a.head == b.tail and b.head == c.tail and c.head == a.tail and len({a.tail, b.tail, c.tail}) == 3:
            if a.tail == min(a.tail, b.tail, c.tail):
                out.add((a.id, b.id, c.id))
    return out
