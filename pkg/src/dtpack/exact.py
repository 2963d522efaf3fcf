"""Exact integral triangle packing (nu_t) and covering (tau_t).

Both are depth-first branch-and-bound searches over the triangle list with
exact LP bounds from :mod:`dtpack.lp`.  A search that runs out of its node
budget returns its best solution flagged ``complete=False`` together with
the root LP bound; it never passes off a bound as an optimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .digraph import Digraph, Triangle, is_triangle_free
from .lp import packing_lp, solve_cover_lp

DEFAULT_BUDGET = 10**6


class SizeGuardError(ValueError):
    """An exhaustive routine was asked to enumerate beyond its size guard."""


@dataclass(frozen=True)
class IntegralPacking:
    """Arc-disjoint triangles (with multiplicity when capacities exceed one)."""

    triangles: tuple[Triangle, ...]
    complete: bool = True
    upper_bound: Fraction | None = None
    nodes: int = 0

    @property
    def value(self) -> int:
        return len(self.triangles)


@dataclass(frozen=True)
class CoverSet:
    arcs: frozenset[int]
    weight: Fraction

    @classmethod
    def of(cls, g: Digraph, arcs) -> CoverSet:
        arcs = frozenset(arcs)
        return cls(arcs, g.total_weight(arcs))

    def __len__(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class CoverSolution:
    cover: CoverSet
    complete: bool = True
    lower_bound: Fraction | None = None
    nodes: int = 0

    @property
    def weight(self) -> Fraction:
        return self.cover.weight

    @property
    def arcs(self) -> frozenset[int]:
        return self.cover.arcs


def is_cover(g: Digraph, arcs) -> bool:
    return is_triangle_free(g.remove_arcs(arcs))


# -- nu_t ---------------------------------------------------------------------


def solve_nu_t(g: Digraph, budget: int | None = DEFAULT_BUDGET) -> IntegralPacking:
    """Maximum integral triangle packing.

    Arc ``e`` may be used by at most ``floor(w(e))`` selected triangles, so
    for unit weights the result is a set of arc-disjoint triangles.  Branches
    on the live triangle with the fewest compatible (arc-disjoint) live
    triangles: first use it once more, then exclude it.
    """
    triangles = g.triangles()
    if not triangles:
        return IntegralPacking((), upper_bound=Fraction(0))
    capacity = {a.id: math.floor(a.weight) for a in g.arcs}
    conflicts = _conflict_sets(triangles)

    def lp_bound(live: Sequence[int], cap: dict[int, int]) -> Fraction:
        value, _ = packing_lp([triangles[t].arcs for t in live], cap)
        return value

    root_live = [t for t in range(len(triangles)) if all(capacity[a] > 0 for a in triangles[t].arcs)]
    root_bound = lp_bound(root_live, capacity) if root_live else Fraction(0)

    best: list[int] = _greedy_packing(triangles, root_live, capacity, conflicts)
    nodes = 0
    complete = True
    stack: list[tuple[list[int], dict[int, int], list[int]]] = [(root_live, capacity, [])]
    while stack:
        live, cap, chosen = stack.pop()
        if not live:
            if len(chosen) > len(best):
                best = chosen
            continue
        if len(chosen) + len(live) <= len(best):
            continue
        nodes += 1
        if budget is not None and nodes > budget:
            complete = False
            break
        if len(chosen) + math.floor(lp_bound(live, cap)) <= len(best):
            continue
        live_set = set(live)
        t = min(live, key=lambda i: (len(live) - 1 - len(conflicts[i] & live_set), i))
        # exclude branch is pushed first so the include branch is explored first
        stack.append(([i for i in live if i != t], cap, chosen))
        new_cap = dict(cap)
        for a in triangles[t].arcs:
            new_cap[a] -= 1
        still = [i for i in live if all(new_cap[a] > 0 for a in triangles[i].arcs)]
        stack.append((still, new_cap, chosen + [t]))

    return IntegralPacking(
        tuple(triangles[i] for i in sorted(best)),
        complete=complete,
        upper_bound=root_bound,
        nodes=nodes,
    )


def _conflict_sets(triangles: Sequence[Triangle]) -> list[set[int]]:
    by_arc: dict[int, list[int]] = {}
    for i, t in enumerate(triangles):
        for a in t.arcs:
            by_arc.setdefault(a, []).append(i)
    out = []
    for i, t in enumerate(triangles):
        s: set[int] = set()
        for a in t.arcs:
            s.update(by_arc[a])
        s.discard(i)
        out.append(s)
    return out


def _greedy_packing(triangles, live, capacity, conflicts) -> list[int]:
    cap = dict(capacity)
    chosen = []
    for t in sorted(live, key=lambda i: (len(conflicts[i]), i)):
        while all(cap[a] > 0 for a in triangles[t].arcs):
            for a in triangles[t].arcs:
                cap[a] -= 1
            chosen.append(t)
    return chosen


# -- tau_t --------------------------------------------------------------------


def solve_tau_t(g: Digraph, budget: int | None = DEFAULT_BUDGET) -> CoverSolution:
    """Minimum-weight set of arcs meeting every triangle.

    Branches on the uncovered triangle whose allowed arcs carry the largest
    total root LP cover value, splitting into "take arc 1", "forbid arc 1,
    take arc 2", "forbid arcs 1 and 2, take arc 3".
    """
    triangles = g.triangles()
    if not triangles:
        return CoverSolution(CoverSet(frozenset(), Fraction(0)), lower_bound=Fraction(0))
    weight = {a.id: a.weight for a in g.arcs}
    integral = all(w.denominator == 1 for w in weight.values())
    root = solve_cover_lp(g)
    c = root.values
    root_bound = _ceil(root.weight) if integral else root.weight

    best = _threshold_cover(g, triangles, c)
    best_weight = g.total_weight(best)
    nodes = 0
    complete = True

    stack: list[tuple[frozenset[int], frozenset[int], Fraction]] = [(frozenset(), frozenset(), Fraction(0))]
    while stack:
        chosen, forbidden, spent = stack.pop()
        open_sets = []
        dead = False
        for t in triangles:
            if chosen.isdisjoint(t.arcs):
                allowed = tuple(a for a in t.arcs if a not in forbidden)
                if not allowed:
                    dead = True
                    break
                open_sets.append(allowed)
        if dead or spent >= best_weight:
            continue
        if not open_sets:
            best, best_weight = chosen, spent
            continue
        nodes += 1
        if budget is not None and nodes > budget:
            complete = False
            break
        bound, _ = packing_lp(open_sets, {a: weight[a] for s in open_sets for a in s})
        bound += spent
        if integral:
            bound = _ceil(bound)
        if bound >= best_weight:
            continue
        branch = max(open_sets, key=lambda s: (sum(c[a] for a in s), tuple(-a for a in s)))
        arcs = sorted(branch, key=lambda a: (-c[a], a))
        children = []
        for k, a in enumerate(arcs):
            children.append((chosen | {a}, forbidden | set(arcs[:k]), spent + weight[a]))
        stack.extend(reversed(children))

    return CoverSolution(
        CoverSet(frozenset(best), best_weight),
        complete=complete,
        lower_bound=root_bound,
        nodes=nodes,
    )


def _ceil(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x))


def _threshold_cover(g: Digraph, triangles, c) -> frozenset[int]:
    # every triangle has an arc with c >= 1/3; then drop redundant arcs
    chosen = {a for a in g.arc_ids if c[a] >= Fraction(1, 3)}
    for a in sorted(chosen, key=lambda a: (g.weight(a), c[a], a), reverse=True):
        rest = chosen - {a}
        if all(not rest.isdisjoint(t.arcs) for t in triangles):
            chosen = rest
    return frozenset(chosen)


# -- oracles -------------------------------------------------------------------

BRUTE_FORCE_LIMIT = 20


def brute_force_nu_tau(g: Digraph) -> tuple[int, int]:
    """``(nu_t, tau_t)`` of a unit-weight digraph by plain subset enumeration."""
    if not g.is_unit_weight():
        raise ValueError("brute force oracle only handles unit weights")
    triangles = g.triangles()
    arcs = g.arc_ids
    if len(triangles) > BRUTE_FORCE_LIMIT or len(arcs) > BRUTE_FORCE_LIMIT:
        raise SizeGuardError(
            f"{len(triangles)} triangles / {len(arcs)} arcs exceed the limit {BRUTE_FORCE_LIMIT}"
        )
    nu = 0
    for k in range(min(len(triangles), len(arcs) // 3), 0, -1):
        if any(
            len({a for t in combo for a in t.arcs}) == 3 * k
            for combo in itertools.combinations(triangles, k)
        ):
            nu = k
            break
    tau = 0
    if triangles:
        sets = [set(t.arcs) for t in triangles]
        for k in range(1, len(arcs) + 1):
            if any(all(not s.isdisjoint(combo) for s in sets) for combo in itertools.combinations(arcs, k)):
                tau = k
                break
    return nu, tau


def _directed_triangle_masks(n: int) -> tuple[list[tuple[int, int]], list[int]]:
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    bit = {p: 1 << i for i, p in enumerate(pairs)}
    masks = []
    for u, v, w in itertools.combinations(range(n), 3):
        masks.append(bit[(u, v)] | bit[(v, w)] | bit[(w, u)])
        masks.append(bit[(u, w)] | bit[(w, v)] | bit[(v, u)])
    return pairs, masks


@dataclass(frozen=True)
class TriangleFreeCensus:
    n: int
    digraphs: int
    triangle_free: int
    max_arcs: int
    bound: int
    violations: tuple[int, ...]  # arc masks of triangle-free digraphs above the bound
    extremal_example: int


def triangle_free_census(n: int) -> TriangleFreeCensus:
    """Enumerate all ``2**(n(n-1))`` digraphs on ``n <= 4`` labelled vertices."""
    if not 0 <= n <= 4:
        raise SizeGuardError(f"exhaustive census only for n <= 4, got {n}")
    pairs, masks = _directed_triangle_masks(n)
    bound = n * n // 2
    free = 0
    best = -1
    example = 0
    violations = []
    for mask in range(1 << len(pairs)):
        if any(mask & t == t for t in masks):
            continue
        free += 1
        arcs = mask.bit_count()
        if arcs > best:
            best, example = arcs, mask
        if arcs > bound:
            violations.append(mask)
    return TriangleFreeCensus(n, 1 << len(pairs), free, max(best, 0), bound, tuple(violations), example)


def max_triangle_free_arcs(n: int) -> int:
    """Largest arc count of a triangle-free digraph (bigons allowed) on ``n`` vertices."""
    census = triangle_free_census(n)
    assert census.max_arcs <= census.bound, census
    return census.max_arcs


def census_digraph(n: int, mask: int) -> Digraph:
    pairs, _ = _directed_triangle_masks(n)
    return Digraph.from_arcs(n, [p for i, p in enumerate(pairs) if mask >> i & 1])
