"""Exact fractional triangle packing and covering.

Both linear programs are solved by a primal simplex over the integers
(fraction-free pivoting, largest coefficient first with a Bland fallback),
so every optimum is an exact rational.  The packing LP and the cover LP are
solved by separate runs and
:func:`certify_duality` checks that their values coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .digraph import Digraph, Triangle


class LPError(RuntimeError):
    """The simplex hit a state that a bounded feasible LP cannot reach."""


class InfeasibleWitness(ValueError):
    """A packing or cover handed in for checking violates its constraints."""


# -- simplex core --------------------------------------------------------------


DEGENERATE_STREAK = 50
_SAFE = 1 << 62


def maximize(
    objective: Sequence[Fraction],
    rows: Sequence[Mapping[int, Fraction]],
    rhs: Sequence[Fraction],
) -> tuple[Fraction, list[Fraction]]:
    """Maximize ``objective . x`` subject to ``rows[i] . x <= rhs[i]``, ``x >= 0``.

    ``rows`` are sparse (column -> coefficient).  Every ``rhs[i]`` must be
    nonnegative, so the slack basis is feasible and no phase one is needed.
    Returns the optimal value and an optimal basic solution.

    Each tableau row is an integer vector whose true value is the vector
    divided by its entry in the row's basic column, so a pivot only rewrites
    rows with a nonzero in the entering column.  The tableau lives in an
    int64 array and is promoted to Python integers (object dtype) as soon as
    a pivot could overflow, so the arithmetic is exact either way.

    The entering column is the most negative reduced cost until
    ``DEGENERATE_STREAK`` consecutive pivots fail to improve the objective;
    from then on Bland's smallest-index rule is used, which cannot cycle.
    """
    nvars = len(objective)
    m = len(rows)
    if any(b < 0 for b in rhs):
        raise ValueError("right-hand sides must be nonnegative")
    width = nvars + m + 1
    rhs_col = width - 1

    lines = []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        scale = _lcm_denominators([*row.values(), b])
        line = [0] * width
        for j, a in row.items():
            line[j] = int(a * scale)
        line[nvars + i] = 1  # slack absorbs the row scale
        line[rhs_col] = int(b * scale)
        lines.append(line)
    obj_scale = _lcm_denominators(objective)
    zrow = [-int(c * obj_scale) for c in objective]
    lines.append(zrow + [0] * (width - nvars))
    big = max((abs(v) for line in lines for v in line), default=0) >= _SAFE
    table = np.array(lines, dtype=object if big else np.int64).reshape(m + 1, width)
    z_div = 1  # true reduced costs are table[m] / z_div

    basis = list(range(nvars, nvars + m))
    bland = False
    streak = 0
    while True:
        z = table[m, :rhs_col]
        if bland:
            neg = np.flatnonzero(z < 0)
            if not len(neg):
                break
            s = int(neg[0])
        else:
            s = int(np.argmin(z))
            if z[s] >= 0:
                break
        col = table[:m, s]
        cand = np.flatnonzero(col > 0)
        if not len(cand):
            raise LPError("objective unbounded")
        r = int(cand[0])
        for i in cand[1:]:
            i = int(i)
            lhs = table[i, rhs_col] * table[r, s]
            cur = table[r, rhs_col] * table[i, s]
            if lhs < cur or (lhs == cur and basis[i] < basis[r]):
                r = i
        pivot = table[r].copy()
        p = pivot[s]
        if pivot[rhs_col] == 0:
            streak += 1
            bland = bland or streak >= DEGENERATE_STREAK
        else:
            streak = 0

        factors = table[:, s].copy()
        factors[r] = 0
        touched = np.flatnonzero(factors)
        if not len(touched):
            basis[r] = s
            continue
        sub = table[touched]
        f = factors[touched]
        if not big:
            bound = int(abs(p)) * int(np.abs(sub).max()) + int(np.abs(f).max()) * int(np.abs(pivot).max())
            if bound >= _SAFE or z_div * int(p) >= _SAFE:
                table = table.astype(object)
                sub, f, pivot, p = sub.astype(object), f.astype(object), pivot.astype(object), int(p)
                big = True
        sub = sub * p - f[:, None] * pivot[None, :]
        is_z = touched == m
        if is_z.any():
            z_div *= int(p)
        g = np.gcd.reduce(sub, axis=1)
        if is_z.any():
            k = int(np.flatnonzero(is_z)[0])
            g[k] = math.gcd(int(g[k]), z_div)
            z_div //= int(g[k])
        table[touched] = sub // g[:, None]
        basis[r] = s

    x = [Fraction(0)] * nvars
    for i, j in enumerate(basis):
        if j < nvars:
            x[j] = Fraction(int(table[i, rhs_col]), int(table[i, j]))
    value = Fraction(int(table[m, rhs_col]), z_div * obj_scale)
    return value, x


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


# -- set-system LPs ------------------------------------------------------------


def packing_lp(
    sets: Sequence[Sequence[int]], capacity: Mapping[int, Fraction]
) -> tuple[Fraction, list[Fraction]]:
    """Max ``sum y_S`` with ``sum_{S ∋ e} y_S <= capacity[e]`` for every element.

    Elements missing from ``capacity`` are unconstrained.
    """
    if not sets:
        return Fraction(0), []
    elements = sorted({e for s in sets for e in s if e in capacity})
    row_of = {e: i for i, e in enumerate(elements)}
    rows: list[dict[int, Fraction]] = [{} for _ in elements]
    for j, s in enumerate(sets):
        for e in s:
            if e in row_of:
                row = rows[row_of[e]]
                row[j] = row.get(j, Fraction(0)) + 1
    if any(not any(e in row_of for e in s) for s in sets):
        raise LPError("a set has no capacitated element; packing LP is unbounded")
    return maximize([Fraction(1)] * len(sets), rows, [Fraction(capacity[e]) for e in elements])


def covering_lp(
    sets: Sequence[Sequence[int]], cost: Mapping[int, Fraction]
) -> tuple[Fraction, dict[int, Fraction]]:
    """Min ``sum cost[e] c_e`` with ``sum_{e in S} c_e >= 1`` and ``0 <= c <= 1``.

    Solved in the complemented variables ``u = 1 - c``: maximize
    ``cost . u`` subject to ``sum_{e in S} u_e <= |S| - 1`` and ``u <= 1``,
    whose origin is feasible.
    """
    elements = sorted(cost)
    if not sets:
        return Fraction(0), {e: Fraction(0) for e in elements}
    col = {e: j for j, e in enumerate(elements)}
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for s in sets:
        members = set(s)
        if not members:
            raise LPError("empty set cannot be covered")
        rows.append({col[e]: Fraction(1) for e in members})
        rhs.append(Fraction(len(members) - 1))
    for e in elements:
        rows.append({col[e]: Fraction(1)})
        rhs.append(Fraction(1))
    best, u = maximize([Fraction(cost[e]) for e in elements], rows, rhs)
    total = sum((Fraction(cost[e]) for e in elements), Fraction(0))
    return total - best, {e: 1 - u[col[e]] for e in elements}


# -- fractional packings and covers --------------------------------------------


@dataclass(frozen=True)
class FractionalPacking:
    values: dict[Triangle, Fraction]

    @property
    def weight(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def load(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for t, y in self.values.items():
            for a in t.arcs:
                out[a] = out.get(a, Fraction(0)) + y
        return out


@dataclass(frozen=True)
class FractionalCover:
    values: dict[int, Fraction]
    weight: Fraction

    def __getitem__(self, arc_id: int) -> Fraction:
        return self.values.get(arc_id, Fraction(0))

    def triangle_sum(self, t: Triangle) -> Fraction:
        return sum((self[a] for a in t.arcs), Fraction(0))


@dataclass(frozen=True)
class LpCertificate:
    packing: FractionalPacking
    cover: FractionalCover
    value: Fraction


def solve_packing_lp(g: Digraph) -> FractionalPacking:
    """An optimal fractional triangle packing (arc capacities = weights)."""
    triangles = g.triangles()
    if not triangles:
        return FractionalPacking({})
    capacity = {a.id: a.weight for a in g.arcs}
    _, y = packing_lp([t.arcs for t in triangles], capacity)
    return FractionalPacking({t: v for t, v in zip(triangles, y) if v})


def solve_cover_lp(g: Digraph) -> FractionalCover:
    """An optimal fractional triangle cover with values in ``[0, 1]``."""
    triangles = g.triangles()
    if not triangles:
        return FractionalCover({a: Fraction(0) for a in g.arc_ids}, Fraction(0))
    cost = {a.id: a.weight for a in g.arcs}
    value, c = covering_lp([t.arcs for t in triangles], cost)
    return FractionalCover(c, value)


def fractional_value(g: Digraph) -> Fraction:
    return solve_packing_lp(g).weight


def cover_weight(g: Digraph, values: Mapping[int, Fraction]) -> Fraction:
    return sum((g.weight(a) * Fraction(v) for a, v in values.items()), Fraction(0))


def check_packing(g: Digraph, m: FractionalPacking) -> None:
    for t, y in m.values.items():
        if y < 0:
            raise InfeasibleWitness(f"negative packing value on {t.arcs}")
        if any(a not in g for a in t.arcs):
            raise InfeasibleWitness(f"triangle {t.arcs} uses arcs outside the digraph")
    for a, load in m.load().items():
        if load > g.weight(a):
            raise InfeasibleWitness(f"arc {a} overloaded: {load} > {g.weight(a)}")


def check_cover(g: Digraph, c: FractionalCover) -> None:
    for a, v in c.values.items():
        if not 0 <= v <= 1:
            raise InfeasibleWitness(f"cover value {v} on arc {a} outside [0, 1]")
    for t in g.triangles():
        if c.triangle_sum(t) < 1:
            raise InfeasibleWitness(f"triangle {t.arcs} covered only {c.triangle_sum(t)}")
    if c.weight != cover_weight(g, c.values):
        raise InfeasibleWitness("stored cover weight does not match its values")


def certify_duality(g: Digraph) -> LpCertificate:
    """Solve both LPs and check that the optimal values are equal."""
    m = solve_packing_lp(g)
    c = solve_cover_lp(g)
    check_packing(g, m)
    check_cover(g, c)
    if m.weight != c.weight:
        raise LPError(f"packing optimum {m.weight} differs from cover optimum {c.weight}")
    return LpCertificate(m, c, m.weight)


@dataclass(frozen=True)
class SlacknessReport:
    unsaturated_arcs: tuple[tuple[int, Fraction, Fraction], ...]  # (arc, c(e), load)
    loose_triangles: tuple[tuple[Triangle, Fraction], ...]  # (triangle, cover sum)

    @property
    def ok(self) -> bool:
        return not self.unsaturated_arcs and not self.loose_triangles


def check_complementary_slackness(
    g: Digraph, m: FractionalPacking, c: FractionalCover
) -> SlacknessReport:
    """List every complementary slackness violation of the pair ``(m, c)``.

    An empty report means both are optimal.  Infeasible inputs raise
    :class:`InfeasibleWitness`.
    """
    check_packing(g, m)
    check_cover(g, c)
    load = m.load()
    unsaturated = tuple(
        (a, c[a], load.get(a, Fraction(0)))
        for a in g.arc_ids
        if c[a] > 0 and load.get(a, Fraction(0)) < g.weight(a)
    )
    loose = tuple((t, c.triangle_sum(t)) for t in sorted(m.values) if m.values[t] > 0 and c.triangle_sum(t) != 1)
    return SlacknessReport(unsaturated, loose)


__all__ = [
    "FractionalCover",
    "FractionalPacking",
    "InfeasibleWitness",
    "LPError",
    "LpCertificate",
    "SlacknessReport",
    "certify_duality",
    "check_complementary_slackness",
    "check_cover",
    "check_packing",
    "covering_lp",
    "maximize",
    "packing_lp",
    "solve_cover_lp",
    "solve_packing_lp",
]
