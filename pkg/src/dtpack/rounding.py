"""Rounding an optimal fractional triangle cover to a triangle cover.

The pipeline is:

1. :func:`peel_heavy_arcs` moves arcs with cover value at least 5/9 into
   the cover one at a time, re-solving the cover LP after every deletion.
2. On the residual digraph every arc has ``c(e) < 5/9``.  A bipartition
   ``(A, B)`` and a threshold pair ``(beta, gamma)`` select the arcs from A
   to B with ``c(e) > beta`` and the arcs inside a part with
   ``c(e) > gamma``; :func:`round_cover` implements the rule and the result
   is always a triangle cover.
3. The bipartition and thresholds are drawn at random
   (:func:`sample_cover`), fixed greedily by conditional expectations
   (:func:`derandomized_cover`), or searched exhaustively
   (:func:`exhaustive_best_cover`).

With complementary slackness the expected weight of the random cover is at
most ``9/5`` times the fractional optimum, hence the derandomized cover is
never heavier than that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .digraph import Digraph, Triangle, is_triangle_free
from .exact import CoverSet, SizeGuardError
from .lp import (
    FractionalCover,
    FractionalPacking,
    InfeasibleWitness,
    check_complementary_slackness,
    check_cover,
    solve_cover_lp,
    solve_packing_lp,
)

HEAVY = Fraction(5, 9)
BOUND = Fraction(9, 5)
EXHAUSTIVE_LIMIT = 16


class RoundingError(ValueError):
    pass


class ExhaustiveLimitError(RoundingError, SizeGuardError):
    """Exhaustive enumeration requested beyond ``EXHAUSTIVE_LIMIT`` vertices."""


@dataclass(frozen=True)
class Thresholds:
    beta: Fraction
    gamma: Fraction
    name: str = ""
    alpha: Fraction = HEAVY

    def __post_init__(self):
        if not (self.alpha >= self.beta >= self.gamma >= 0):
            raise ValueError(f"need alpha >= beta >= gamma >= 0, got {self}")
        if self.alpha + self.beta + self.gamma != 1:
            raise ValueError(f"alpha + beta + gamma must equal 1, got {self}")


CHOICE_I = Thresholds(Fraction(4, 9), Fraction(0), "I")
CHOICE_II = Thresholds(Fraction(3, 9), Fraction(1, 9), "II")
CHOICE_III = Thresholds(Fraction(2, 9), Fraction(2, 9), "III")
CHOICES = (CHOICE_I, CHOICE_II, CHOICE_III)
CHOICE_PROBABILITIES = (Fraction(3, 5), Fraction(3, 10), Fraction(1, 10))


@dataclass(frozen=True)
class Bipartition:
    """``in_a[v]`` is True when vertex ``v`` lies in part A."""

    in_a: tuple[bool, ...]

    @classmethod
    def from_mask(cls, n: int, mask: int) -> Bipartition:
        return cls(tuple(bool(mask >> v & 1) for v in range(n)))

    @classmethod
    def all_a(cls, n: int) -> Bipartition:
        return cls((True,) * n)

    def side(self, v: int) -> str:
        return "A" if self.in_a[v] else "B"

    @property
    def part_a(self) -> list[int]:
        return [v for v, x in enumerate(self.in_a) if x]

    @property
    def part_b(self) -> list[int]:
        return [v for v, x in enumerate(self.in_a) if not x]


@dataclass(frozen=True)
class PeelStep:
    arc: int
    cover_value: Fraction
    tau_before: Fraction
    tau_after: Fraction
    arc_weight: Fraction

    @property
    def sound(self) -> bool:
        # 9/5 * tau*(D - e) + w(e) <= 9/5 * tau*(D)
        return BOUND * self.tau_after + self.arc_weight <= BOUND * self.tau_before


@dataclass(frozen=True)
class PeelResult:
    peeled: tuple[int, ...]
    residual: Digraph
    cover: FractionalCover
    steps: tuple[PeelStep, ...]
    initial_value: Fraction

    @property
    def sound(self) -> bool:
        return all(s.sound for s in self.steps)


@dataclass(frozen=True)
class RoundingOutcome:
    peeled: frozenset[int]
    partition: Bipartition
    choice: Thresholds
    cover: CoverSet

    @property
    def weight(self) -> Fraction:
        return self.cover.weight


# -- peeling ----------------------------------------------------------------------


def peel_heavy_arcs(g: Digraph) -> PeelResult:
    """Delete arcs with optimal cover value ``>= 5/9`` until none is left.

    The arc with the largest value goes first, ties by smallest id.  The LP
    is re-solved after every deletion so the returned cover is optimal for
    the returned residual digraph.
    """
    current = g
    c = solve_cover_lp(current)
    initial = c.weight
    peeled: list[int] = []
    steps: list[PeelStep] = []
    while True:
        heavy = [a for a in current.arc_ids if c[a] >= HEAVY]
        if not heavy:
            break
        arc = min(heavy, key=lambda a: (-c[a], a))
        residual = current.remove_arcs([arc])
        c_next = solve_cover_lp(residual)
        steps.append(PeelStep(arc, c[arc], c.weight, c_next.weight, current.weight(arc)))
        peeled.append(arc)
        current, c = residual, c_next
    return PeelResult(tuple(peeled), current, c, tuple(steps), initial)


# -- the threshold rule -------------------------------------------------------------


def _selected(c_value: Fraction, tail_a: bool, head_a: bool, choice: Thresholds) -> bool:
    if tail_a == head_a:
        return c_value > choice.gamma
    return tail_a and c_value > choice.beta


def _select(g: Digraph, c: FractionalCover, partition: Bipartition, choice: Thresholds) -> set[int]:
    side = partition.in_a
    return {a.id for a in g.arcs if _selected(c[a.id], side[a.tail], side[a.head], choice)}


def _check_light(g: Digraph, c: FractionalCover) -> None:
    heavy = [a for a in g.arc_ids if c[a] >= HEAVY]
    if heavy:
        raise RoundingError(f"arcs {heavy} have cover value >= 5/9; peel them first")


def round_cover(g: Digraph, c: FractionalCover, partition: Bipartition, choice: Thresholds) -> CoverSet:
    """Arcs A->B with ``c > beta`` plus arcs inside a part with ``c > gamma``."""
    if len(partition.in_a) != g.n:
        raise RoundingError("partition does not match the vertex count")
    check_cover(g, c)
    _check_light(g, c)
    return CoverSet.of(g, _select(g, c, partition, choice))


def inclusion_probability(c_value: Fraction) -> Fraction:
    """Probability that an arc with cover value ``c_value`` ends up in the random cover.

    Buckets are ``(4/9, 5/9)``, ``(3/9, 4/9]``, ``(2/9, 3/9]``, ``(1/9, 2/9]``,
    ``(0, 1/9]`` and ``{0}``.
    """
    c_value = Fraction(c_value)
    if c_value < 0 or c_value >= HEAVY:
        raise RoundingError(f"cover value {c_value} outside [0, 5/9)")
    if c_value > Fraction(4, 9):
        return Fraction(3, 4)
    if c_value > Fraction(3, 9):
        return Fraction(3, 5)
    if c_value > Fraction(2, 9):
        return Fraction(21, 40)
    if c_value > Fraction(1, 9):
        return Fraction(9, 20)
    if c_value > 0:
        return Fraction(3, 10)
    return Fraction(0)


def inclusion_probability_by_choice(c_value: Fraction) -> Fraction:
    """Same probability, computed from the three threshold rules directly."""
    total = Fraction(0)
    for choice, weight in zip(CHOICES, CHOICE_PROBABILITIES):
        # A->B happens with probability 1/4, same part with probability 1/2
        total += weight * (Fraction(1, 4) * (c_value > choice.beta) + Fraction(1, 2) * (c_value > choice.gamma))
    return total


def expected_weight(g: Digraph, c: FractionalCover) -> Fraction:
    return sum((inclusion_probability(c[a.id]) * a.weight for a in g.arcs), Fraction(0))


def triangle_probability_sums(m: FractionalPacking, c: FractionalCover) -> list[tuple[Triangle, Fraction]]:
    """``p(e1) + p(e2) + p(e3)`` for every triangle in the support of ``m``."""
    return [
        (t, sum((inclusion_probability(c[a]) for a in t.arcs), Fraction(0)))
        for t in sorted(m.values)
        if m.values[t] > 0
    ]


# -- randomized, derandomized, exhaustive --------------------------------------------


def _outcome(g: Digraph, peel: PeelResult, partition: Bipartition, choice: Thresholds) -> RoundingOutcome:
    arcs = _select(peel.residual, peel.cover, partition, choice) | set(peel.peeled)
    return RoundingOutcome(frozenset(peel.peeled), partition, choice, CoverSet.of(g, arcs))


def draw(n: int, seed: int) -> tuple[Bipartition, Thresholds]:
    """The random bipartition and threshold choice for ``seed`` (PCG64)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    sides = rng.integers(0, 2, size=n)
    k = int(rng.integers(0, 10))
    choice = CHOICE_I if k < 6 else CHOICE_II if k < 9 else CHOICE_III
    return Bipartition(tuple(bool(x) for x in sides)), choice


def sample_cover(g: Digraph, peel: PeelResult, seed: int) -> RoundingOutcome:
    """One random outcome: each vertex joins A with probability 1/2 and the
    choices I, II, III are taken with probabilities 3/5, 3/10, 1/10."""
    _check_light(peel.residual, peel.cover)
    partition, choice = draw(g.n, seed)
    return _outcome(g, peel, partition, choice)


def sample_frequencies(
    g: Digraph, c: FractionalCover, seeds: Iterable[int]
) -> tuple[dict[int, float], int]:
    """Empirical inclusion frequency of every arc of ``g`` under random rounding of ``c``."""
    check_cover(g, c)
    _check_light(g, c)
    counts = dict.fromkeys(g.arc_ids, 0)
    total = 0
    for seed in seeds:
        partition, choice = draw(g.n, seed)
        for a in _select(g, c, partition, choice):
            counts[a] += 1
        total += 1
    return {a: k / total for a, k in counts.items()}, total


def certify(peel: PeelResult) -> FractionalPacking:
    """An optimal packing of the residual that satisfies complementary
    slackness together with the peeled cover; raises otherwise."""
    m = solve_packing_lp(peel.residual)
    report = check_complementary_slackness(peel.residual, m, peel.cover)
    if not report.ok:
        raise InfeasibleWitness(f"complementary slackness fails: {report}")
    return m


def _choice_expectation(g: Digraph, c: FractionalCover, choice: Thresholds) -> Fraction:
    total = Fraction(0)
    for a in g.arcs:
        v = c[a.id]
        total += a.weight * (Fraction(1, 4) * (v > choice.beta) + Fraction(1, 2) * (v > choice.gamma))
    return total


def _conditional(v: Fraction, choice: Thresholds, tail: bool | None, head: bool | None) -> Fraction:
    """P(arc selected) given placed endpoints (None = not yet placed)."""
    cross = v > choice.beta
    inside = v > choice.gamma
    if tail is not None and head is not None:
        return Fraction(int(_selected(v, tail, head, choice)))
    if tail is None and head is None:
        return Fraction(1, 4) * cross + Fraction(1, 2) * inside
    half = Fraction(1, 2)
    if tail is not None:
        # head is A with probability 1/2
        return half * inside + (half * cross if tail else 0)
    return half * inside + (half * cross if not head else 0)


def derandomized_cover(g: Digraph, peel: PeelResult, certify_first: bool = True) -> RoundingOutcome:
    """Fix the threshold choice, then the vertices in index order, each time
    taking the option with the smaller conditional expected weight (ties go
    to Choice I and to part A)."""
    residual, c = peel.residual, peel.cover
    _check_light(residual, c)
    if certify_first:
        certify(peel)
    expectations = [_choice_expectation(residual, c, ch) for ch in CHOICES]
    choice = CHOICES[min(range(3), key=lambda i: (expectations[i], i))]

    incident: list[list] = [[] for _ in range(g.n)]
    for a in residual.arcs:
        incident[a.tail].append(a)
        incident[a.head].append(a)
    placed: list[bool | None] = [None] * g.n

    def local(v: int) -> Fraction:
        return sum(
            (a.weight * _conditional(c[a.id], choice, placed[a.tail], placed[a.head]) for a in incident[v]),
            Fraction(0),
        )

    for v in range(g.n):
        placed[v] = True
        in_a = local(v)
        placed[v] = False
        in_b = local(v)
        placed[v] = in_a <= in_b
    partition = Bipartition(tuple(bool(x) for x in placed))
    return _outcome(g, peel, partition, choice)


def exhaustive_best_cover(g: Digraph, peel: PeelResult) -> RoundingOutcome:
    """Minimum-weight outcome over all ``2**n`` bipartitions and the three choices."""
    if g.n > EXHAUSTIVE_LIMIT:
        raise ExhaustiveLimitError(f"exhaustive search limited to {EXHAUSTIVE_LIMIT} vertices, got {g.n}")
    _check_light(peel.residual, peel.cover)
    best: RoundingOutcome | None = None
    for choice in CHOICES:
        for mask in range(1 << g.n):
            out = _outcome(g, peel, Bipartition.from_mask(g.n, mask), choice)
            if best is None or out.weight < best.weight:
                best = out
    assert best is not None
    return best


def all_outcomes_valid(g: Digraph, c: FractionalCover) -> tuple[int, list[tuple[int, str]]]:
    """Check every bipartition and every choice; return (checked, failures)."""
    if g.n > EXHAUSTIVE_LIMIT:
        raise ExhaustiveLimitError(f"exhaustive search limited to {EXHAUSTIVE_LIMIT} vertices, got {g.n}")
    check_cover(g, c)
    _check_light(g, c)
    failures = []
    checked = 0
    for choice in CHOICES:
        for mask in range(1 << g.n):
            chosen = _select(g, c, Bipartition.from_mask(g.n, mask), choice)
            checked += 1
            if not is_triangle_free(g.remove_arcs(chosen)):
                failures.append((mask, choice.name))
    return checked, failures


def describe(outcome: RoundingOutcome) -> dict:
    return {
        "peeled": sorted(outcome.peeled),
        "part_a": outcome.partition.part_a,
        "choice": outcome.choice.name,
        "beta": str(outcome.choice.beta),
        "gamma": str(outcome.choice.gamma),
        "cover": sorted(outcome.cover.arcs),
    }


__all__ = [
    "BOUND",
    "Bipartition",
    "CHOICES",
    "CHOICE_I",
    "CHOICE_II",
    "CHOICE_III",
    "CHOICE_PROBABILITIES",
    "ExhaustiveLimitError",
    "HEAVY",
    "PeelResult",
    "RoundingError",
    "RoundingOutcome",
    "Thresholds",
    "all_outcomes_valid",
    "certify",
    "derandomized_cover",
    "exhaustive_best_cover",
    "expected_weight",
    "inclusion_probability",
    "peel_heavy_arcs",
    "round_cover",
    "sample_cover",
    "triangle_probability_sums",
]
