"""Directed weighted multigraphs, directed triangles and the text format.

Arcs are identified by integer ids, never by their endpoint pair, so that
parallel arcs in a multigraph carry independent weights, cover values and
packing loads.  Weights are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Union[int, Fraction, str]


class DigraphError(ValueError):
    """Raised on invalid arcs or arc ids."""


class ParseError(ValueError):
    """Malformed digraph text.  ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def to_rational(value: Rational) -> Fraction:
    """Convert ``value`` to an exact Fraction; floats are refused."""
    if isinstance(value, float):
        raise TypeError("floating point weights are not accepted; use int, Fraction or 'p/q'")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Lowest-terms ``p/q`` string, or ``p`` for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Arc:
    id: int
    tail: int
    head: int
    weight: Fraction = Fraction(1)


@dataclass(frozen=True, order=True)
class Triangle:
    """A directed 3-cycle, stored rotated so that its smallest vertex is first.

    ``arcs[i]`` goes from ``vertices[i]`` to ``vertices[(i + 1) % 3]``.
    Equality and ordering only look at the arc ids.
    """

    arcs: tuple[int, int, int]
    vertices: tuple[int, int, int] = field(compare=False)

    def __iter__(self) -> Iterator[int]:
        return iter(self.arcs)


class Digraph:
    """A directed multigraph on vertices ``0..n-1``.

    In the default simple mode at most one arc per ordered pair is allowed
    (bigons are fine); ``multigraph=True`` also allows parallel arcs.  Build
    with :meth:`add_arc`; every other operation treats the digraph as a value.
    """

    def __init__(self, n: int, multigraph: bool = False):
        if n < 0:
            raise DigraphError(f"vertex count must be nonnegative, got {n}")
        self.n = n
        self.multigraph = multigraph
        self._arcs: dict[int, Arc] = {}
        self._pairs: dict[tuple[int, int], list[int]] = {}
        self._next_id = 0
        self._triangles: list[Triangle] | None = None

    # -- construction -----------------------------------------------------

    def add_arc(self, tail: int, head: int, weight: Rational = 1, *, arc_id: int | None = None) -> int:
        if not (0 <= tail < self.n and 0 <= head < self.n):
            raise DigraphError(f"arc {tail}->{head} out of range for n={self.n}")
        if tail == head:
            raise DigraphError(f"self-loop at vertex {tail}")
        w = to_rational(weight)
        if w < 0:
            raise DigraphError(f"negative weight {w} on arc {tail}->{head}")
        if not self.multigraph and (tail, head) in self._pairs:
            raise DigraphError(f"duplicate arc {tail}->{head} in a simple digraph")
        if arc_id is None:
            arc_id = self._next_id
        elif arc_id in self._arcs:
            raise DigraphError(f"duplicate arc id {arc_id}")
        self._arcs[arc_id] = Arc(arc_id, tail, head, w)
        self._pairs.setdefault((tail, head), []).append(arc_id)
        self._next_id = max(self._next_id, arc_id + 1)
        self._triangles = None
        return arc_id

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple], multigraph: bool = False) -> Digraph:
        """Build from ``(tail, head)`` or ``(tail, head, weight)`` tuples."""
        g = cls(n, multigraph=multigraph)
        for a in arcs:
            g.add_arc(*a)
        return g

    # -- queries ----------------------------------------------------------

    @property
    def arcs(self) -> list[Arc]:
        return [self._arcs[i] for i in sorted(self._arcs)]

    @property
    def arc_ids(self) -> list[int]:
        return sorted(self._arcs)

    def arc(self, arc_id: int) -> Arc:
        try:
            return self._arcs[arc_id]
        except KeyError:
            raise DigraphError(f"unknown arc id {arc_id}") from None

    def weight(self, arc_id: int) -> Fraction:
        return self.arc(arc_id).weight

    def arcs_between(self, tail: int, head: int) -> list[int]:
        return list(self._pairs.get((tail, head), ()))

    def has_arc(self, tail: int, head: int) -> bool:
        return (tail, head) in self._pairs

    def __len__(self) -> int:
        return len(self._arcs)

    def __contains__(self, arc_id: object) -> bool:
        return arc_id in self._arcs

    def total_weight(self, arc_ids: Iterable[int] | None = None) -> Fraction:
        ids = self._arcs if arc_ids is None else arc_ids
        return sum((self._arcs[i].weight for i in ids), Fraction(0))

    def is_unit_weight(self) -> bool:
        return all(a.weight == 1 for a in self._arcs.values())

    def out_neighbours(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.n)]
        for (u, v) in self._pairs:
            out[u].add(v)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.multigraph == other.multigraph and self._arcs == other._arcs

    def __repr__(self) -> str:
        kind = "multigraph" if self.multigraph else "digraph"
        return f"<Digraph {kind} n={self.n} arcs={len(self._arcs)}>"

    # -- derived digraphs -------------------------------------------------

    def copy(self) -> Digraph:
        g = Digraph(self.n, multigraph=self.multigraph)
        for a in self.arcs:
            g.add_arc(a.tail, a.head, a.weight, arc_id=a.id)
        g._next_id = self._next_id
        return g

    def remove_arcs(self, arc_ids: Iterable[int]) -> Digraph:
        """Return ``D \\ F``; surviving arcs keep their ids."""
        drop = set(arc_ids)
        unknown = drop - self._arcs.keys()
        if unknown:
            raise DigraphError(f"unknown arc ids {sorted(unknown)}")
        g = Digraph(self.n, multigraph=self.multigraph)
        for a in self.arcs:
            if a.id not in drop:
                g.add_arc(a.tail, a.head, a.weight, arc_id=a.id)
        g._next_id = self._next_id
        return g

    def reweighted(self, weights: dict[int, Rational]) -> Digraph:
        g = Digraph(self.n, multigraph=self.multigraph)
        for a in self.arcs:
            g.add_arc(a.tail, a.head, weights.get(a.id, a.weight), arc_id=a.id)
        return g

    # -- triangles --------------------------------------------------------

    def triangles(self) -> list[Triangle]:
        if self._triangles is None:
            self._triangles = list(_enumerate(self))
        return list(self._triangles)


def _enumerate(g: Digraph) -> Iterator[Triangle]:
    out = g.out_neighbours()
    found = []
    for u in range(g.n):
        for v in out[u]:
            if v < u:
                continue
            for w in out[v]:
                if w <= u or w == v or u not in out[w]:
                    continue
                for a, b, c in itertools.product(
                    g._pairs[(u, v)], g._pairs[(v, w)], g._pairs[(w, u)]
                ):
                    found.append(Triangle((a, b, c), (u, v, w)))
    found.sort()
    return iter(found)


def add_arc(g: Digraph, tail: int, head: int, weight: Rational = 1) -> int:
    return g.add_arc(tail, head, weight)


def remove_arcs(g: Digraph, arc_ids: Iterable[int]) -> Digraph:
    return g.remove_arcs(arc_ids)


def enumerate_triangles(g: Digraph) -> list[Triangle]:
    """All directed triangles, once each, sorted by canonical arc-id triple."""
    return g.triangles()


def is_triangle_free(g: Digraph) -> bool:
    if g._triangles is not None:
        return not g._triangles
    out = g.out_neighbours()
    for u in range(g.n):
        for v in out[u]:
            for w in out[v]:
                if w != u and u in out[w]:
                    return False
    return True


def triangles_by_arc(triangles: Iterable[Triangle]) -> dict[int, list[Triangle]]:
    index: dict[int, list[Triangle]] = {}
    for t in triangles:
        for a in t.arcs:
            index.setdefault(a, []).append(t)
    return index


# -- text format -------------------------------------------------------------


def parse(text: str, multigraph: bool | None = None) -> Digraph:
    """Parse the ``n m`` / ``tail head [weight]`` text format.

    With ``multigraph=None`` the mode is inferred: multigraph iff the input
    repeats an ordered pair.  Arc ids follow line order.
    """
    header: tuple[int, int] | None = None
    records: list[tuple[int, int, int, Fraction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 2:
                raise ParseError(lineno, "expected header 'n m'")
            n, m = (_parse_int(f, lineno) for f in fields)
            if n < 0 or m < 0:
                raise ParseError(lineno, "negative count in header")
            header = (n, m)
            continue
        if len(fields) not in (2, 3):
            raise ParseError(lineno, "expected 'tail head [weight]'")
        tail, head = (_parse_int(f, lineno) for f in fields[:2])
        weight = _parse_weight(fields[2], lineno) if len(fields) == 3 else Fraction(1)
        n = header[0]
        if not (0 <= tail < n and 0 <= head < n):
            raise ParseError(lineno, f"vertex out of range 0..{n - 1}")
        if tail == head:
            raise ParseError(lineno, "self-loop")
        records.append((lineno, tail, head, weight))
    if header is None:
        raise ParseError(1, "missing header 'n m'")
    n, m = header
    if len(records) != m:
        last = records[-1][0] if records else 1
        raise ParseError(last, f"header announces {m} arcs, found {len(records)}")
    if multigraph is None:
        pairs = [(t, h) for _, t, h, _ in records]
        multigraph = len(set(pairs)) != len(pairs)
    g = Digraph(n, multigraph=multigraph)
    for lineno, tail, head, weight in records:
        try:
            g.add_arc(tail, head, weight)
        except DigraphError as exc:
            raise ParseError(lineno, str(exc)) from None
    return g


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"not an integer: {token!r}") from None


def _parse_weight(token: str, lineno: int) -> Fraction:
    num, _, den = token.partition("/")
    try:
        value = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad weight {token!r}") from None
    if value < 0:
        raise ParseError(lineno, f"negative weight {token}")
    return value


def canonical_arcs(g: Digraph) -> list[Arc]:
    return sorted(g.arcs, key=lambda a: (a.tail, a.head, a.id))


def serialize(g: Digraph, header: Iterable[str] = (), annotations: dict[int, str] | None = None) -> str:
    """Canonical text: arcs sorted by ``(tail, head, id)``, explicit weights.

    ``header`` lines are emitted as ``#`` comments before the counts and
    ``annotations`` maps arc ids to trailing per-line comments.
    """
    lines = [f"# {h}" for h in header]
    lines.append(f"{g.n} {len(g)}")
    for a in canonical_arcs(g):
        line = f"{a.tail} {a.head} {format_rational(a.weight)}"
        if annotations and a.id in annotations:
            line += f" # {annotations[a.id]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def canonical(g: Digraph) -> Digraph:
    """Copy of ``g`` with arc ids renumbered in serialization order."""
    h = Digraph(g.n, multigraph=g.multigraph)
    for a in canonical_arcs(g):
        h.add_arc(a.tail, a.head, a.weight)
    return h


def read_annotations(text: str) -> tuple[dict[int, str], dict[str, str]]:
    """Recover per-arc trailing comments and ``# key: value`` header comments.

    Arc ids match those assigned by :func:`parse` on the same text.
    """
    per_arc: dict[int, str] = {}
    headers: dict[str, str] = {}
    seen_header = False
    arc_index = 0
    for raw in text.splitlines():
        body, sep, comment = raw.partition("#")
        body, comment = body.strip(), comment.strip()
        if not body:
            if sep and ":" in comment:
                key, _, value = comment.partition(":")
                headers[key.strip()] = value.strip()
            continue
        if not seen_header:
            seen_header = True
            continue
        if sep:
            per_arc[arc_index] = comment
        arc_index += 1
    return per_arc, headers
