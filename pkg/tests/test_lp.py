from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from dtpack.digraph import Digraph
from dtpack.generators import gen_carousel5, gen_random_tournament, gen_transitive
from dtpack.lp import (
    FractionalCover,
    FractionalPacking,
    InfeasibleWitness,
    certify_duality,
    check_complementary_slackness,
    check_cover,
    check_packing,
    covering_lp,
    maximize,
    solve_cover_lp,
    solve_packing_lp,
)

from .conftest import bidirected_k3, c3, digraphs


def highs_packing(g: Digraph) -> float:
    """Fractional packing optimum from scipy's HiGHS, as an independent float oracle."""
    ts = g.triangles()
    if not ts:
        return 0.0
    ids = g.arc_ids
    A = np.zeros((len(ids), len(ts)))
    for j, t in enumerate(ts):
        for a in t.arcs:
            A[ids.index(a), j] += 1
    b = [float(g.weight(a)) for a in ids]
    res = linprog(-np.ones(len(ts)), A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


def vertex_enumeration(c, A, b) -> Fraction:
    """Exact LP maximum by solving every square subsystem of tight constraints."""
    n = len(c)
    rows = [list(r) for r in A] + [[-int(i == j) for j in range(n)] for i in range(n)]
    rhs = list(b) + [0] * n
    best = None
    for tight in itertools.combinations(range(len(rows)), n):
        M = sympy.Matrix([rows[i] for i in tight])
        if M.det() == 0:
            continue
        x = M.LUsolve(sympy.Matrix([rhs[i] for i in tight]))
        x = [Fraction(int(v.p), int(v.q)) for v in x]
        if all(sum(r[j] * x[j] for j in range(n)) <= h for r, h in zip(rows, rhs)):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else max(best, val)
    return best


class TestMaximize:
    @settings(max_examples=60)
    @given(st.data())
    def test_matches_vertex_enumeration(self, data):
        n = data.draw(st.integers(1, 3))
        m = data.draw(st.integers(1, 4))
        small = st.integers(0, 4)
        c = [data.draw(st.integers(-2, 5)) for _ in range(n)]
        A = [[data.draw(small) for _ in range(n)] for _ in range(m)]
        # every variable appears in a row with a positive coefficient, so the LP is bounded
        for j in range(n):
            if all(row[j] == 0 for row in A):
                A[0][j] = 1
        b = [data.draw(small) for _ in range(m)]
        value, x = maximize([Fraction(v) for v in c], [{j: Fraction(v) for j, v in enumerate(r) if v} for r in A], [Fraction(v) for v in b])
        assert value == vertex_enumeration(c, A, b)
        assert all(v >= 0 for v in x)
        assert all(sum(r[j] * x[j] for j in range(n)) <= h for r, h in zip(A, b))
        assert sum(ci * xi for ci, xi in zip(c, x)) == value

    def test_rational_data(self):
        # max x + y, x + 2y <= 3/2, 3x + y <= 2
        value, x = maximize(
            [Fraction(1), Fraction(1)],
            [{0: Fraction(1), 1: Fraction(2)}, {0: Fraction(3), 1: Fraction(1)}],
            [Fraction(3, 2), Fraction(2)],
        )
        assert x == [Fraction(1, 2), Fraction(1, 2)] and value == 1

    def test_negative_rhs_rejected(self):
        with pytest.raises(ValueError):
            maximize([Fraction(1)], [{0: Fraction(1)}], [Fraction(-1)])

    def test_large_coefficients_stay_exact(self):
        big = Fraction(10**30 + 7, 3)
        value, _ = maximize([Fraction(1)], [{0: big}], [Fraction(1)])
        assert value == 1 / big

    def test_huge_scale_matches_unit_scale(self):
        rows = [{0: Fraction(1), 1: Fraction(2), 2: Fraction(1)}, {0: Fraction(3), 2: Fraction(1)}, {1: Fraction(1), 2: Fraction(4)}]
        rhs = [Fraction(4), Fraction(5), Fraction(6)]
        obj = [Fraction(2), Fraction(3), Fraction(1)]
        base, x = maximize(obj, rows, rhs)
        k = Fraction(10**25, 7)
        scaled, y = maximize([c * k for c in obj], [{j: v * k for j, v in r.items()} for r in rows], [b * k for b in rhs])
        assert scaled == base * k and x == y

    def test_covering_lp_bounds(self):
        value, c = covering_lp([(0, 1), (1, 2)], {0: Fraction(1), 1: Fraction(5), 2: Fraction(1)})
        assert value == 2 and c == {0: 1, 1: 0, 2: 1}


class TestExamples:
    def test_c3(self):
        m = solve_packing_lp(c3())
        assert m.weight == 1 and list(m.values.values()) == [1]
        assert solve_cover_lp(c3()).weight == 1

    def test_triangle_free(self):
        g = gen_transitive(5)
        assert solve_packing_lp(g).weight == 0
        c = solve_cover_lp(g)
        assert c.weight == 0 and set(c.values.values()) == {0}
        assert certify_duality(g).value == 0

    def test_carousel(self):
        g = gen_carousel5()
        cert = certify_duality(g)
        assert cert.value == Fraction(5, 2)
        assert check_complementary_slackness(g, cert.packing, cert.cover).ok

    def test_bidirected_k3(self):
        assert certify_duality(bidirected_k3()).value == 2

    def test_carousel_hand_certificate(self):
        g = gen_carousel5()
        half = Fraction(1, 2)
        m = FractionalPacking({t: half for t in g.triangles()})
        dist2 = {a.id: half if (a.head - a.tail) % 5 == 2 else Fraction(0) for a in g.arcs}
        c = FractionalCover(dist2, Fraction(5, 2))
        assert m.weight == c.weight == Fraction(5, 2)
        assert check_complementary_slackness(g, m, c).ok


class TestSlackness:
    def test_tight_pair(self):
        g = c3()
        (t,) = g.triangles()
        report = check_complementary_slackness(
            g, FractionalPacking({t: Fraction(1)}), FractionalCover({0: Fraction(1)}, Fraction(1))
        )
        assert report.ok

    def test_unsaturated_arc_reported(self):
        g = c3()
        (t,) = g.triangles()
        report = check_complementary_slackness(
            g, FractionalPacking({t: Fraction(1, 2)}), FractionalCover({0: Fraction(1)}, Fraction(1))
        )
        assert not report.ok
        assert [a for a, _, _ in report.unsaturated_arcs] == [0]

    def test_loose_triangle_reported(self):
        g = c3()
        (t,) = g.triangles()
        c = FractionalCover({0: Fraction(1), 1: Fraction(1)}, Fraction(2))
        report = check_complementary_slackness(g, FractionalPacking({t: Fraction(1)}), c)
        assert report.loose_triangles == ((t, Fraction(2)),)

    def test_infeasible_inputs_rejected(self):
        g = c3()
        (t,) = g.triangles()
        with pytest.raises(InfeasibleWitness):
            check_packing(g, FractionalPacking({t: Fraction(2)}))
        with pytest.raises(InfeasibleWitness):
            check_cover(g, FractionalCover({0: Fraction(1, 2)}, Fraction(1, 2)))
        with pytest.raises(InfeasibleWitness):
            check_cover(g, FractionalCover({0: Fraction(3, 2)}, Fraction(3, 2)))


class TestProperties:
    @settings(max_examples=80)
    @given(digraphs(max_n=6))
    def test_unit_weight_optimum_matches_highs(self, g):
        cert = certify_duality(g)
        assert abs(float(cert.value) - highs_packing(g)) < 1e-7

    @settings(max_examples=60)
    @given(digraphs(max_n=6, multigraph=True, weighted=True))
    def test_weighted_multigraph_duality(self, g):
        cert = certify_duality(g)
        assert abs(float(cert.value) - highs_packing(g)) < 1e-7
        assert check_complementary_slackness(g, cert.packing, cert.cover).ok
        assert all(v == Fraction(v.numerator, v.denominator) for v in cert.cover.values.values())

    @settings(max_examples=40)
    @given(digraphs(max_n=6, multigraph=True), st.data())
    def test_weak_duality_against_arbitrary_feasible_pairs(self, g, data):
        ts = g.triangles()
        cert = certify_duality(g)
        # scale an arbitrary packing down until feasible
        raw = {t: Fraction(data.draw(st.integers(0, 3))) for t in ts}
        load = FractionalPacking(raw).load()
        worst = max((load[a] / g.weight(a) for a in load if g.weight(a)), default=Fraction(0))
        m = FractionalPacking({t: v / worst for t, v in raw.items()} if worst > 1 else raw)
        check_packing(g, m)
        # all-ones is always a feasible cover
        ones = FractionalCover({a: Fraction(1) for a in g.arc_ids}, g.total_weight())
        assert m.weight <= cert.value <= ones.weight

    def test_tournaments_against_highs(self):
        for seed in range(5):
            g = gen_random_tournament(10, seed)
            assert abs(float(certify_duality(g).value) - highs_packing(g)) < 1e-7
