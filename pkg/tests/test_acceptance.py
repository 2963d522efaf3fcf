"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers,
then asserts.  Run ``python3 tests/test_acceptance.py`` for the same lines
without pytest.
"""

from __future__ import annotations

import functools
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import pytest

from dtpack.digraph import Digraph, is_triangle_free
from dtpack.exact import census_digraph, is_cover, solve_nu_t, solve_tau_t, triangle_free_census
from dtpack.generators import (
    backward_witness,
    bipartition_cover,
    gen_carousel5,
    gen_planted_carousels,
    gen_random_digraph,
    gen_random_tournament,
    gen_sparse,
    ordering_cover,
)
from dtpack.harness import verify_frequencies
from dtpack.lp import certify_duality, check_complementary_slackness, solve_cover_lp, solve_packing_lp
from dtpack.rounding import (
    BOUND,
    all_outcomes_valid,
    derandomized_cover,
    peel_heavy_arcs,
    triangle_probability_sums,
)


@dataclass(frozen=True)
class Verdict:
    number: int
    title: str
    ok: bool
    detail: str

    @property
    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number:>2}: {self.title} ({self.detail})"


def _emit(verdict: Verdict, capsys=None) -> None:
    if capsys is None:
        print(verdict.line)
    else:
        with capsys.disabled():
            print("\n" + verdict.line)


# -- shared instance pool for criteria 3, 4 and 7 ------------------------------------


def pool_specs() -> list[tuple[str, int, int]]:
    specs = [("random_tournament", n, s) for n in (6, 8, 10, 12) for s in range(10)]
    specs += [("random_digraph", n, s) for n in (6, 8, 10) for s in range(10)]
    specs += [("sparse", n, s) for n in (15, 20, 25, 30) for s in range(8)]
    return specs


def build(kind: str, n: int, seed: int) -> Digraph:
    if kind == "random_tournament":
        return gen_random_tournament(n, seed)
    if kind == "random_digraph":
        return gen_random_digraph(n, seed)
    return gen_sparse(n, seed).digraph


@dataclass
class PoolResult:
    label: str
    packing_weight: Fraction
    cover_weight: Fraction
    nu_t: int
    nu_complete: bool
    tau_t: Fraction
    tau_complete: bool
    rounded: Fraction
    rounded_valid: bool
    cs_ok: bool
    max_triangle_sum: Fraction


@functools.lru_cache(maxsize=None)
def pool() -> tuple[PoolResult, ...]:
    out = []
    for kind, n, seed in pool_specs():
        g = build(kind, n, seed)
        m, c = solve_packing_lp(g), solve_cover_lp(g)
        peel = peel_heavy_arcs(g)
        m_res = solve_packing_lp(peel.residual)
        cs = check_complementary_slackness(peel.residual, m_res, peel.cover)
        outcome = derandomized_cover(g, peel)
        nu, tau = solve_nu_t(g), solve_tau_t(g)
        sums = [s for _, s in triangle_probability_sums(m_res, peel.cover)]
        out.append(
            PoolResult(
                f"{kind}-n{n}-s{seed}",
                m.weight,
                c.weight,
                nu.value,
                nu.complete,
                tau.weight,
                tau.complete,
                outcome.weight,
                is_cover(g, outcome.cover.arcs),
                cs.ok,
                max(sums, default=Fraction(0)),
            )
        )
    return tuple(out)


# -- criteria -------------------------------------------------------------------------


def criterion_1() -> Verdict:
    start = time.perf_counter()
    g = gen_carousel5()
    nu, tau = solve_nu_t(g), solve_tau_t(g)
    cert = certify_duality(g)
    report = check_complementary_slackness(g, cert.packing, cert.cover)
    elapsed = time.perf_counter() - start
    ok = (
        nu.value == 2
        and nu.complete
        and tau.weight == 3
        and tau.complete
        and cert.value == Fraction(5, 2)
        and cert.packing.weight == cert.cover.weight
        and report.ok
        and elapsed < 1.0
    )
    detail = f"nu_t={nu.value} tau_t={tau.weight} nu*={cert.value} cs_empty={report.ok} {elapsed:.3f}s < 1s"
    return Verdict(1, "carousel ground truth", ok, detail)


def criterion_2() -> Verdict:
    start = time.perf_counter()
    ratios = []
    complete = True
    for k in range(1, 5):
        g = gen_planted_carousels(k)
        nu, tau = solve_nu_t(g), solve_tau_t(g)
        complete &= nu.complete and tau.complete and nu.value == 2 * k and tau.weight == 3 * k
        ratios.append(Fraction(tau.weight) / nu.value)
    elapsed = time.perf_counter() - start
    ok = complete and all(r == Fraction(3, 2) for r in ratios) and elapsed < 60
    detail = f"ratios {[str(r) for r in ratios]} {elapsed:.2f}s < 60s"
    return Verdict(2, "planted carousels attain 3/2", ok, detail)


def criterion_3() -> Verdict:
    rows = pool()
    bad = [r.label for r in rows if not r.rounded_valid or r.rounded > BOUND * r.packing_weight]
    worst = max((r.rounded / r.packing_weight for r in rows if r.packing_weight), default=Fraction(0))
    ok = len(rows) >= 100 and not bad
    detail = f"{len(rows)} instances, {len(bad)} violations, max rounded/nu* = {float(worst):.4f}"
    return Verdict(3, "derandomized cover <= 1.8 nu*", ok, detail + (f" {bad[:5]}" if bad else ""))


def criterion_4() -> Verdict:
    rows = pool()
    unequal = [r.label for r in rows if r.packing_weight != r.cover_weight]
    exact = [r for r in rows if r.nu_complete and r.tau_complete]
    broken = [r.label for r in exact if not r.nu_t <= r.packing_weight <= r.tau_t]
    ok = not unequal and not broken
    detail = f"{len(rows)} duality checks, {len(unequal)} unequal; sandwich on {len(exact)} exact, {len(broken)} broken"
    return Verdict(4, "LP duality and sandwich", ok, detail)


def criterion_5() -> Verdict:
    checked = 0
    failures = []
    instances = 0
    for seed in range(50):
        g = gen_random_digraph(8, seed) if seed % 2 else gen_random_tournament(8, seed)
        peel = peel_heavy_arcs(g)
        k, bad = all_outcomes_valid(peel.residual, peel.cover)
        checked += k
        instances += 1
        failures.extend((seed, mask, name) for mask, name in bad)
    ok = instances >= 50 and checked == instances * 3 * 2**8 and not failures
    detail = f"{instances} instances, {checked} outcomes, {len(failures)} exceptions"
    return Verdict(5, "every partition/choice outcome is a cover", ok, detail)


def criterion_6() -> Verdict:
    doc = verify_frequencies(samples=10_000, seed=0, tolerance=0.02)
    bucket_checks = [c for c in doc.checks if c["name"].startswith("bucket")]
    ok = len(bucket_checks) == 6 and all(c["status"] == "pass" for c in doc.checks)
    means = ", ".join(f"{b} {v['mean_frequency']:.3f}/{v['expected']}" for b, v in doc.values.items())
    return Verdict(6, "inclusion frequencies within 0.02", ok, means)


def criterion_7() -> Verdict:
    rows = pool()
    certified = [r for r in rows if r.cs_ok]
    worst = max((r.max_triangle_sum for r in certified), default=Fraction(0))
    ok = len(certified) == len(rows) and worst <= BOUND
    detail = f"{len(certified)}/{len(rows)} CS-certified, max p-sum {worst} <= 9/5"
    return Verdict(7, "per-triangle probability sums", ok, detail)


def criterion_8() -> Verdict:
    start = time.perf_counter()
    c3, c4 = triangle_free_census(3), triangle_free_census(4)
    c2 = triangle_free_census(2)
    bigon = census_digraph(2, c2.extremal_example)
    elapsed = time.perf_counter() - start
    ok = (
        c3.digraphs == 64
        and c4.digraphs == 4096
        and not c3.violations
        and not c4.violations
        and c2.max_arcs == 2 == c2.bound
        and len(bigon) == 2
        and is_triangle_free(bigon)
        and elapsed < 10
    )
    detail = f"max arcs n=3: {c3.max_arcs}<={c3.bound}, n=4: {c4.max_arcs}<={c4.bound}, bigon {c2.max_arcs}, {elapsed:.2f}s < 10s"
    return Verdict(8, "triangle-free digraphs have <= n^2/2 arcs", ok, detail)


def criterion_9() -> Verdict:
    worst = []
    ok = True
    for n in (9, 15, 21):
        sizes = []
        for seed in range(20):
            g = gen_random_tournament(n, seed)
            cover = ordering_cover(g, list(range(n)))
            ok &= len(cover) <= n * (n - 1) / 4 and is_triangle_free(g.remove_arcs(cover.arcs))
            sizes.append(len(cover))
        worst.append(f"n={n}: max |F|={max(sizes)} <= {n * (n - 1) / 4:g}")
    return Verdict(9, "ordering cover on random tournaments", ok, "; ".join(worst))


def criterion_10() -> Verdict:
    missing = 0
    failed = 0
    backward = 0
    covers = 0
    for n in (30, 50):
        for seed in range(10):
            inst = gen_sparse(n, seed)
            for a in inst.backward:
                backward += 1
                missing += backward_witness(inst, a) is None
            for s in range(5):
                covers += 1
                try:
                    cover, _ = bipartition_cover(inst, s)
                    failed += not is_triangle_free(inst.digraph.remove_arcs(cover.arcs))
                except AssertionError:
                    failed += 1
    ok = missing == 0 and failed == 0
    detail = f"{backward} backward arcs, {missing} without witness; {covers} bipartition covers, {failed} invalid"
    return Verdict(10, "sparse model structure", ok, detail)


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion, capsys):
    verdict = criterion()
    _emit(verdict, capsys)
    assert verdict.ok, verdict.line


def main() -> int:
    verdicts = [c() for c in CRITERIA]
    for v in verdicts:
        _emit(v)
    return 0 if all(v.ok for v in verdicts) else 1


if __name__ == "__main__":
    sys.exit(main())
