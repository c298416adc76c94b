"""The fourteen acceptance criteria, one test each.

Each test registers itself through the ``criterion`` fixture; the terminal
summary then prints one PASS/FAIL line per criterion.
"""

import math
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from gaugeint.core import (
    UNIT,
    ConstantGauge,
    FunctionGauge,
    Interval,
    MinGauge,
    Piece,
    RealFn,
    TaggedPartition,
    is_fine,
    min_gauge,
    riemann_sum,
)
from gaugeint.cousin import (
    DEFAULT_STRATEGY,
    IRRATIONAL_FIRST,
    MIDPOINT_FIRST,
    fine_partition,
    finite_subcover,
    first_uncovered,
    verify_cover,
)
from gaugeint.exact import SQRT2, Tag, floor_tag
from gaugeint.fan import (
    BinSeq,
    constant_functional,
    cover_transfer,
    cover_transfer_inv,
    first_bit_functional,
    random_functional,
    theta,
    verify_scf,
    xi_map,
)
from gaugeint.funcs import (
    DIRICHLET_FN,
    BuiltinFn,
    DirichletGauge,
    abs_kappa_partial,
    builtin,
    dirichlet_modulus,
    kappa_modulus,
    poly,
    sqrt_recip_modulus,
    step,
)
from gaugeint.integrator import (
    DivergenceReport,
    IntegralResult,
    additivity_check,
    cauchy_gap,
    gauge_integrate,
    hake_limit,
    riemann_integrate,
)
from gaugeint.lindelof import FiniteTree, countable_subcover_reals, wellfounded_via_xi

from oracles import alt_harmonic, floor_log2, harmonic, maximal_paths, rational_position


def test_c01_sqrt_recip_integral(criterion):
    criterion(1, "integral of x^-1/2 on [0,1] is 2 within 1e-3 in under 30 s")
    t0 = time.perf_counter()
    r = gauge_integrate(builtin("sqrt_recip"), eps_min=F(1, 128), extrapolate=True)
    elapsed = time.perf_counter() - t0
    criterion.note(f"value {r.value:.6f}, raw {r.raw_value:.6f} at eps 2^-7, {elapsed:.2f} s")
    assert abs(r.value - 2) < 1e-3
    assert elapsed < 30


def test_c02_dirichlet_integral(criterion):
    criterion(2, "integral of Dirichlet's function is 0, bound <= 4 eps at eps = 2^-12")
    eps = F(1, 2**12)
    checked = []

    def counted(t):
        checked.append(t)
        return DIRICHLET_FN.evaluator(t)

    f = BuiltinFn("dirichlet", RealFn(counted, "dirichlet", exact_tags=True), dirichlet_modulus)
    r = gauge_integrate(f, eps_min=eps)
    assert r.converged and abs(r.value) <= 4 * eps and r.error_bound <= 4 * eps
    for strategy in (MIDPOINT_FIRST, IRRATIONAL_FIRST):
        assert abs(gauge_integrate(f, eps_min=eps, strategy=strategy).value) <= 4 * eps
    assert cauchy_gap(f, None, eps) <= 4 * eps

    # partitions mixing rational tags with tags that differ from a rational
    # by sqrt2 * 1e-30, which binary64 cannot tell apart
    rng = random.Random(2)
    n = 1024
    for _ in range(2):
        items, expect = [], F(0)
        for i in range(n):
            lo, hi = F(i, n), F(i + 1, n)
            q = lo + (hi - lo) * F(rng.randint(1, 99), 100)
            if rng.random() < 0.5:
                items.append((Tag(q), (lo, hi)))
                expect += hi - lo
            else:
                items.append((Tag(q) + SQRT2 * F(1, 10**30), (lo, hi)))
        s = riemann_sum(f.fn, TaggedPartition(items))
        assert s == pytest.approx(float(expect), abs=1e-12)
    criterion.note(f"value {r.value}, bound {r.error_bound:.2e}, {len(checked)} tags tested for rationality")
    assert len(checked) >= 1000


def test_c03_kappa(criterion):
    criterion(3, "integral of kappa is ln 2 within 1e-2; |kappa| partials are H_k")
    r = gauge_integrate(builtin("kappa"), eps_min=F(1, 64))
    assert abs(r.value - math.log(2)) < 1e-2
    assert r.value == pytest.approx(alt_harmonic(64), abs=1e-9)
    parts = [abs_kappa_partial(k) for k in range(1, 16)]
    for k, v in enumerate(parts, start=1):
        assert abs(v - float(harmonic(k))) < 1e-9
        assert v >= math.log(k + 1)
    assert all(b > a for a, b in zip(parts, parts[1:]))
    criterion.note(f"value {r.value:.6f} vs ln2 {math.log(2):.6f}; H_15 = {parts[-1]:.6f}")


def _poly_integral(cs):
    return sum(F(c) / (i + 1) for i, c in enumerate(cs))


def test_c04_consistency_with_riemann(criterion):
    criterion(4, "gauge vs Riemann on 20 random polynomials of degree <= 5")
    rng = random.Random(4)
    eps = F(1, 2**14)
    worst = 0.0
    for _ in range(20):
        deg = rng.randint(0, 5)
        cs = [F(rng.randint(-50, 50), rng.randint(1, 10)) for _ in range(deg + 1)]
        f = poly(cs)
        g = gauge_integrate(f, eps_min=eps, eps_max=eps)
        R = riemann_integrate(f, tol=1e-9)
        assert R.converged
        diff = abs(g.value - R.value)
        assert diff <= g.error_bound + R.error_bound + 1e-6
        exact = float(_poly_integral(cs))
        assert abs(g.value - exact) <= g.error_bound
        worst = max(worst, diff / (g.error_bound + R.error_bound))
    criterion.note(f"largest |gauge - Riemann| / summed bounds = {worst:.3f}")


def test_c05_uniqueness(criterion):
    criterion(5, "two moduli for x^-1/2 agree within 4 eps at eps = 2^-10")
    f = builtin("sqrt_recip")
    eps = F(1, 2**10)
    a = gauge_integrate(f, sqrt_recip_modulus, eps_min=eps, eps_max=eps)
    b = gauge_integrate(f, lambda e: sqrt_recip_modulus(e, F(1, 2)), eps_min=eps, eps_max=eps)
    c = gauge_integrate(f, lambda e: min_gauge(sqrt_recip_modulus(e), sqrt_recip_modulus(e, F(1, 2))),
                        eps_min=eps, eps_max=eps)
    assert abs(a.value - b.value) <= 4 * eps
    assert abs(a.value - c.value) <= 4 * eps and abs(b.value - c.value) <= 4 * eps
    criterion.note(f"|difference| = {abs(a.value - b.value):.3e} <= {float(4 * eps):.3e}; "
                   f"{a.levels[-1]['pieces']} and {b.levels[-1]['pieces']} pieces")


CAUCHY_PAIRS = [builtin("sqrt_recip"), builtin("dirichlet"), builtin("kappa"),
                poly([1, -2, 3]), step([F(1, 3)], [0, 1])]


def test_c06_cauchy(criterion):
    criterion(6, "cauchy_gap < eps for the shipped pairs at eps = 2^-4, 2^-6, 2^-8")
    worst = []
    for f in CAUCHY_PAIRS:
        ratios = []
        for n in (4, 6, 8):
            eps = F(1, 2**n)
            gap = cauchy_gap(f, None, eps, trials=20, seed=n)
            assert gap < eps, f"{f.name} at eps=2^-{n}: gap {gap}"
            ratios.append(gap / float(eps))
        worst.append(f"{f.name.split('(')[0]} {max(ratios):.3f}")
    criterion.note("largest gap/eps: " + ", ".join(worst))


def test_c07_additivity(criterion):
    criterion(7, "additivity with the splitting gauge at 1/3, 1/2, sqrt2/2")
    eps = F(1, 64)
    pairs = [(builtin("sqrt_recip"), sqrt_recip_modulus), (builtin("kappa"), kappa_modulus)]
    worst = 0.0
    for f, phi in pairs:
        for x in (Tag(F(1, 3)), Tag(F(1, 2)), SQRT2 / 2):
            d = additivity_check(f, phi, phi, x, eps)
            assert d <= 4 * eps + 1e-6, f"{f.name} at {x}"
            worst = max(worst, d)
    criterion.note(f"largest defect {worst:.3e} <= {float(4 * eps):.3e}")


def test_c08_hake(criterion):
    criterion(8, "Hake: x^-1/2 limit is 2; 1/x diverges")
    r = hake_limit(builtin("sqrt_recip"))
    assert isinstance(r, IntegralResult) and abs(r.value - 2) < 1e-2
    d = hake_limit(builtin("recip"))
    assert isinstance(d, DivergenceReport) and d.diverges
    assert len(d.partials) >= 5
    assert all(b > a for a, b in zip(d.partials, d.partials[1:]))
    criterion.note(f"limit {r.value:.5f}; 1/x partials {d.partials[0]:.3f} .. {d.partials[-1]:.3f} ({len(d.partials)})")


# fineness -----------------------------------------------------------------------


def _random_gauge(rng, kinds=6):
    kind = rng.randrange(kinds)
    if kind == 0:
        return ConstantGauge(F(1, rng.randint(1, 64)))
    if kind == 1:
        a, b = F(1, rng.randint(2, 200)), F(rng.randint(0, 5), rng.randint(5, 20))
        return FunctionGauge(lambda t, a=a, b=b: a + b * t, "affine")
    if kind == 2:
        return sqrt_recip_modulus(F(1, rng.randint(2, 8)))
    if kind == 3:
        return dirichlet_modulus(F(1, rng.randint(2, 32)))
    if kind == 4:
        return kappa_modulus(F(1, rng.choice([2, 4, 8])))
    # no kappa inside a minimum: with Dirichlet's gauge it would need tags at
    # a_k = 1 - 2^-k with radius about 2^-(2^k)
    return min_gauge(_random_gauge(rng, 4), _random_gauge(rng, 4))


def _disturbed(rng, P):
    """A fine partition, with two neighbouring pieces merged half the time."""
    pieces = [(p.tag, (p.interval.lo, p.interval.hi)) for p in P]
    if len(pieces) > 400:
        return P
    if rng.random() < 0.5 and len(pieces) >= 2:
        i = rng.randrange(len(pieces) - 1)
        (t, (lo, _)), (_, (_, hi)) = pieces[i], pieces[i + 1]
        pieces[i : i + 2] = [(t, (lo, hi))]
    return TaggedPartition(pieces)


def _random_partition(rng):
    n = rng.randint(1, 8)
    cuts = sorted({F(rng.randint(1, 63), 64) for _ in range(n - 1)})
    pts = [F(0)] + cuts + [F(1)]
    items = []
    for lo, hi in zip(pts, pts[1:]):
        t = rng.choice([Tag(lo), Tag(hi), Tag((lo + hi) / 2), (Tag(lo) + hi) / 2 + SQRT2 * (hi - lo) / 8])
        items.append((t, (lo, hi)))
    return TaggedPartition(items)


def _fits(gauge, t, reach):
    """reach <= gauge(t), recomputed without the gauge's own shortcuts."""
    if isinstance(gauge, MinGauge):
        return _fits(gauge.d1, t, reach) and _fits(gauge.d2, t, reach)
    if isinstance(gauge, DirichletGauge) and t.is_rational():
        # radius eps/2^(k+1) with k the enumeration position of t, which
        # can be ~2^63 for tags like 1/64
        if reach == 0:
            return True
        assert reach.is_rational()
        k = rational_position(t.a)
        return k + 1 <= floor_log2(gauge.eps / reach.a)
    return reach <= gauge.radius(t)


def _recheck(gauge, P):
    for p in P:
        t, lo, hi = p.tag, p.interval.lo, p.interval.hi
        if not lo <= t <= hi:
            return False
        if not _fits(gauge, t, max(t - lo, hi - t)):
            return False
    return True


def test_c09_fineness_soundness(criterion):
    criterion(9, "is_fine soundness on 10^4 random (gauge, partition) pairs")
    rng = random.Random(9)
    # partitioner outputs first; they double as a pool of near-fine partitions
    pool = []
    for _ in range(300):
        g = _random_gauge(rng)
        P = fine_partition(g, UNIT, rng.choice([DEFAULT_STRATEGY, MIDPOINT_FIRST, IRRATIONAL_FIRST]))
        assert is_fine(g, P)
        if len(P) <= 5000:
            assert _recheck(g, P)
        pool.append((g, P))
    fine_count = 0
    for _ in range(10_000):
        if rng.random() < 0.4:
            g, P = rng.choice(pool)
            P = _disturbed(rng, P)
        else:
            g, P = _random_gauge(rng), _random_partition(rng)
        verdict = is_fine(g, P)
        if verdict:
            fine_count += 1
            assert _recheck(g, P)
        elif all(isinstance(b, Piece) for b in P.blocks):
            assert not _recheck(g, P)
    criterion.note(f"{fine_count} of 10000 pairs fine, all rechecked; {len(pool)} partitioner outputs fine")
    assert 0 < fine_count < 10_000


# covers -------------------------------------------------------------------------

GRID = 2**16


def _grid_uncovered(intervals):
    """First grid point k/2^16 of [0, 1] outside every open interval."""
    covered = np.zeros(GRID + 1, dtype=bool)
    for iv in intervals:
        first = floor_tag(iv.lo * GRID) + 1
        last = -floor_tag(-iv.hi * GRID) - 1
        first, last = max(first, 0), min(last, GRID)
        if first <= last:
            covered[first : last + 1] = True
    idx = np.flatnonzero(~covered)
    return None if idx.size == 0 else F(int(idx[0]), GRID)


def _random_family(rng):
    k = rng.randint(1, 8)
    style = rng.randrange(3)
    out = []
    for _ in range(k):
        if style == 0:
            c, w = Tag(F(rng.randint(0, 1024), 1024)), F(rng.randint(1, 400), 1024)
        elif style == 1:
            c, w = Tag(F(rng.randint(0, 60), 60)), F(rng.randint(1, 30), 61)
        else:
            c = Tag(F(rng.randint(0, 100), 100)) + SQRT2 * F(rng.randint(-3, 3), 1000)
            w = F(rng.randint(1, 40), 99)
        out.append(Interval.open(c - w, c + w))
    return out


def test_c10_verify_cover_vs_grid(criterion):
    criterion(10, "verify_cover vs a 2^-16 grid on 10^3 random families")
    rng = random.Random(10)
    covers = sub_grid = 0
    for _ in range(1000):
        ivs = _random_family(rng)
        sweep = verify_cover(ivs, UNIT)
        witness = first_uncovered(ivs, UNIT)
        grid = _grid_uncovered(ivs)
        assert sweep == (witness is None)
        if witness is not None:
            # the sweep's witness is really uncovered (exact check)
            assert 0 <= witness <= 1 and not any(iv.lo < witness < iv.hi for iv in ivs)
        if grid is not None:
            assert not sweep
        elif not sweep:
            sub_grid += 1  # a gap the grid is too coarse to see; exact sweep decides
        covers += sweep
    criterion.note(f"{covers} covering families, {1000 - covers} not; {sub_grid} gaps finer than the grid")
    assert 0 < covers < 1000


# fan, transfer, Lindelof ------------------------------------------------------------


def test_c11_theta(criterion):
    criterion(11, "theta passes verify_scf exhaustively at depth 10")
    builtins = [constant_functional(n) for n in range(0, 6)] + [first_bit_functional()]
    for G in builtins:
        assert verify_scf(theta(G), G, 10)
    for seed in range(100):
        G = random_functional(seed)
        assert G.continuity_bound <= 10
        assert verify_scf(theta(G), G, 10)
    assert [g.prefix for g in theta(constant_functional(2))] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    criterion.note(f"{len(builtins)} builtins and 100 random functionals")


def test_c12_cover_transfer(criterion):
    criterion(12, "cover transfer preserves coverage in both directions")
    gauges = [ConstantGauge(1), ConstantGauge(F(1, 10)), FunctionGauge(lambda t: (t + 1) / 8, "(x+1)/8")]
    sizes = []
    for psi in gauges:
        assert finite_subcover(psi, UNIT).verified
        G = cover_transfer_inv(psi)
        out = theta(G)
        assert verify_scf(out, G, max(1, max(G(g) for g in out)))
        for g in out:
            n = G(g)
            lo = xi_map(BinSeq(g.take(n)))
            assert psi.admits(xi_map(g), lo, lo + F(1, 2**n), strict=True)
        sizes.append(len(out))
    functionals = [constant_functional(0), constant_functional(2), first_bit_functional()]
    for Fn in functionals:
        assert verify_scf(theta(Fn), Fn, 10)
        sc = finite_subcover(cover_transfer(Fn), UNIT)
        assert sc.verified
        sizes.append(len(sc))
    criterion.note(f"sizes {sizes}")


def test_c13_lindelof_blocks(criterion):
    criterion(13, "countable_subcover_reals blocks cover [-N, N] for N <= 4")
    gauges = [ConstantGauge(1), FunctionGauge(lambda t: 1 / (1 + t * t), "1/(1+x^2)")]
    counts = []
    for g in gauges:
        cs = countable_subcover_reals(g, N_max=4)
        for N in range(1, 5):
            ivs = [Interval.around(*cs[i]) for i in cs.block(N)]
            assert verify_cover(ivs, Interval(-N, N))
            assert cs.covers(N)
        counts.append(len(cs.upto(4)))
    criterion.note(f"{counts} pairs emitted up to N = 4")


def test_c14_wellfounded(criterion):
    criterion(14, "wellfounded_via_xi matches path search on random trees")
    rng = random.Random(14)
    n = disagreements = wf_count = 0
    for _ in range(600):
        B, D = rng.randint(1, 3), rng.randint(1, 3)
        p = rng.choice([0.3, 0.5, 0.7, 0.9])
        nodes = set()
        if rng.random() < 0.95:
            nodes.add(())
            stack = [()]
            while stack:
                s = stack.pop()
                if len(s) < D:
                    for v in range(B):
                        if rng.random() < p:
                            nodes.add(s + (v,))
                            stack.append(s + (v,))
        wf = wellfounded_via_xi(FiniteTree.from_nodes(B, D, nodes), cross_check=False)
        disagreements += wf == maximal_paths(nodes, B, D)
        wf_count += wf
        n += 1
    criterion.note(f"{n} trees ({wf_count} well-founded), {disagreements} disagreements")
    assert disagreements == 0 and n >= 500 and 0 < wf_count < n
