from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaugeint.core import (
    UNIT,
    ConstantGauge,
    FunctionGauge,
    Interval,
    Piece,
    RealFn,
    Run,
    TaggedPartition,
    is_fine,
    mesh,
    min_gauge,
    riemann_sum,
    split_gauge,
    uniform_partition,
)
from gaugeint.errors import DomainError, EmptyPartitionError, MalformedPartitionError, UndefinedValueError
from gaugeint.exact import SQRT2, Tag
from gaugeint.funcs import DIRICHLET_FN, dirichlet_modulus, rational_index, sqrt_recip_modulus

ONE = RealFn(lambda t: 1.0, "one", vectorized=lambda xs: np.ones_like(xs))
IDENT = RealFn(lambda t: float(t), "x", vectorized=lambda xs: xs)


@st.composite
def partitions(draw, max_pieces=12):
    """Random tagged partitions of [0, 1] with rational or sqrt2-offset tags."""
    n = draw(st.integers(1, max_pieces))
    cuts = sorted(set(draw(st.lists(st.fractions(0, 1, max_denominator=64), min_size=n - 1, max_size=n - 1))))
    pts = [F(0)] + [c for c in cuts if 0 < c < 1] + [F(1)]
    items = []
    for lo, hi in zip(pts, pts[1:]):
        kind = draw(st.sampled_from(["lo", "hi", "mid", "irr"]))
        t = {"lo": Tag(lo), "hi": Tag(hi), "mid": Tag((lo + hi) / 2),
             "irr": (Tag(lo) + hi) / 2 + SQRT2 * (hi - lo) / 8}[kind]
        items.append((t, (lo, hi)))
    return TaggedPartition(items)


# mesh ----------------------------------------------------------------------


def test_mesh_examples():
    assert mesh(uniform_partition(UNIT, 4)) == F(1, 4)
    assert mesh(TaggedPartition([(F(1, 2), (0, 1))])) == 1
    assert mesh(TaggedPartition([(0, (0, F(1, 2))), (1, (F(1, 2), 1))])) == F(1, 2)


def test_empty_partition_is_an_error():
    with pytest.raises(EmptyPartitionError, match="empty partition"):
        TaggedPartition([])


def test_validator_rejects_gaps_and_stray_tags():
    with pytest.raises(MalformedPartitionError):
        TaggedPartition([(0, (0, F(1, 3))), (F(1, 2), (F(1, 2), 1))])
    with pytest.raises(MalformedPartitionError):
        TaggedPartition([(F(3, 4), (0, F(1, 2))), (1, (F(1, 2), 1))])
    with pytest.raises(MalformedPartitionError):
        TaggedPartition([(0, (0, F(1, 2)))], target=UNIT)


@given(partitions())
def test_lengths_sum_exactly(P):
    assert sum((p.interval.length for p in P), Tag(0)) == 1
    assert all(p.interval.lo <= p.tag <= p.interval.hi for p in P)


# riemann sums ----------------------------------------------------------------


@given(partitions())
def test_riemann_sum_of_one(P):
    assert abs(riemann_sum(ONE, P) - 1) < 1e-12


def test_riemann_sum_examples():
    P = TaggedPartition([(0, (0, F(1, 2))), (F(1, 2), (F(1, 2), 1))])
    assert riemann_sum(IDENT, P) == 0.25
    Q = TaggedPartition([(F(k, 4), (F(k, 4), F(k + 1, 4))) for k in range(4)])
    assert riemann_sum(DIRICHLET_FN, Q) == 1


def test_riemann_sum_names_the_bad_tag():
    f = RealFn(lambda t: 1 / float(t), "1/x")
    P = TaggedPartition([(0, (0, 1))])
    with pytest.raises(UndefinedValueError, match="at 0"):
        riemann_sum(f, P)


def test_runs_match_their_pieces():
    P = uniform_partition(Interval(F(1, 3), 2), 1000)
    Q = TaggedPartition(list(P))
    assert len(P.blocks) == 1 and len(Q.blocks) == 1000
    assert riemann_sum(IDENT, P) == pytest.approx(riemann_sum(IDENT, Q), abs=1e-12)


@given(partitions(), st.data())
def test_riemann_sum_changes_locally_under_splitting(P, data):
    items = P.items
    k = data.draw(st.integers(0, len(items) - 1))
    t, iv = items[k]
    mid = (iv.lo + iv.hi) / 2
    # keep t on its half, tag the other half at its left end
    if t <= mid:
        halves = [(t, (iv.lo, mid)), (mid, (mid, iv.hi))]
    else:
        halves = [(iv.lo, (iv.lo, mid)), (t, (mid, iv.hi))]
    Q = TaggedPartition(items[:k] + halves + items[k + 1 :])
    local = sum(float(s) * float(Interval(*b).length) for s, b in halves) - float(t) * float(iv.length)
    assert riemann_sum(IDENT, Q) - riemann_sum(IDENT, P) == pytest.approx(local, abs=1e-12)


# fineness ----------------------------------------------------------------------


@given(partitions())
def test_constant_one_is_always_fine(P):
    assert is_fine(ConstantGauge(1), P)


def test_is_fine_examples():
    assert not is_fine(ConstantGauge(F(1, 10)), TaggedPartition([(F(1, 2), (0, 1))]))
    Q = TaggedPartition([(F(2 * k + 1, 8), (F(k, 4), F(k + 1, 4))) for k in range(4)])
    assert not is_fine(dirichlet_modulus(F(1, 2)), Q)


def test_dirichlet_fineness_by_hand():
    # oracle: a tag with index k admits half-width at most eps/2**(k+1)
    eps = F(1, 2)
    Q = TaggedPartition([(F(2 * k + 1, 8), (F(k, 4), F(k + 1, 4))) for k in range(4)])
    radii = [eps / 2 ** (rational_index(p.tag.a) + 1) for p in Q]
    assert any(r < F(1, 8) for r in radii)


@given(partitions(), st.fractions(F(1, 100), 2), st.fractions(F(1, 100), 2))
def test_min_gauge_fine_implies_both(P, r1, r2):
    d1 = ConstantGauge(r1)
    d2 = FunctionGauge(lambda t: r2 * (1 + t * t), "quad")
    if is_fine(min_gauge(d1, d2), P):
        assert is_fine(d1, P) and is_fine(d2, P)


@given(partitions())
def test_monotonicity(P):
    small = FunctionGauge(lambda t: F(1, 8) + t / 4, "small")
    big = FunctionGauge(lambda t: F(1, 4) + t / 4, "big")
    if is_fine(small, P):
        assert is_fine(big, P)


def test_min_gauge_examples():
    assert min_gauge(ConstantGauge(1), ConstantGauge(F(1, 2)))(F(1, 3)) == F(1, 2)
    g = sqrt_recip_modulus(F(1, 3))
    for x in (F(1, 7), F(1, 2), SQRT2 / 2):
        assert min_gauge(g, g)(x) == g(x)
    eps_x2 = FunctionGauge(lambda t: 1 * t * t, "x^2")
    assert min_gauge(eps_x2, ConstantGauge(F(1, 8)))(F(1, 2)) == F(1, 8)


def test_irrational_radii_are_rounded_down():
    g = FunctionGauge(lambda t: t / 10, "x/10")
    exact = SQRT2 / 30
    r = g(SQRT2 / 3)
    assert isinstance(r, F)
    assert r < exact and exact - r < exact / 2**38


def test_split_gauge_examples():
    one = ConstantGauge(1)
    g = split_gauge(one, one, F(1, 2))
    assert g(F(1, 4)) == F(1, 8)
    assert g(F(3, 4)) == F(1, 8)
    d1, d2 = ConstantGauge(F(1, 5)), ConstantGauge(F(1, 7))
    assert split_gauge(d1, d2, F(1, 3))(F(1, 3)) == F(1, 7)


def test_split_gauge_needs_interior_point():
    one = ConstantGauge(1)
    for x in (0, 1, F(3, 2), -1):
        with pytest.raises(DomainError):
            split_gauge(one, one, x)


def test_gauges_must_be_positive():
    with pytest.raises(DomainError):
        ConstantGauge(0)
    with pytest.raises(DomainError):
        FunctionGauge(lambda t: t, "x")(0)


def test_runs_validate_their_counts():
    with pytest.raises((DomainError, MalformedPartitionError, ValueError)):
        Run(Tag(0), Tag(1), 0)
    r = Run(Tag(0), Tag(1), 4)
    assert [p.tag for p in r.pieces()] == [F(1, 8), F(3, 8), F(5, 8), F(7, 8)]
    assert isinstance(Piece(Tag(0), Interval(0, 1)).interval, Interval)
