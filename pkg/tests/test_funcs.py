import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gaugeint.errors import DomainError, UnknownNameError
from gaugeint.exact import SQRT2, Tag
from gaugeint.funcs import (
    BUILTINS,
    DIRICHLET_FN,
    abs_kappa_partial,
    builtin,
    builtin_modulus,
    cw_index,
    cw_rational,
    enumerate_rational,
    harmonic,
    kappa_block,
    kappa_eval,
    kappa_m,
    kappa_modulus,
    poly,
    rational_index,
    rational_index_bit_length,
    rationals,
    step,
)

from oracles import cw, enum_oracle, harmonic as harmonic_oracle


# rational enumeration --------------------------------------------------------


def test_rational_index_examples():
    assert rational_index(F(0)) == 0
    assert rational_index(F(1)) == 1
    assert enumerate_rational(1) == 1


def test_enumeration_matches_stern_sequence():
    for k in range(5000):
        assert enumerate_rational(k) == enum_oracle(k)
    for n in range(1, 3000):
        assert cw_rational(n) == cw(n)
        assert cw_index(cw(n)) == n


def test_round_trip_on_random_rationals():
    rng = random.Random(7)
    for _ in range(10_000):
        q = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        assert enumerate_rational(rational_index(q)) == q


@given(st.integers(0, 10**9))
def test_index_of_enumeration(k):
    assert rational_index(enumerate_rational(k)) == k


def test_first_terms_are_distinct():
    first = [q for _, q in zip(range(2000), rationals())]
    assert len(set(first)) == 2000


# kappa ----------------------------------------------------------------------


def test_kappa_examples():
    assert kappa_eval(0) == 2
    assert kappa_eval(F(1, 2)) == -2
    assert kappa_eval(1) == 0


def test_kappa_outside_domain():
    for x in (F(-1, 10), F(11, 10)):
        with pytest.raises(DomainError):
            kappa_eval(x)


def test_kappa_constant_on_blocks():
    for k in range(1, 40):
        lo, hi = 1 - F(1, 2 ** (k - 1)), 1 - F(1, 2**k)
        expected = (-1) ** (k + 1) * 2.0**k / k
        probes = [lo, lo + (hi - lo) / 3, (lo + hi) / 2, hi - (hi - lo) / 1000]
        for x in probes:
            assert kappa_block(x) == k
            assert kappa_eval(x) == expected
        assert kappa_eval(lo + (hi - lo) * (SQRT2 - 1)) == expected


def test_kappa_m():
    assert kappa_m(F(1, 10)) == 10
    assert kappa_m(F(3, 10)) == 4
    assert kappa_m(2) == 1
    for e in (F(1, 3), F(2, 7), F(1, 100)):
        m = kappa_m(e)
        assert F(1, m) <= e and m >= 1 / e


def test_kappa_modulus_examples():
    eps = F(1, 10)
    g = kappa_modulus(eps)
    assert g(F(1, 4)) == F(1, 4)
    assert g(F(1, 2)) == eps / 16
    assert g(F(3, 4)) == eps / 64
    assert g(1) == F(1, 2**10)
    # between a_1 and a_2
    assert g(F(5, 8)) == F(1, 8)
    assert g(F(1, 2) + F(1, 100)) == F(1, 100)


@given(st.fractions(0, 1), st.fractions(F(1, 1000), 1))
def test_kappa_radius_positive(x, eps):
    assert kappa_modulus(eps)(x) > 0


def test_abs_kappa_partial_examples():
    assert abs_kappa_partial(1) == pytest.approx(1, abs=1e-12)
    assert abs_kappa_partial(2) == pytest.approx(1.5, abs=1e-12)
    assert abs_kappa_partial(10) == pytest.approx(2.928968, abs=1e-6)


def test_abs_kappa_partials_grow_like_log():
    vals = [abs_kappa_partial(k) for k in range(1, 16)]
    for k, v in enumerate(vals, start=1):
        assert abs(v - float(harmonic_oracle(k))) < 1e-9
        assert v >= math.log(k + 1)
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert harmonic(15) == harmonic_oracle(15)


# moduli -----------------------------------------------------------------------


def test_builtin_modulus_examples():
    assert builtin_modulus("sqrt_recip", F(1, 10))(F(1, 2)) == F(1, 40)
    for eps in (F(1, 10), F(1, 3)):
        assert builtin_modulus("sqrt_recip", eps)(0) == eps * eps
    assert builtin_modulus("dirichlet", F(1, 8))(SQRT2 / 2) == 1


def test_sqrt_recip_modulus_at_irrational_is_a_lower_bound():
    eps = F(1, 10)
    x = SQRT2 / 3
    r = builtin_modulus("sqrt_recip", eps)(x)
    assert isinstance(r, F) and r <= eps * x * x


def test_dirichlet_modulus_at_rationals():
    eps = F(1, 4)
    g = builtin_modulus("dirichlet", eps)
    for q in (F(0), F(1), F(-1), F(1, 2), F(3, 7)):
        assert g(q) == eps / 2 ** (rational_index(q) + 1)


def test_unknown_names():
    with pytest.raises(UnknownNameError):
        builtin("sinc")
    with pytest.raises(UnknownNameError):
        builtin_modulus("recip", F(1, 2))


@pytest.mark.parametrize("name", sorted(n for n, b in BUILTINS.items() if b.modulus is not None))
@pytest.mark.parametrize("eps", [F(1, 2), F(1, 64), F(1, 1024)])
def test_builtin_moduli_are_positive(name, eps):
    g = builtin_modulus(name, eps)
    probes = [Tag(F(k, 97)) for k in range(98)] + [SQRT2 / 2, SQRT2 - 1, (SQRT2 - 1) / 7]
    if name == "dirichlet":
        # radii eps/2**(k+1) are only representable for moderate indices k
        probes = [x for x in probes if not x.is_rational() or rational_index_bit_length(x.a) <= 24]
        probes += [enumerate_rational(k) for k in range(0, 5000, 7)]
    assert all(g(x) > 0 for x in probes)


def test_dirichlet_gauge_with_huge_indices():
    g = builtin_modulus("dirichlet", F(1, 4))
    q = F(1, 97)  # index has about 97 bits
    with pytest.raises(DomainError):
        g(q)
    assert not g.covers_reach(Tag(q), Tag(F(1, 2**200)))
    assert not g.admits(q, q, q + F(1, 2**200))
    assert g.admits(q, q, q)


@given(st.fractions(-10, 10), st.fractions(-10, 10))
def test_dirichlet_value_is_rationality(a, b):
    t = Tag(a, b)
    assert DIRICHLET_FN(t) == (1.0 if b == 0 else 0.0)


def test_poly_and_step():
    p = poly([1, 2, 3])
    assert p.fn(F(1, 2)) == pytest.approx(1 + 1 + 0.75)
    s = step([F(1, 2)], [0, 1])
    assert s.fn(F(1, 4)) == 0 and s.fn(F(1, 2)) == 1
    assert p.modulus(F(1, 10))(0) == F(1, 10) / (2 * 8 + 1)
    with pytest.raises(DomainError):
        step([F(1, 2)], [0])
