"""Builtin integrands, their gauge moduli and the rational enumeration.

The enumeration of the rationals is Calkin-Wilf order on the positive
rationals, interleaved with the negatives::

    0 -> 0,   q > 0 with Calkin-Wilf index j -> 2j - 1,   -q -> 2j

so ``1 -> 1``, ``-1 -> 2``, ``1/2 -> 3``, ``-1/2 -> 4``, ``2 -> 5``.

Calkin-Wilf indices grow very fast (``1/2**d`` sits at ``2**(2**d - 1)``),
so the Dirichlet gauge decides fineness from the *bit length* of the index
whenever the index itself would be too large to build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .core import ConstantGauge, FunctionGauge, Gauge, Interval, Piece, RealFn, TaggedPartition, riemann_sum
from .errors import DomainError, UnknownNameError
from .exact import Tag, _log2_floor, floor_tag, round_down, to_tag

__all__ = [
    "cw_index",
    "cw_bit_length",
    "cw_rational",
    "rational_index",
    "rational_index_bit_length",
    "enumerate_rational",
    "rationals",
    "BuiltinFn",
    "sqrt_recip",
    "dirichlet",
    "kappa",
    "recip",
    "poly",
    "step",
    "kappa_eval",
    "kappa_block",
    "kappa_modulus",
    "kappa_m",
    "abs_kappa_partial",
    "sqrt_recip_modulus",
    "dirichlet_modulus",
    "DirichletGauge",
    "builtin",
    "builtin_modulus",
    "BUILTINS",
]


# Calkin-Wilf -----------------------------------------------------------------


def _cw_runs(p: int, q: int) -> list[tuple[int, int]]:
    """Run-length encoded path from ``p/q`` up to the root, bottom first."""
    if p <= 0 or q <= 0:
        raise DomainError("Calkin-Wilf order covers positive rationals only")
    runs = []
    while p != q:
        if p > q:
            k = (p - 1) // q
            p -= k * q
            runs.append((1, k))
        else:
            k = (q - 1) // p
            q -= k * p
            runs.append((0, k))
    return runs


def cw_bit_length(q: Fraction) -> int:
    """Bit length of the Calkin-Wilf index of ``q > 0`` without building it."""
    q = Fraction(q)
    return 1 + sum(k for _, k in _cw_runs(q.numerator, q.denominator))


def cw_index(q: Fraction) -> int:
    """1-based position of ``q > 0`` in the Calkin-Wilf sequence 1, 1/2, 2, 1/3, ..."""
    q = Fraction(q)
    idx = 1
    for bit, k in reversed(_cw_runs(q.numerator, q.denominator)):
        idx = (idx << k) | (((1 << k) - 1) if bit else 0)
    return idx


def cw_rational(n: int) -> Fraction:
    """Inverse of :func:`cw_index`."""
    if n < 1:
        raise DomainError("Calkin-Wilf indices start at 1")
    a, b = 1, 1
    bits = bin(n)[3:]
    i = 0
    while i < len(bits):
        j = i
        while j < len(bits) and bits[j] == bits[i]:
            j += 1
        k = j - i
        if bits[i] == "0":
            b += k * a
        else:
            a += k * b
        i = j
    return Fraction(a, b)


def rational_index(q) -> int:
    """Index of ``q`` in the fixed enumeration of Q (see module docstring)."""
    q = Fraction(q) if not isinstance(q, Tag) else _rational_of(q)
    if q == 0:
        return 0
    j = cw_index(abs(q))
    return 2 * j - 1 if q > 0 else 2 * j


def rational_index_bit_length(q: Fraction) -> int:
    """Bit length of :func:`rational_index` computed in O(bits of q)."""
    if q == 0:
        return 0
    L = cw_bit_length(abs(q))
    if q > 0:
        # 2j - 1 has the same bit length as 2j except at j = 1
        return 1 if L == 1 else L + 1
    return L + 1


def enumerate_rational(n: int) -> Fraction:
    """The ``n``-th rational; inverse of :func:`rational_index`."""
    if n < 0:
        raise DomainError("enumeration index must be non-negative")
    if n == 0:
        return Fraction(0)
    j = (n + 1) // 2
    q = cw_rational(j)
    return q if n % 2 == 1 else -q


def rationals() -> Iterator[Fraction]:
    n = 0
    while True:
        yield enumerate_rational(n)
        n += 1


def _rational_of(t: Tag) -> Fraction:
    if not t.is_rational():
        raise DomainError(f"{t} is irrational")
    return t.a


# builtin functions ----------------------------------------------------------


@dataclass(frozen=True)
class BuiltinFn:
    name: str
    fn: RealFn
    modulus: Optional[Callable[[Fraction], Gauge]] = None
    params: tuple = field(default_factory=tuple)
    depth_hint: Optional[Callable[[Fraction], int]] = None


def _sqrt_recip_tag(t: Tag) -> float:
    return 1.0 / math.sqrt(float(t)) if t > 0 else 0.0


def _sqrt_recip_vec(xs):
    out = np.zeros_like(xs)
    pos = xs > 0
    np.divide(1.0, np.sqrt(xs, where=pos, out=np.ones_like(xs)), out=out, where=pos)
    return out


def _sqrt_recip_vec_fast(xs):
    if xs.size and xs[0] > 0 and xs[-1] > 0 and xs.min() > 0:
        r = np.sqrt(xs)
        np.reciprocal(r, out=r)
        return r
    return _sqrt_recip_vec(xs)


SQRT_RECIP_FN = RealFn(_sqrt_recip_tag, "sqrt_recip", vectorized=_sqrt_recip_vec_fast)


def sqrt_recip_modulus(eps, scale=1) -> Gauge:
    """``scale*eps*x**2`` for ``x > 0`` and ``scale*eps**2`` otherwise."""
    eps = Fraction(eps)
    c = Fraction(scale) * eps
    at0 = Fraction(scale) * eps * eps
    if eps <= 0 or c <= 0:
        raise DomainError("eps must be positive")

    def radius(t: Tag):
        return c * t * t if t > 0 else at0

    def lower(lo: Tag, hi: Tag):
        if lo > 0:
            return round_down(c * lo * lo)
        return None

    label = "sqrt_recip" if scale == 1 else f"sqrt_recip*{scale}"
    return FunctionGauge(radius, name=f"{label}(eps={eps})", lower=lower)


def _dirichlet_tag(t: Tag) -> float:
    return 1.0 if t.is_rational() else 0.0


DIRICHLET_FN = RealFn(_dirichlet_tag, "dirichlet", exact_tags=True)

class DirichletGauge(Gauge):
    """1 off Q and ``eps / 2**(k+1)`` at the ``k``-th rational."""

    def __init__(self, eps):
        self.eps = Fraction(eps)
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        self.name = f"dirichlet(eps={self.eps})"

    def radius(self, t):
        if not t.is_rational():
            return Fraction(1)
        if rational_index_bit_length(t.a) > 24:
            raise DomainError(f"radius at {t} is below eps/2**(2**23); not representable")
        k = rational_index(t.a)
        return self.eps / (1 << (k + 1))

    def covers_reach(self, t, reach, strict=False):
        if not t.is_rational():
            return reach < 1 if strict else reach <= 1
        if reach == 0:
            return True
        # reach <= eps/2**(k+1)  <=>  floor(log2(eps/reach)) >= k+1
        # (strict: > unless eps/reach is exactly 2**(k+1))
        ratio = self.eps / reach
        if ratio < 1:
            return False
        e = _log2_floor(to_tag(ratio))
        L = rational_index_bit_length(t.a)
        if L - 1 >= e.bit_length():
            return False  # k >= 2**(L-1) > e
        k = rational_index(t.a)
        if e < k + 1:
            return False
        if strict and e == k + 1 and ratio == (1 << (k + 1)):
            return False
        return True


def dirichlet_modulus(eps) -> Gauge:
    return DirichletGauge(eps)


def _recip_tag(t: Tag) -> float:
    return 1.0 / float(t) if t > 0 else 0.0


def _recip_vec(xs):
    out = np.zeros_like(xs)
    np.divide(1.0, xs, out=out, where=xs > 0)
    return out


RECIP_FN = RealFn(_recip_tag, "recip", vectorized=_recip_vec)


# kappa ----------------------------------------------------------------------


def kappa_block(x) -> int:
    """The ``k`` with ``x`` in ``[a_{k-1}, a_k)``, ``a_k = 1 - 2**-k``; 0 at x = 1."""
    x = to_tag(x)
    if x < 0 or x > 1:
        raise DomainError(f"kappa is defined on [0, 1], got {x}")
    if x == 1:
        return 0
    return floor_tag(1 / (1 - x)).bit_length()


def kappa_eval(x) -> float:
    """``(-1)**(k+1) * 2**k / k`` on the k-th block, 0 at 1."""
    k = kappa_block(x)
    if k == 0:
        return 0.0
    v = math.ldexp(1.0, k) / k if k < 1024 else math.inf
    return v if k % 2 == 1 else -v


# kappa is evaluated at exact tags only: near 1 a double cannot tell the
# blocks apart
KAPPA_FN = RealFn(kappa_eval, "kappa", exact_tags=True, domain=Interval(0, 1))
ABS_KAPPA_FN = RealFn(lambda t: abs(kappa_eval(t)), "abs_kappa", exact_tags=True, domain=Interval(0, 1))


def kappa_m(eps) -> int:
    """``m(eps) = ceil(1/eps)``, the least m with ``1/n <= eps`` for all n >= m."""
    eps = Fraction(eps)
    return max(1, math.ceil(1 / eps))


def _a(k: int) -> Fraction:
    return 1 - Fraction(1, 1 << k)


class KappaGauge(Gauge):
    """``d(x, E)`` off E, ``eps/4**(k+1)`` at ``a_k`` and ``2**-m(eps)`` at 1,
    where ``E = {a_k : k >= 1} + {1}``.
    """

    def __init__(self, eps):
        self.eps = Fraction(eps)
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        self.m = kappa_m(self.eps)
        self.name = f"kappa(eps={self.eps})"

    @staticmethod
    def _e_index(x: Tag) -> Optional[int]:
        """k >= 1 if x = a_k, else None."""
        if not x.is_rational() or not (0 < x.a < 1):
            return None
        y = 1 - x.a
        if y.numerator == 1 and y.denominator & (y.denominator - 1) == 0:
            return y.denominator.bit_length() - 1
        return None

    def radius(self, x):
        if x == 1:
            return Fraction(1, 1 << self.m)
        k = self._e_index(x)
        if k is not None:
            return self.eps / (4 ** (k + 1))
        if x > 1:
            return round_down(x - 1)
        if x < Fraction(1, 2):
            return round_down(Fraction(1, 2) - x)
        k = kappa_block(x)  # x in (a_{k-1}, a_k), k >= 2
        return round_down(min(x - _a(k - 1), _a(k) - x))

    def anchors(self, lo, hi):
        # points of E inside [lo, hi]; only these can cover themselves
        out = []
        if lo < 1:
            k = 1 if lo <= Fraction(1, 2) else max(1, kappa_block(lo) - 1)
            while len(out) < 2:
                a = _a(k)
                if a > hi:
                    break
                if a >= lo:
                    out.append(Tag(a))
                k += 1
        if lo <= 1 <= hi:
            out.append(Tag(1))
        return out


def kappa_modulus(eps) -> Gauge:
    return KappaGauge(eps)


def kappa_depth_hint(eps) -> int:
    """Depth cap sufficient for the kappa modulus: m(eps) + log2(1/eps) + slack."""
    eps = Fraction(eps)
    return kappa_m(eps) + max(0, math.ceil(math.log2(1 / eps))) + 8


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, k + 1)), Fraction(0))


def abs_kappa_partial(k: int) -> float:
    """Riemann integral of ``|kappa|`` over ``[0, a_k]``.

    ``|kappa|`` is constant on each block, so the block partition with any
    tags gives the integral exactly; the result is checked against H_k.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    pieces = []
    for i in range(1, k + 1):
        lo, hi = _a(i - 1), _a(i)
        pieces.append(Piece(Tag((lo + hi) / 2), Interval(lo, hi)))
    v = riemann_sum(RealFn(ABS_KAPPA_FN.evaluator, "abs_kappa"), TaggedPartition(pieces))
    h = float(harmonic(k))
    if abs(v - h) > 1e-9:
        raise ArithmeticError(f"block sum {v} disagrees with H_{k} = {h}")
    return v


# polynomials and step functions ---------------------------------------------


def poly(coeffs: Sequence) -> BuiltinFn:
    """``sum(c[i] * x**i)`` with a constant gauge modulus on [0, 1].

    On [0, 1] the slope is at most ``L = sum(i*|c_i|)`` and a constant gauge
    ``r`` gives ``|S - A| <= L*r``, so ``r = eps/(2L + 1)`` suffices.
    """
    cs = [Fraction(c) for c in coeffs]
    fc = np.array([float(c) for c in cs], dtype=float)
    L = sum(i * abs(c) for i, c in enumerate(cs))

    def ev(t: Tag) -> float:
        x = float(t)
        acc = 0.0
        for c in reversed(fc):
            acc = acc * x + c
        return acc

    def vec(xs):
        acc = np.zeros_like(xs)
        for c in reversed(fc):
            acc = acc * xs + c
        return acc

    def modulus(eps):
        return ConstantGauge(Fraction(eps) / (2 * L + 1))

    name = "poly(" + ",".join(str(c) for c in cs) + ")"
    return BuiltinFn(name, RealFn(ev, name, vectorized=vec), modulus, tuple(cs))


def step(breaks: Sequence, values: Sequence) -> BuiltinFn:
    """``values[j]`` on ``[breaks[j-1], breaks[j])`` (with open ends).

    A constant gauge ``r`` only errs on the pieces touching a jump, at most
    ``2 * 2r`` of length per jump, so ``r = eps/(4*sum|jumps| + 1)`` suffices.
    """
    bs = [to_tag(b) for b in breaks]
    vs = [float(v) for v in values]
    if len(vs) != len(bs) + 1:
        raise DomainError("step needs one more value than breaks")
    if any(bs[i] >= bs[i + 1] for i in range(len(bs) - 1)):
        raise DomainError("breaks must be increasing")
    J = sum(abs(Fraction(values[i + 1]) - Fraction(values[i])) for i in range(len(bs)))
    fb = np.array([float(b) for b in bs])
    fv = np.array(vs)

    def ev(t: Tag) -> float:
        j = 0
        while j < len(bs) and t >= bs[j]:
            j += 1
        return vs[j]

    def vec(xs):
        return fv[np.searchsorted(fb, xs, side="right")]

    def modulus(eps):
        return ConstantGauge(Fraction(eps) / (4 * J + 1))

    name = "step(" + ",".join(str(b) for b in bs) + ";" + ",".join(str(v) for v in vs) + ")"
    return BuiltinFn(name, RealFn(ev, name, vectorized=vec), modulus, (tuple(bs), tuple(vs)))


def constant(c) -> BuiltinFn:
    return poly([c])


# registry -------------------------------------------------------------------

BUILTINS: dict[str, BuiltinFn] = {
    "sqrt_recip": BuiltinFn("sqrt_recip", SQRT_RECIP_FN, sqrt_recip_modulus),
    "dirichlet": BuiltinFn("dirichlet", DIRICHLET_FN, dirichlet_modulus),
    "kappa": BuiltinFn("kappa", KAPPA_FN, kappa_modulus, depth_hint=kappa_depth_hint),
    "recip": BuiltinFn("recip", RECIP_FN, None),
}

sqrt_recip = BUILTINS["sqrt_recip"]
dirichlet = BUILTINS["dirichlet"]
kappa = BUILTINS["kappa"]
recip = BUILTINS["recip"]


def builtin(name: str) -> BuiltinFn:
    try:
        return BUILTINS[name]
    except KeyError:
        raise UnknownNameError(f"unknown builtin {name!r}; known: {', '.join(sorted(BUILTINS))}") from None


def builtin_modulus(name: str, eps) -> Gauge:
    b = builtin(name)
    if b.modulus is None:
        raise UnknownNameError(f"builtin {name!r} has no gauge modulus")
    return b.modulus(Fraction(eps))
