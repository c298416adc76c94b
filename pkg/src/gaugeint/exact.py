"""Exact arithmetic in the field Q(sqrt 2).

A :class:`Tag` is ``a + b*sqrt(2)`` with rational ``a`` and ``b``.  Since
sqrt(2) is irrational the pair ``(a, b)`` is unique, so equality, ordering
and rationality (``b == 0``) are all decidable.

>>> half = Tag(Fraction(1, 2))
>>> r = SQRT2 / 2
>>> r.is_rational(), half < r
(False, True)
>>> floor_tag(SQRT2 * 10)
14
"""

from __future__ import annotations

import math
from typing import Optional
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "Tag",
    "TagLike",
    "SQRT2",
    "ZERO",
    "ONE",
    "as_tag",
    "as_fraction",
    "floor_tag",
    "round_down",
    "parse_tag",
]

TagLike = Union["Tag", Fraction, int]

_F0 = Fraction(0)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot convert {v!r} to a rational")


_SQ2 = math.sqrt(2.0)


def _float_sign(a, b, c, d) -> int:
    """Sign of ``(a + b*sqrt2) - (c + d*sqrt2)`` when floats decide it, else 0.

    Each conversion and operation is off by at most a few units in the last
    place relative to ``scale``; a gap above ``1e-13 * scale`` is therefore
    certain.  Values outside the normal float range fall back to exact work.
    """
    try:
        fa, fb, fc, fd = float(a), float(b), float(c), float(d)
    except OverflowError:
        return 0
    scale = abs(fa) + 2 * abs(fb) + abs(fc) + 2 * abs(fd)
    if not 1e-280 < scale < 1e280:
        return 0
    gap = (fa - fc) + (fb - fd) * _SQ2
    if gap > 1e-13 * scale:
        return 1
    if gap < -1e-13 * scale:
        return -1
    return 0


class Tag:
    """An element ``a + b*sqrt(2)`` of Q(sqrt 2).

    Treated as immutable; arithmetic always returns new instances.
    """

    __slots__ = ("a", "b", "_hash")

    def __init__(self, a=0, b=0):
        self.a = _frac(a)
        self.b = _frac(b)
        self._hash = None

    @classmethod
    def _make(cls, a: Fraction, b: Fraction) -> "Tag":
        t = object.__new__(cls)
        t.a = a
        t.b = b
        t._hash = None
        return t

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2 (never equal)
        big_a = a * a > 2 * b * b
        if a > 0:
            return 1 if big_a else -1
        return -1 if big_a else 1

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        return Tag._make(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        return Tag._make(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        return Tag._make(o.a - self.a, o.b - self.b)

    def __neg__(self):
        return Tag._make(-self.a, -self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        if o.b == 0:
            return Tag._make(self.a * o.a, self.b * o.a)
        if self.b == 0:
            return Tag._make(self.a * o.a, self.a * o.b)
        return Tag._make(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "Tag":
        if self.b == 0:
            if self.a == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt 2)")
            return Tag._make(1 / self.a, _F0)
        n = self.a * self.a - 2 * self.b * self.b
        return Tag._make(self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt 2)")
            return Tag._make(self.a / o.a, self.b / o.a)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison -----------------------------------------------------------
    def _cmp(self, other) -> int:
        o = as_tag(other)
        if o is NotImplemented:
            raise TypeError
        if self.b == o.b:
            return (self.a > o.a) - (self.a < o.a)
        s = _float_sign(self.a, self.b, o.a, o.b)
        if s:
            return s
        return Tag._make(self.a - o.a, self.b - o.b).sign()

    def __eq__(self, other):
        if isinstance(other, float):
            return False
        o = as_tag(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        try:
            return self._cmp(other) < 0
        except TypeError:
            return NotImplemented

    def __le__(self, other):
        try:
            return self._cmp(other) <= 0
        except TypeError:
            return NotImplemented

    def __gt__(self, other):
        try:
            return self._cmp(other) > 0
        except TypeError:
            return NotImplemented

    def __ge__(self, other):
        try:
            return self._cmp(other) >= 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            h = hash(self.a) if self.b == 0 else hash((self.a, self.b))
            self._hash = h
        return self._hash

    # conversion -----------------------------------------------------------
    def __float__(self) -> float:
        if self.b == 0:
            return float(self.a)
        # a + b*sqrt2 loses precision by cancellation when a ~ -b*sqrt2;
        # go through the conjugate in that case
        fa, fb = float(self.a), float(self.b) * math.sqrt(2.0)
        if fa != 0 and fb != 0 and (fa > 0) != (fb > 0) and abs(fa + fb) < 1e-8 * abs(fa):
            norm = self.a * self.a - 2 * self.b * self.b
            return float(norm) / (fa - fb)
        return fa + fb

    def __repr__(self) -> str:
        return f"Tag({self})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        bpart = "sqrt2" if self.b == 1 else f"{self.b}*sqrt2"
        if self.a == 0:
            return bpart if self.b != -1 else "-sqrt2"
        if self.b < 0:
            bpart = "sqrt2" if self.b == -1 else f"{-self.b}*sqrt2"
            return f"{self.a}-{bpart}"
        return f"{self.a}+{bpart}"

    def __reduce__(self):
        return (Tag, (self.a, self.b))


def as_tag(v) -> Tag:
    """Coerce ints, Fractions and Tags to :class:`Tag` (NotImplemented otherwise)."""
    if isinstance(v, Tag):
        return v
    if isinstance(v, Fraction):
        return Tag._make(v, _F0)
    if isinstance(v, int):
        return Tag._make(Fraction(v), _F0)
    if isinstance(v, Rational):
        return Tag._make(Fraction(v), _F0)
    return NotImplemented


def to_tag(v) -> Tag:
    """Like :func:`as_tag` but also accepts strings and raises on failure."""
    if isinstance(v, str):
        return parse_tag(v)
    t = as_tag(v)
    if t is NotImplemented:
        if isinstance(v, float):
            return Tag._make(Fraction(v), _F0)
        raise TypeError(f"cannot convert {v!r} to a Tag")
    return t


def as_fraction(v) -> Fraction:
    """Return ``v`` as a Fraction; raises ValueError for irrational tags."""
    if isinstance(v, Tag):
        if v.b != 0:
            raise ValueError(f"{v} is irrational")
        return v.a
    return _frac(v)


ZERO = Tag(0)
ONE = Tag(1)
SQRT2 = Tag(0, 1)


def floor_tag(v) -> int:
    """Exact floor of an element of Q(sqrt 2)."""
    t = to_tag(v)
    if t.b == 0:
        return math.floor(t.a)
    q = math.lcm(t.a.denominator, t.b.denominator)
    p = t.a.numerator * (q // t.a.denominator)
    r = t.b.numerator * (q // t.b.denominator)
    s = math.isqrt(2 * r * r)
    # r*sqrt2 is irrational, so floor(r*sqrt2) is s or -s-1
    fl = s if r > 0 else -s - 1
    return (p + fl) // q


def _log2_floor(t: Tag) -> int:
    """floor(log2(t)) for t > 0."""
    x = float(t)
    if x > 0 and math.isfinite(x) and x > 1e-300:
        e = math.frexp(x)[1] - 1
        # float may be off by one at exact powers of two
        while t < Fraction(2) ** e:
            e -= 1
        while t >= Fraction(2) ** (e + 1):
            e += 1
        return e
    # tiny: work with the rational bracket a +- |b|*1.5
    lo = Tag(t.a, t.b)
    e = 0
    while lo < 1:
        lo = lo * 2
        e -= 1
    while lo >= 2:
        lo = lo / 2
        e += 1
    return e


def round_down(v, bits: Optional[int] = None) -> Fraction:
    """A rational lower bound for ``v``, unchanged when ``v`` is rational.

    By default the bound is a binary64 value within a relative ``2**-40``
    below ``v``, confirmed by an exact comparison.  With ``bits`` it is the
    largest rational with that many significant binary digits below ``v``.
    """
    t = to_tag(v)
    if t.b == 0:
        return t.a
    if bits is None:
        f = float(t)
        if 1e-280 < abs(f) < 1e280:
            r = Fraction(f - abs(f) * 2.0**-40)
            if t > r:
                return r
        bits = 64
    s = t.sign()
    if s == 0:
        return Fraction(0)
    mag = abs(t)
    shift = bits - 1 - _log2_floor(mag)
    scaled = t * (Fraction(2) ** shift)
    return Fraction(floor_tag(scaled)) / (Fraction(2) ** shift)


def parse_tag(text: str) -> Tag:
    """Parse ``"p/q"``, ``"0.25"``, ``"sqrt2/2"`` or any exact expression.

    Delegates to the expression parser so the accepted syntax is the same
    as for CLI geometry flags.
    """
    from .errors import DomainError
    from .expr import NotExact, parse_expr

    try:
        return parse_expr(text).eval_exact()
    except NotExact as exc:
        raise DomainError(f"{text!r} is not an exact element of Q(sqrt2) ({exc} is not exact)") from None
