"""Cantor space: the special fan functional and cover transfer.

Binary sequences are finite prefixes with a constant tail (zeros by
default).  ``theta`` searches the binary tree for a finite list of
sequences whose cylinders of length ``G(g)`` cover the whole space, and
``verify_scf`` checks such a list by brute force.

``xi_map`` sends a sequence to the dyadic real it spells and ``zeta_map``
to the point of the middle-thirds Cantor set with digits ``2*f(i)``.  They
carry covers back and forth:

* ``cover_transfer_inv(psi)`` is the functional ``F`` whose value at ``f``
  is the least ``n`` such that the dyadic interval spelled by the first
  ``n`` bits lies inside the ``psi``-ball around ``xi(f)``;
* ``cover_transfer(F)`` is the gauge that is the distance to the Cantor
  set off the set and, at a Cantor point ``x``, the first enumerated
  rational ``q`` whose ball meets the Cantor set only inside the
  ``F``-cylinder of ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Gauge, Interval
from .cousin import default_depth_cap
from .errors import DepthCapError, DomainError, EffectivityError, PreconditionError
from .exact import Tag, round_down, to_tag

__all__ = [
    "BinSeq",
    "CantorFunctional",
    "constant_functional",
    "first_bit_functional",
    "table_functional",
    "random_functional",
    "theta",
    "verify_scf",
    "xi_map",
    "zeta_map",
    "cantor_locate",
    "CantorGauge",
    "cover_transfer",
    "cover_transfer_inv",
]


@dataclass(frozen=True)
class BinSeq:
    """``prefix`` followed by ``tail`` forever."""

    prefix: tuple = ()
    tail: int = 0

    def __post_init__(self):
        p = tuple(int(b) for b in self.prefix)
        if any(b not in (0, 1) for b in p) or self.tail not in (0, 1):
            raise DomainError("binary sequences hold 0s and 1s only")
        object.__setattr__(self, "prefix", p)

    @classmethod
    def from_bits(cls, s: str, tail: int = 0) -> "BinSeq":
        return cls(tuple(int(c) for c in s), tail)

    def __getitem__(self, i: int) -> int:
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def take(self, n: int) -> tuple:
        if n <= len(self.prefix):
            return self.prefix[:n]
        return self.prefix + (self.tail,) * (n - len(self.prefix))

    def __str__(self) -> str:
        return "".join(map(str, self.prefix)) + f"*{self.tail}^w"


@dataclass(frozen=True)
class CantorFunctional:
    """A functional ``G`` on binary sequences with natural-number values.

    ``continuity_bound`` (if given) asserts that ``G(f)`` depends only on the
    first ``continuity_bound`` entries of ``f``.
    """

    evaluator: Callable[[BinSeq], int]
    continuity_bound: Optional[int] = None
    name: str = "G"

    def __call__(self, f: BinSeq) -> int:
        v = self.evaluator(f)
        if not isinstance(v, (int, np.integer)) or v < 0:
            raise DomainError(f"{self.name} returned {v!r}, expected a natural number")
        return int(v)


def constant_functional(n: int) -> CantorFunctional:
    return CantorFunctional(lambda f: n, 0, f"const({n})")


def first_bit_functional() -> CantorFunctional:
    """``G(f) = 1 + f(0)``."""
    return CantorFunctional(lambda f: 1 + f[0], 1, "1+f(0)")


def table_functional(bound: int, table: Sequence[int], name: str = "table") -> CantorFunctional:
    """``G(f) = table[first bound bits of f read as a binary number]``."""
    table = [int(v) for v in table]
    if len(table) != 1 << bound:
        raise DomainError(f"table needs {1 << bound} entries")

    def ev(f: BinSeq) -> int:
        v = 0
        for b in f.take(bound):
            v = (v << 1) | b
        return table[v]

    return CantorFunctional(ev, bound, name)


def random_functional(seed: int, bound: Optional[int] = None, max_value: int = 10) -> CantorFunctional:
    """A random table functional with continuity bound at most 10."""
    rng = np.random.default_rng(seed)
    b = int(rng.integers(0, 11)) if bound is None else bound
    table = rng.integers(0, max_value + 1, size=1 << b)
    return table_functional(b, table.tolist(), f"random(seed={seed}, bound={b})")


def theta(G: CantorFunctional, depth_cap: Optional[int] = None) -> list[BinSeq]:
    """Finitely many ``g`` whose cylinders ``[g restricted to G(g)]`` cover 2^N.

    Depth-first, left branch first: at node ``s`` take ``g = s*0^w``; if
    ``G(g) <= |s|`` the cylinder of ``g`` contains every extension of ``s``
    and the branch is closed.
    """
    cap = default_depth_cap() if depth_cap is None else depth_cap
    found: list[BinSeq] = []
    stack: list[tuple] = [()]
    while stack:
        s = stack.pop()
        g = BinSeq(s)
        if G(g) <= len(s):
            found.append(g)
            continue
        if len(s) >= cap:
            raise DepthCapError(f"no finite subcover found to depth {cap}")
        stack.append(s + (1,))
        stack.append(s + (0,))
    return found


def verify_scf(candidates: Sequence[BinSeq], G: CantorFunctional, depth: int) -> bool:
    """Does every binary prefix of length ``depth`` extend some ``g``
    restricted to ``G(g)``?  Exhaustive over all ``2**depth`` prefixes.
    """
    if G.continuity_bound is not None and depth < G.continuity_bound:
        raise PreconditionError(f"depth {depth} is below the continuity bound {G.continuity_bound}")
    covered = np.zeros(1 << depth, dtype=bool)
    for g in candidates:
        n = G(g)
        if n > depth:
            raise PreconditionError(f"G({g}) = {n} exceeds depth {depth}")
        v = 0
        for b in g.take(n):
            v = (v << 1) | b
        shift = depth - n
        covered[v << shift : (v + 1) << shift] = True
    return bool(covered.all())


def xi_map(f: BinSeq, bits: Optional[int] = None) -> Fraction:
    """``sum f(i) / 2**(i+1)``; truncated to ``bits`` entries when given."""
    n = len(f.prefix) if bits is None else bits
    v = Fraction(0)
    for i, b in enumerate(f.take(n)):
        if b:
            v += Fraction(1, 1 << (i + 1))
    if bits is None and f.tail:
        v += Fraction(1, 1 << n)
    return v


def zeta_map(f: BinSeq, digits: Optional[int] = None) -> Fraction:
    """``sum 2 f(i) / 3**(i+1)``; truncated to ``digits`` entries when given."""
    n = len(f.prefix) if digits is None else digits
    v = Fraction(0)
    p = Fraction(1)
    for b in f.take(n):
        p /= 3
        if b:
            v += 2 * p
    if digits is None and f.tail:
        v += Fraction(1, 3**n)
    return v


# cover transfer ------------------------------------------------------------


def cover_transfer_inv(psi: Gauge, search_cap: int = 64) -> CantorFunctional:
    """The functional ``F_psi``; raises :class:`EffectivityError` past ``search_cap``."""

    def ev(f: BinSeq) -> int:
        x = Tag(xi_map(f))
        d = Fraction(0)
        for n in range(search_cap + 1):
            w = Fraction(1, 1 << n)
            reach = max(x - d, d + w - x)
            if psi.covers_reach(x, reach, strict=True):
                return n
            if f[n]:
                d += w / 2
        raise EffectivityError(f"no cylinder of length <= {search_cap} fits the {psi.name}-ball at {x}")

    return CantorFunctional(ev, None, f"F[{psi.name}]")


@dataclass(frozen=True)
class _Located:
    kind: str  # "gap", "in", "unknown"
    lo: Tag = None
    hi: Tag = None
    digits: tuple = ()
    cycle: tuple = ()  # repeating part after digits; () means tail of zeros

    def bits(self, n: int) -> tuple:
        out = list(self.digits[:n])
        cyc = self.cycle or (0,)
        i = 0
        while len(out) < n:
            out.append(cyc[i % len(cyc)])
            i += 1
        return tuple(out)


def cantor_locate(x, cap: int = 200) -> _Located:
    """Decide where ``x`` sits relative to the middle-thirds Cantor set.

    Returns the removed open interval containing ``x`` (``gap``), the binary
    digits of ``x`` (``in``: prefix plus repeating cycle), or ``unknown`` with
    the level-``cap`` cylinder when ``cap`` ternary steps do not settle it.
    """
    x = to_tag(x)
    if x < 0:
        return _Located("gap", Tag(-10**9), Tag(0))
    if x > 1:
        return _Located("gap", Tag(1), Tag(10**9))
    lo, width = Fraction(0), Fraction(1)
    digits: list[int] = []
    seen: dict = {}
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    for _ in range(cap):
        u = (x - lo) / width
        if u.is_rational():
            key = u.a
            if key in seen:
                start = seen[key]
                return _Located("in", digits=tuple(digits[:start]), cycle=tuple(digits[start:]))
            seen[key] = len(digits)
        if u == 0:
            return _Located("in", digits=tuple(digits))
        if u == 1:
            return _Located("in", digits=tuple(digits), cycle=(1,))
        if u == third:
            return _Located("in", digits=tuple(digits) + (0,), cycle=(1,))
        if u == two_thirds:
            return _Located("in", digits=tuple(digits) + (1,))
        if u < third:
            digits.append(0)
            width /= 3
        elif u > two_thirds:
            digits.append(1)
            lo += 2 * width / 3
            width /= 3
        else:
            return _Located("gap", Tag(lo + width / 3), Tag(lo + 2 * width / 3))
    return _Located("unknown", Tag(lo), Tag(lo + width), tuple(digits))


class CantorGauge(Gauge):
    """The gauge ``Psi_F`` built from a Cantor functional ``F``.

    Tags whose position relative to the Cantor set cannot be settled within
    ``digit_cap`` ternary digits are never admitted as tags.
    """

    def __init__(self, F: CantorFunctional, digit_cap: int = 200):
        self.F = F
        self.digit_cap = digit_cap
        self.name = f"Psi[{F.name}]"

    def _sequence(self, loc: _Located) -> BinSeq:
        k = self.F.continuity_bound
        if k is None:
            k = 64
        return BinSeq(loc.bits(max(k, len(loc.digits))))

    def radius(self, x):
        loc = cantor_locate(x, self.digit_cap)
        if loc.kind == "gap":
            return round_down(min(x - loc.lo, loc.hi - x))
        if loc.kind == "unknown":
            raise EffectivityError(f"cannot place {x} relative to the Cantor set within {self.digit_cap} digits")
        g = self._sequence(loc)
        n = self.F(g)
        sigma = loc.bits(n)
        v = 0
        for b in sigma:
            v = (v << 1) | b
        x = to_tag(x)
        gaps = []
        if v > 0:
            left = _bits_of(v - 1, n)
            gaps.append(x - (zeta_map(BinSeq(left)) + Fraction(1, 3**n)))
        if v < (1 << n) - 1:
            right = _bits_of(v + 1, n)
            gaps.append(zeta_map(BinSeq(right)) - x)
        if not gaps:
            return Fraction(1)
        B = min(gaps).a  # x is rational here, so is B
        return Fraction(1, math.ceil(1 / B))

    def covers_reach(self, t, reach, strict=False):
        try:
            r = self.radius(t)
        except EffectivityError:
            return False
        return reach < r if strict else reach <= r

    def anchors(self, lo, hi):
        loc = cantor_locate((lo + hi) / 2, self.digit_cap)
        if loc.kind == "in":
            return [(lo + hi) / 2]
        return [p for p in (loc.lo, loc.hi) if lo <= p <= hi]


def _bits_of(v: int, n: int) -> tuple:
    return tuple((v >> (n - 1 - i)) & 1 for i in range(n))


def cover_transfer(F: CantorFunctional, digit_cap: int = 200) -> CantorGauge:
    """The gauge ``Psi_F`` on the reals."""
    return CantorGauge(F, digit_cap)


def zeta_inverse(x, cap: int = 200, bits: int = 64) -> BinSeq:
    """The binary sequence of a rational Cantor point, truncated to ``bits``."""
    loc = cantor_locate(x, cap)
    if loc.kind != "in":
        raise DomainError(f"{x} is not a (decidable) point of the Cantor set")
    return BinSeq(loc.bits(max(bits, len(loc.digits))))
