"""Intervals, gauges, tagged partitions, fineness and Riemann sums.

Geometry is exact (endpoints and tags live in Q(sqrt 2)); function values
are binary64.  A gauge returns rational *lower bounds* of its radius, so a
positive fineness verdict is always sound.

Partitions may contain *runs*: ``count`` equal closed pieces of a node,
each tagged at its midpoint.  Runs let very fine partitions (millions of
pieces) be stored and summed without materialising every piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import (
    DomainError,
    EmptyPartitionError,
    MalformedPartitionError,
    UndefinedValueError,
)
from .exact import Tag, as_tag, round_down, to_tag

__all__ = [
    "Interval",
    "Gauge",
    "ConstantGauge",
    "FunctionGauge",
    "MinGauge",
    "SplitGauge",
    "GaugeModulus",
    "RealFn",
    "Piece",
    "Run",
    "TaggedPartition",
    "mesh",
    "riemann_sum",
    "is_fine",
    "min_gauge",
    "split_gauge",
    "uniform_partition",
]


@dataclass(frozen=True)
class Interval:
    """Interval ``[lo, hi]`` (or ``(lo, hi)`` when ``closed`` is false)."""

    lo: Tag
    hi: Tag
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", to_tag(self.lo))
        object.__setattr__(self, "hi", to_tag(self.hi))
        if self.hi < self.lo:
            raise DomainError(f"interval with lo={self.lo} > hi={self.hi}")

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, closed=False)

    @classmethod
    def around(cls, center, radius) -> "Interval":
        c = to_tag(center)
        return cls(c - radius, c + radius, closed=False)

    @property
    def length(self) -> Tag:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Tag:
        return (self.lo + self.hi) / 2

    def contains(self, t) -> bool:
        t = to_tag(t)
        if self.closed:
            return self.lo <= t <= self.hi
        return self.lo < t < self.hi

    def __str__(self) -> str:
        l, r = ("[", "]") if self.closed else ("(", ")")
        return f"{l}{self.lo}, {self.hi}{r}"


UNIT = Interval(0, 1)


# gauges -------------------------------------------------------------------


class Gauge:
    """A positive radius function on tags.

    Subclasses implement :meth:`radius`.  ``lower_bound(lo, hi)`` may return a
    rational that is <= the radius at every point of ``[lo, hi]``; the
    partitioner uses it to emit uniform runs.  ``anchors(lo, hi)`` lists
    points the partitioner should try as tags on that node (for example the
    split point of a splitting gauge, which no other tag can cover).
    """

    name = "gauge"
    continuous = False

    def radius(self, t: Tag) -> Fraction:
        raise NotImplementedError

    def __call__(self, t) -> Fraction:
        return self.radius(to_tag(t))

    def covers_reach(self, t: Tag, reach: Tag, strict: bool = False) -> bool:
        """Is ``reach`` (< or <=) the radius at ``t``?"""
        r = self.radius(t)
        return reach < r if strict else reach <= r

    def admits(self, t, lo, hi, strict: bool = False) -> bool:
        """Is ``[lo, hi]`` inside the ball of radius ``self(t)`` around ``t``?

        Closed containment by default; ``strict`` asks for the open ball.
        """
        t, lo, hi = to_tag(t), to_tag(lo), to_tag(hi)
        if t < lo or t > hi:
            return False
        reach = max(t - lo, hi - t)
        return self.covers_reach(t, reach, strict)

    def lower_bound(self, lo: Tag, hi: Tag) -> Optional[Fraction]:
        return None

    def anchors(self, lo: Tag, hi: Tag) -> list[Tag]:
        return []

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class ConstantGauge(Gauge):
    continuous = True

    def __init__(self, r):
        r = Fraction(r) if not isinstance(r, Tag) else round_down(r)
        if r <= 0:
            raise DomainError(f"gauge radius must be positive, got {r}")
        self.r = r
        self.name = f"const({r})"

    def radius(self, t):
        return self.r

    def lower_bound(self, lo, hi):
        return self.r


class FunctionGauge(Gauge):
    """Gauge from a callable ``Tag -> Fraction | Tag``.

    Irrational values are replaced by a rational lower bound (see ``round_down``).  ``lower``
    optionally certifies a lower bound on a closed interval.
    """

    def __init__(
        self,
        fn: Callable[[Tag], Union[Fraction, Tag, int]],
        name: str = "gauge",
        lower: Optional[Callable[[Tag, Tag], Optional[Fraction]]] = None,
        continuous: bool = False,
    ):
        self.fn = fn
        self.name = name
        self._lower = lower
        self.continuous = continuous

    def radius(self, t):
        v = self.fn(t)
        r = round_down(v) if isinstance(v, Tag) else Fraction(v)
        if r <= 0:
            raise DomainError(f"gauge {self.name} is not positive at {t}")
        return r

    def lower_bound(self, lo, hi):
        return self._lower(lo, hi) if self._lower is not None else None


class MinGauge(Gauge):
    def __init__(self, d1: Gauge, d2: Gauge):
        self.d1, self.d2 = d1, d2
        self.name = f"min({d1.name}, {d2.name})"
        self.continuous = d1.continuous and d2.continuous

    def radius(self, t):
        return min(self.d1.radius(t), self.d2.radius(t))

    def covers_reach(self, t, reach, strict=False):
        # delegate so that huge-index shortcuts in the parts still apply
        return self.d1.covers_reach(t, reach, strict) and self.d2.covers_reach(t, reach, strict)

    def lower_bound(self, lo, hi):
        a = self.d1.lower_bound(lo, hi)
        if a is None:
            return None
        b = self.d2.lower_bound(lo, hi)
        if b is None:
            return None
        return min(a, b)

    def anchors(self, lo, hi):
        return _merge(self.d1.anchors(lo, hi), self.d2.anchors(lo, hi))


class SplitGauge(Gauge):
    """The splitting gauge at ``x``:

    ``min(d1(y), (x-y)/2)`` for ``y < x``, ``min(d1(x), d2(x))`` at ``x`` and
    ``min(d2(y), (y-x)/2)`` for ``y > x``.
    """

    def __init__(self, d1: Gauge, d2: Gauge, x: Tag):
        self.d1, self.d2, self.x = d1, d2, x
        self.name = f"split({d1.name}, {d2.name}, {x})"

    def radius(self, y):
        x = self.x
        if y < x:
            return min(self.d1.radius(y), round_down((x - y) / 2))
        if y > x:
            return min(self.d2.radius(y), round_down((y - x) / 2))
        return min(self.d1.radius(x), self.d2.radius(x))

    def covers_reach(self, y, reach, strict=False):
        x = self.x
        if y == x:
            return self.d1.covers_reach(y, reach, strict) and self.d2.covers_reach(y, reach, strict)
        half = abs(x - y) / 2
        if (reach >= half) if strict else (reach > half):
            return False
        side = self.d1 if y < x else self.d2
        return side.covers_reach(y, reach, strict)

    def lower_bound(self, lo, hi):
        # only blocks on one side of x; the distance term is smallest at the near end
        if hi < self.x:
            a, dist = self.d1.lower_bound(lo, hi), (self.x - hi) / 2
        elif lo > self.x:
            a, dist = self.d2.lower_bound(lo, hi), (lo - self.x) / 2
        else:
            return None
        if a is None:
            return None
        return min(a, round_down(dist))

    def anchors(self, lo, hi):
        own = [self.x] if lo <= self.x <= hi else []
        return _merge(own, self.d1.anchors(lo, hi), self.d2.anchors(lo, hi))


def _merge(*lists: list[Tag]) -> list[Tag]:
    out: list[Tag] = []
    for lst in lists:
        for t in lst:
            if t not in out:
                out.append(t)
    return out


def min_gauge(d1: Gauge, d2: Gauge) -> Gauge:
    """Pointwise minimum; a partition fine for the result is fine for both."""
    return MinGauge(d1, d2)


def split_gauge(d1: Gauge, d2: Gauge, x, target: Interval = UNIT) -> Gauge:
    """Splitting gauge at an interior point ``x`` of ``target``."""
    x = to_tag(x)
    if not (target.lo < x < target.hi):
        raise DomainError(f"split point {x} is not interior to {target}")
    return SplitGauge(d1, d2, x)


GaugeModulus = Callable[[Fraction], Gauge]


# functions ----------------------------------------------------------------


@dataclass(frozen=True)
class RealFn:
    """A real function evaluated approximately at exact tags.

    ``vectorized`` (optional) evaluates a float64 array at once and is used
    for runs.  ``exact_tags`` marks functions that must see the exact tag
    (Dirichlet's function depends only on whether the tag is rational).
    """

    evaluator: Callable[[Tag], float]
    name: str = "f"
    vectorized: Optional[Callable[[np.ndarray], np.ndarray]] = None
    exact_tags: bool = False
    domain: Optional[Interval] = None

    def __call__(self, t) -> float:
        t = to_tag(t)
        if self.domain is not None and not self.domain.contains(t):
            raise UndefinedValueError(f"{self.name} undefined at {t} (outside {self.domain})")
        try:
            v = float(self.evaluator(t))
        except (ZeroDivisionError, ValueError, OverflowError, ArithmeticError) as exc:
            raise UndefinedValueError(f"{self.name} undefined at {t}: {exc}") from None
        if not math.isfinite(v):
            raise UndefinedValueError(f"{self.name} undefined at {t}")
        return v

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        if self.vectorized is None or self.exact_tags:
            raise TypeError(f"{self.name} has no vectorized evaluator")
        with np.errstate(all="ignore"):
            ys = np.asarray(self.vectorized(xs), dtype=float)
        if ys.shape != xs.shape:
            ys = np.broadcast_to(ys, xs.shape)
        bad = ~np.isfinite(ys)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise UndefinedValueError(f"{self.name} undefined at {xs[i]!r}")
        if self.domain is not None:
            out = (xs < float(self.domain.lo)) | (xs > float(self.domain.hi))
            if out.any():
                i = int(np.flatnonzero(out)[0])
                raise UndefinedValueError(f"{self.name} undefined at {xs[i]!r} (outside {self.domain})")
        return ys


# partitions ---------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    tag: Tag
    interval: Interval

    @property
    def lo(self) -> Tag:
        return self.interval.lo

    @property
    def hi(self) -> Tag:
        return self.interval.hi

    def __len__(self) -> int:
        return 1


@dataclass(frozen=True)
class Run:
    """``count`` equal pieces of ``[lo, hi]``, each tagged at its midpoint.

    ``radius_floor`` records a certified lower bound of the gauge the run
    was built for; it is only a hint and is never trusted by :func:`is_fine`.
    """

    lo: Tag
    hi: Tag
    count: int
    radius_floor: Optional[Fraction] = None

    def __post_init__(self):
        if self.count < 1:
            raise MalformedPartitionError("run with no pieces")
        if self.hi <= self.lo:
            raise MalformedPartitionError("run over a degenerate interval")

    @property
    def width(self) -> Tag:
        return (self.hi - self.lo) / self.count

    def __len__(self) -> int:
        return self.count

    def pieces(self) -> Iterator[Piece]:
        h = self.width
        a = self.lo
        for i in range(self.count):
            b = self.hi if i == self.count - 1 else self.lo + h * (i + 1)
            yield Piece((a + b) / 2, Interval(a, b))
            a = b

    def float_tags(self, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        stop = self.count if stop is None else stop
        h = float(self.width)
        return float(self.lo) + (np.arange(start, stop, dtype=float) + 0.5) * h


Block = Union[Piece, Run]


class TaggedPartition:
    """A validated tagged partition of ``[a, b]``.

    Built from pieces and runs; validation checks contiguity, that each tag
    lies in its interval, and that the pieces exactly fill the target.

    >>> P = TaggedPartition([(0, (0, Fraction(1, 2))), (Fraction(1, 2), (Fraction(1, 2), 1))])
    >>> len(P), P.target
    (2, Interval(lo=Tag(0), hi=Tag(1), closed=True))
    """

    __slots__ = ("blocks", "target", "_len")

    def __init__(self, items: Iterable, target: Optional[Interval] = None):
        blocks: list[Block] = []
        for it in items:
            if isinstance(it, (Piece, Run)):
                blocks.append(it)
            else:
                t, iv = it
                if not isinstance(iv, Interval):
                    iv = Interval(*iv)
                blocks.append(Piece(to_tag(t), iv))
        if not blocks:
            raise EmptyPartitionError("empty partition")
        self.blocks = tuple(blocks)
        self._len = sum(len(b) for b in blocks)
        first, last = _bounds(blocks[0]), _bounds(blocks[-1])
        self.target = Interval(first[0], last[1])
        if target is not None and (target.lo != self.target.lo or target.hi != self.target.hi):
            raise MalformedPartitionError(f"partition covers {self.target}, expected {target}")
        self._validate()

    def _validate(self) -> None:
        prev = None
        for b in self.blocks:
            lo, hi = _bounds(b)
            if prev is not None and lo != prev:
                raise MalformedPartitionError(f"gap or overlap at {prev} / {lo}")
            if isinstance(b, Piece) and not (lo <= b.tag <= hi):
                raise MalformedPartitionError(f"tag {b.tag} outside {b.interval}")
            prev = hi

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[Piece]:
        for b in self.blocks:
            if isinstance(b, Piece):
                yield b
            else:
                yield from b.pieces()

    @property
    def items(self) -> list[tuple[Tag, Interval]]:
        return [(p.tag, p.interval) for p in self]

    @property
    def tags(self) -> list[Tag]:
        return [p.tag for p in self]

    def __repr__(self) -> str:
        return f"TaggedPartition({len(self)} pieces over {self.target})"


def _bounds(b: Block) -> tuple[Tag, Tag]:
    if isinstance(b, Piece):
        return b.interval.lo, b.interval.hi
    return b.lo, b.hi


def uniform_partition(target: Interval, n: int) -> TaggedPartition:
    """``n`` equal pieces with midpoint tags."""
    return TaggedPartition([Run(target.lo, target.hi, n)])


def mesh(P: TaggedPartition) -> Tag:
    """Largest piece length, exactly."""
    if not isinstance(P, TaggedPartition) or len(P) == 0:
        raise EmptyPartitionError("empty partition")
    best = None
    for b in P.blocks:
        w = b.interval.length if isinstance(b, Piece) else b.width
        if best is None or w > best:
            best = w
    return best


_CHUNK = 1 << 20


def riemann_sum(f: RealFn, P: TaggedPartition) -> float:
    """Sum of ``f(tag) * length`` over the pieces of ``P``."""
    partials: list[float] = []
    vec = f.vectorized is not None and not f.exact_tags
    if vec:
        # batch single pieces into arrays, runs are summed chunkwise
        ts: list[float] = []
        ws: list[float] = []
        for b in P.blocks:
            if isinstance(b, Piece):
                ts.append(float(b.tag))
                ws.append(float(b.interval.length))
            else:
                h = float(b.width)
                for s in range(0, b.count, _CHUNK):
                    xs = b.float_tags(s, min(b.count, s + _CHUNK))
                    partials.append(float(np.sum(f.eval_array(xs))) * h)
        if ts:
            xs = np.array(ts)
            partials.append(float(np.dot(f.eval_array(xs), np.array(ws))))
    else:
        for b in P.blocks:
            if isinstance(b, Piece):
                partials.append(f(b.tag) * float(b.interval.length))
            else:
                h = float(b.width)
                partials.append(math.fsum(f(p.tag) for p in b.pieces()) * h)
    return math.fsum(partials)


def is_fine(delta: Gauge, P: TaggedPartition) -> bool:
    """Closed containment ``I_i`` within ``[t_i - delta(t_i), t_i + delta(t_i)]``
    for every piece.  Runs are checked through ``delta.lower_bound`` when it
    is available, otherwise piece by piece.
    """
    for b in P.blocks:
        if isinstance(b, Piece):
            if not delta.admits(b.tag, b.interval.lo, b.interval.hi):
                return False
        else:
            lb = delta.lower_bound(b.lo, b.hi)
            if lb is not None and b.width / 2 <= lb:
                continue
            for p in b.pieces():
                if not delta.admits(p.tag, p.interval.lo, p.interval.hi):
                    return False
    return True
