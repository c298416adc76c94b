"""Fine partitions, finite subcovers and cover checking.

``fine_partition`` bisects the target until every node is accepted.  A node
is accepted

* as a uniform run of midpoint-tagged pieces when the gauge certifies a
  lower bound on the node that is close to its endpoint values, or
* as a single piece when some candidate tag covers the whole node.

Candidates are the gauge's anchors (points only they can cover, such as a
split point) followed by the strategy's proposals.  A rejected node is cut
at its first interior anchor if it has one, else bisected.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import UNIT, Gauge, Interval, Piece, Run, TaggedPartition
from .errors import DepthCapError, DomainError, PreconditionError, UnverifiedCoverError
from .exact import SQRT2, Tag, floor_tag, to_tag

__all__ = [
    "TagStrategy",
    "DEFAULT_STRATEGY",
    "MIDPOINT_FIRST",
    "IRRATIONAL_FIRST",
    "default_depth_cap",
    "fine_partition",
    "Subcover",
    "finite_subcover",
    "cover_to_partition",
    "verify_cover",
    "first_uncovered",
]

_KINDS = ("a", "mid", "b", "mid+", "mid-")


@dataclass(frozen=True)
class TagStrategy:
    """Ordered tag proposals for a node ``[a, b]``.

    Kinds: ``a``, ``b``, ``mid`` and ``mid+``/``mid-`` (the midpoint shifted
    by ``sqrt2*(b-a)/8``, irrational whenever ``a`` and ``b`` are rational).
    """

    order: tuple[str, ...] = _KINDS
    name: str = "default"

    def __post_init__(self):
        bad = [k for k in self.order if k not in _KINDS]
        if bad or not self.order:
            raise DomainError(f"unknown tag kinds {bad}; use {_KINDS}")

    def propose(self, lo: Tag, hi: Tag, depth: int) -> list[Tag]:
        mid = (lo + hi) / 2
        off = SQRT2 * (hi - lo) / 8
        table = {"a": lo, "b": hi, "mid": mid, "mid+": mid + off, "mid-": mid - off}
        return [table[k] for k in self.order]


DEFAULT_STRATEGY = TagStrategy()
MIDPOINT_FIRST = TagStrategy(("mid", "a", "b", "mid+", "mid-"), "midpoint-first")
IRRATIONAL_FIRST = TagStrategy(("mid+", "mid-", "mid", "a", "b"), "irrational-first")
LEFT_ONLY = TagStrategy(("a",), "left")


def default_depth_cap() -> int:
    """``GAUGEINT_DEPTH_CAP`` from the environment, else 64."""
    v = os.environ.get("GAUGEINT_DEPTH_CAP")
    if v is None:
        return 64
    try:
        d = int(v)
    except ValueError:
        raise PreconditionError(f"GAUGEINT_DEPTH_CAP must be an integer, got {v!r}") from None
    if d < 1:
        raise PreconditionError("GAUGEINT_DEPTH_CAP must be >= 1")
    return d


def _ceil_tag(t: Tag) -> int:
    f = floor_tag(t)
    return f if t == f else f + 1


def _run_for(delta: Gauge, lo: Tag, hi: Tag, strict: bool, ratio: Fraction):
    lb = delta.lower_bound(lo, hi)
    if lb is None or lb <= 0:
        return None
    top = max(delta.radius(lo), delta.radius(hi))
    if lb < ratio * top:
        return None
    half = (hi - lo) / (2 * lb)
    # pieces of width w have reach w/2; need w/2 <= lb (or < lb)
    m = floor_tag(half) + 1 if strict else max(1, _ceil_tag(half))
    if m == 1:
        return Piece((lo + hi) / 2, Interval(lo, hi))
    return Run(lo, hi, m, lb)


def fine_partition(
    delta: Gauge,
    target: Interval = UNIT,
    strategy: Optional[TagStrategy] = None,
    depth_cap: Optional[int] = None,
    *,
    strict: bool = False,
    runs: bool = True,
    run_ratio: Fraction = Fraction(7, 8),
) -> TaggedPartition:
    """A ``delta``-fine tagged partition of ``target``, or :class:`DepthCapError`.

    ``strict`` asks each piece to lie in the *open* ball around its tag,
    which is what a subcover needs.  Deterministic for fixed arguments.
    """
    strategy = strategy or DEFAULT_STRATEGY
    depth_cap = default_depth_cap() if depth_cap is None else depth_cap
    if depth_cap < 1:
        raise PreconditionError("depth_cap must be >= 1")
    if target.length == 0:
        raise DomainError("cannot partition a degenerate interval")
    run_ratio = Fraction(run_ratio)

    out: list = []
    stack = [(target.lo, target.hi, 0)]
    while stack:
        lo, hi, d = stack.pop()
        block = _run_for(delta, lo, hi, strict, run_ratio) if runs else None
        anchors = delta.anchors(lo, hi) if block is None else []
        if block is None:
            for t in anchors + strategy.propose(lo, hi, d):
                if t < lo or t > hi:
                    continue
                reach = max(t - lo, hi - t)
                if delta.covers_reach(t, reach, strict):
                    block = Piece(t, Interval(lo, hi))
                    break
        if block is not None:
            out.append(block)
            continue
        if d >= depth_cap:
            raise DepthCapError(f"no δ-fine partition found to depth {depth_cap} (stuck on [{lo}, {hi}])")
        # cut at an anchor inside the node so it ends up as an endpoint;
        # bisection with irrational endpoints would straddle it forever
        inner = [t for t in anchors if lo < t < hi]
        mid = inner[0] if inner else (lo + hi) / 2
        stack.append((mid, hi, d + 1))
        stack.append((lo, mid, d + 1))
    return TaggedPartition(out)


# subcovers ----------------------------------------------------------------


@dataclass(frozen=True)
class Subcover:
    """Centers with their radii; ``verified`` is set by :meth:`verify`."""

    centers: tuple
    radii: tuple
    target: Interval
    verified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(to_tag(c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(Fraction(r) for r in self.radii))
        if len(self.centers) != len(self.radii) or not self.centers:
            raise DomainError("a subcover needs as many radii as centers, at least one")
        if any(r <= 0 for r in self.radii):
            raise DomainError("subcover radii must be positive")

    def __len__(self) -> int:
        return len(self.centers)

    def intervals(self) -> list[Interval]:
        return [Interval.around(c, r) for c, r in zip(self.centers, self.radii)]

    def verify(self) -> "Subcover":
        if verify_cover(self.intervals(), self.target):
            return replace(self, verified=True)
        return replace(self, verified=False)


def finite_subcover(
    psi: Gauge,
    target: Interval = UNIT,
    depth_cap: Optional[int] = None,
    strategy: Optional[TagStrategy] = None,
) -> Subcover:
    """Finitely many centers whose open ``psi``-balls cover ``target``.

    The centers are the tags of a strictly fine partition, so they cover by
    construction; the cover is still checked by the sweep before returning.
    """
    P = fine_partition(psi, target, strategy, depth_cap, strict=True)
    centers = [p.tag for p in P]
    radii = [psi.radius(c) for c in centers]
    sc = Subcover(tuple(centers), tuple(radii), target).verify()
    if not sc.verified:  # pragma: no cover - would be a partitioner bug
        raise AssertionError("strictly fine partition failed to cover")
    return sc


def cover_to_partition(sc: Subcover) -> TaggedPartition:
    """Turn a verified subcover into a tagged partition.

    Every piece is a closed interval inside the open ball of its tag, and
    every tag is one of the centers.  Centers are scanned in increasing
    order; a center is reachable when it covers the left end or when the
    ball of an earlier reachable center overlaps its own.  A reachable
    center whose ball passes the right end closes a chain, and consecutive
    balls in the chain are cut at a point between both centers inside both
    balls.
    """
    if not sc.verified:
        raise UnverifiedCoverError("cover_to_partition needs a verified subcover")
    a, b = sc.target.lo, sc.target.hi
    best: dict = {}
    for c, r in zip(sc.centers, sc.radii):
        if a <= c <= b and (c not in best or r > best[c]):
            best[c] = r
    nodes = sorted(best.items(), key=lambda cr: cr[0])

    pred: list[Optional[int]] = [None] * len(nodes)
    reachable = [False] * len(nodes)
    top = None  # index of reachable node with the largest right end so far
    end = None
    for i, (z, r) in enumerate(nodes):
        left = z - r
        if left < a:
            reachable[i] = True
        elif top is not None and nodes[top][0] + nodes[top][1] > left:
            reachable[i] = True
            pred[i] = top
        if reachable[i]:
            if z + r > b:
                end = i
                break
            if top is None or z + r > nodes[top][0] + nodes[top][1]:
                top = i
    if end is None:
        raise DomainError("subcover centers inside the target do not form a chain")

    chain = []
    i: Optional[int] = end
    while i is not None:
        chain.append(i)
        i = pred[i]
    chain.reverse()

    cuts = [a]
    for l, n in zip(chain, chain[1:]):
        zl, rl = nodes[l]
        zn, rn = nodes[n]
        lo = max(zl, zn - rn)
        hi = min(zn, zl + rl)
        cuts.append((lo + hi) / 2)
    cuts.append(b)
    pieces = [Piece(nodes[j][0], Interval(cuts[k], cuts[k + 1])) for k, j in enumerate(chain)]
    return TaggedPartition(pieces)


def first_uncovered(intervals: Iterable[Interval], target: Interval) -> Optional[Tag]:
    """A point of ``target`` outside every open interval, or None.

    Sweep: ``cur`` is the smallest point not yet known to be covered; the
    intervals starting strictly left of it push it to their furthest right
    end.  All comparisons are exact.
    """
    ivs = sorted(intervals, key=lambda iv: iv.lo)
    cur = target.lo
    i = 0
    best = None
    while True:
        while i < len(ivs) and ivs[i].lo < cur:
            if best is None or ivs[i].hi > best:
                best = ivs[i].hi
            i += 1
        if best is None or best <= cur:
            return cur
        cur = best
        if cur > target.hi:
            return None


def verify_cover(intervals: Iterable[Interval], target: Interval) -> bool:
    """Do the open ``intervals`` cover the closed ``target``?"""
    return first_uncovered(intervals, target) is None
