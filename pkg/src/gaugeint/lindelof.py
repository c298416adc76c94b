"""Countable subcovers of the reals and of Baire space.

``countable_subcover_reals`` glues the finite subcovers of ``[-N, N]`` for
``N = 1, 2, ...`` into one indexed sequence.  On Baire space the
enumeration of all ``w*0^w`` (by length, then lexicographically) plays the
same role for a continuous gauge ``Psi``, and the well-foundedness test for
a bounded tree reduces to asking whether some enumerated sequence makes the
tree's search functional vanish.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .core import Gauge, Interval
from .cousin import Subcover, TagStrategy, finite_subcover, verify_cover
from .errors import BoundsError, DepthCapError, DomainError, PreconditionError
from .exact import Tag
from .funcs import enumerate_rational

__all__ = [
    "CountableSubcover",
    "countable_subcover_reals",
    "rational_centers_cover",
    "BaireSeq",
    "BaireGauge",
    "BaireEnumeration",
    "baire_enumeration",
    "find_cover_index",
    "FiniteTree",
    "search_functional",
    "has_maximal_path",
    "wellfounded_via_xi",
]


class CountableSubcover:
    """Indexed ``(center, radius)`` pairs, produced block by block on demand.

    Block ``N`` is a finite subcover of ``[-N, N]``; pairs already emitted by
    an earlier block are not repeated, so indices stay dense and stable.
    """

    def __init__(self, psi: Gauge, N_max: Optional[int] = None, depth_cap: Optional[int] = None,
                 strategy: Optional[TagStrategy] = None):
        self.psi = psi
        self.N_max = N_max
        self.depth_cap = depth_cap
        self.strategy = strategy
        self._pairs: list[tuple[Tag, Fraction]] = []
        self._provenance: list[int] = []
        self._index: dict = {}
        self._blocks: list[list[int]] = []  # indices making up each block's subcover

    def _grow(self) -> bool:
        N = len(self._blocks) + 1
        if self.N_max is not None and N > self.N_max:
            return False
        try:
            sc = finite_subcover(self.psi, Interval(-N, N), self.depth_cap, self.strategy)
        except DepthCapError as exc:
            raise DepthCapError(f"block N={N}: {exc}") from None
        members = []
        for c, r in zip(sc.centers, sc.radii):
            key = (c, r)
            if key not in self._index:
                self._index[key] = len(self._pairs)
                self._pairs.append(key)
                self._provenance.append(N)
            members.append(self._index[key])
        self._blocks.append(members)
        return True

    def __getitem__(self, i: int) -> tuple[Tag, Fraction]:
        if i < 0:
            raise IndexError("negative index")
        while i >= len(self._pairs):
            if not self._grow():
                raise IndexError(i)
        return self._pairs[i]

    def __iter__(self) -> Iterator[tuple[Tag, Fraction]]:
        i = 0
        while True:
            try:
                yield self[i]
            except IndexError:
                return
            i += 1

    def provenance(self, i: int) -> int:
        self[i]
        return self._provenance[i]

    def block(self, N: int) -> list[int]:
        """Indices of the pairs forming the finite subcover of ``[-N, N]``."""
        if N < 1:
            raise DomainError("blocks start at N = 1")
        while len(self._blocks) < N:
            if not self._grow():
                raise IndexError(f"N={N} exceeds N_max={self.N_max}")
        return list(self._blocks[N - 1])

    def upto(self, N: int) -> list[tuple[Tag, Fraction]]:
        """All pairs emitted by blocks ``1..N``."""
        self.block(N)
        return [p for p, n in zip(self._pairs, self._provenance) if n <= N]

    def covers(self, N: int) -> bool:
        ivs = [Interval.around(c, r) for c, r in self.upto(N)]
        return verify_cover(ivs, Interval(-N, N))


def countable_subcover_reals(psi: Gauge, N_max: Optional[int] = None, depth_cap: Optional[int] = None,
                             strategy: Optional[TagStrategy] = None) -> CountableSubcover:
    return CountableSubcover(psi, N_max, depth_cap, strategy)


def rational_centers_cover(psi: Gauge) -> Iterator[tuple[Fraction, Fraction]]:
    """``(q_n, psi(q_n))`` over the enumeration of Q; continuous gauges only.

    For a continuous gauge every real has a rational close enough to be
    covered by that rational's ball.
    """
    if not psi.continuous:
        raise PreconditionError(f"{psi.name} is not flagged continuous")
    n = 0
    while True:
        q = enumerate_rational(n)
        yield q, psi(q)
        n += 1


# Baire space ---------------------------------------------------------------


@dataclass(frozen=True)
class BaireSeq:
    """A finite prefix of naturals followed by zeros."""

    prefix: tuple = ()

    def __post_init__(self):
        p = tuple(int(v) for v in self.prefix)
        if any(v < 0 for v in p):
            raise DomainError("Baire sequences hold natural numbers")
        object.__setattr__(self, "prefix", p)

    def __getitem__(self, i: int) -> int:
        return self.prefix[i] if i < len(self.prefix) else 0

    def take(self, n: int) -> tuple:
        if n <= len(self.prefix):
            return self.prefix[:n]
        return self.prefix + (0,) * (n - len(self.prefix))

    @property
    def support(self) -> int:
        """Length of the prefix up to its last non-zero entry."""
        k = len(self.prefix)
        while k and self.prefix[k - 1] == 0:
            k -= 1
        return k

    def __str__(self) -> str:
        return "<" + ",".join(map(str, self.prefix)) + ">*0^w"


@dataclass(frozen=True)
class BaireGauge:
    """``Psi`` on Baire space; ``continuity_bound`` asserts ``Psi(g)`` depends
    only on the first that many entries of ``g``."""

    evaluator: Callable[[BaireSeq], int]
    continuity_bound: Optional[int] = None
    name: str = "Psi"

    def __call__(self, g: BaireSeq) -> int:
        v = self.evaluator(g)
        if not isinstance(v, int) or v < 0:
            raise DomainError(f"{self.name} returned {v!r}, expected a natural number")
        return v


@dataclass(frozen=True)
class BaireEnumeration(Sequence):
    """All ``w*0^w`` with entries below ``entry_bound`` and ``|w| <= length_bound``."""

    items: tuple
    values: tuple
    entry_bound: int
    length_bound: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


def baire_enumeration(Psi: BaireGauge, entry_bound: int, length_bound: int) -> BaireEnumeration:
    """Enumerate by length, then lexicographically; ``values[i] = Psi(items[i])``."""
    if entry_bound < 0 or length_bound < 0:
        raise PreconditionError("bounds must be non-negative")
    if Psi.continuity_bound is not None and Psi.continuity_bound > length_bound:
        raise PreconditionError(f"continuity bound {Psi.continuity_bound} exceeds length bound {length_bound}")
    items = []
    for L in range(length_bound + 1):
        for w in itertools.product(range(entry_bound), repeat=L):
            items.append(BaireSeq(w))
    return BaireEnumeration(tuple(items), tuple(Psi(f) for f in items), entry_bound, length_bound)


def find_cover_index(g: BaireSeq, Psi: BaireGauge, enumeration: BaireEnumeration) -> int:
    """Least ``n`` such that ``g`` and ``f_n`` agree on their first ``Psi(f_n)`` entries."""
    if any(v >= enumeration.entry_bound for v in g.prefix):
        raise BoundsError(f"{g} has an entry >= {enumeration.entry_bound}")
    if g.support > enumeration.length_bound:
        raise BoundsError(f"{g} has support longer than {enumeration.length_bound}")
    values = enumeration.values if len(enumeration.values) == len(enumeration) else None
    for n, f in enumerate(enumeration.items):
        k = values[n] if values is not None else Psi(f)
        if g.take(k) == f.take(k):
            return n
    raise BoundsError("bounds insufficient: no enumerated sequence covers g")


# bounded trees ---------------------------------------------------------------


@dataclass(frozen=True)
class FiniteTree:
    """A tree of sequences with entries ``< branching_bound`` and length
    ``<= depth_bound``, given by a membership predicate."""

    branching_bound: int
    depth_bound: int
    membership: Callable[[tuple], bool]
    nodes: Optional[frozenset] = None

    @classmethod
    def from_nodes(cls, branching_bound: int, depth_bound: int, nodes: Iterable[Sequence[int]]) -> "FiniteTree":
        ns = frozenset(tuple(int(v) for v in s) for s in nodes)
        for s in ns:
            if len(s) > depth_bound or any(v < 0 or v >= branching_bound for v in s):
                raise BoundsError(f"node {s} exceeds the bounds ({branching_bound}, {depth_bound})")
        return cls(branching_bound, depth_bound, ns.__contains__, ns)

    def __contains__(self, s) -> bool:
        return bool(self.membership(tuple(s)))

    def all_sequences(self) -> Iterator[tuple]:
        for L in range(self.depth_bound + 1):
            yield from itertools.product(range(self.branching_bound), repeat=L)

    def is_prefix_closed(self) -> bool:
        return all(s[:-1] in self for s in self.all_sequences() if s and s in self)


def search_functional(tree: FiniteTree) -> BaireGauge:
    """``F(g) = n + 1`` for the least ``n <= depth_bound`` with ``g|n`` outside
    the tree, and 0 if every such prefix is in the tree."""
    D = tree.depth_bound

    def ev(g: BaireSeq) -> int:
        for n in range(D + 1):
            if g.take(n) not in tree:
                return n + 1
        return 0

    return BaireGauge(ev, D + 1, "F_tree")


def has_maximal_path(tree: FiniteTree) -> bool:
    """Depth-first search for a member of length ``depth_bound``."""
    stack = [()] if () in tree else []
    while stack:
        s = stack.pop()
        if len(s) == tree.depth_bound:
            return True
        stack.extend(s + (v,) for v in range(tree.branching_bound) if s + (v,) in tree)
    return False


def wellfounded_via_xi(tree: FiniteTree, cross_check: bool = True) -> bool:
    """True iff no branch of the tree reaches ``depth_bound``, decided through
    the enumeration: some enumerated ``f_w`` makes the search functional 0
    exactly when such a branch exists."""
    if tree.depth_bound < 1 or tree.branching_bound < 0:
        raise BoundsError("need depth_bound >= 1 and branching_bound >= 0")
    if tree.nodes is not None:
        for s in tree.nodes:
            if len(s) > tree.depth_bound or any(v >= tree.branching_bound for v in s):
                raise BoundsError(f"node {s} exceeds the tree bounds")
    F = search_functional(tree)
    enum = baire_enumeration(F, tree.branching_bound, tree.depth_bound + 1)
    wf = not any(v == 0 for v in enum.values)
    if cross_check and wf == has_maximal_path(tree):
        raise AssertionError("enumeration and direct search disagree")
    return wf
