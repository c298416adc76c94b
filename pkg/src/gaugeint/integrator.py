"""Riemann and gauge integration, Cauchy gaps, Hake limits and additivity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import UNIT, Gauge, Interval, Piece, RealFn, Run, TaggedPartition, mesh, riemann_sum, split_gauge, uniform_partition
from .cousin import DEFAULT_STRATEGY, TagStrategy, _KINDS, default_depth_cap, fine_partition
from .errors import DepthCapError, DomainError, PreconditionError, UnknownNameError
from .exact import Tag, to_tag

__all__ = [
    "IntegralResult",
    "DivergenceReport",
    "riemann_integrate",
    "gauge_integrate",
    "cauchy_gap",
    "cauchy_sums",
    "hake_limit",
    "additivity_check",
]


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_bound: float
    partitions_used: int
    finest_mesh: Tag
    converged: bool
    method: str = "gauge"
    levels: tuple = ()
    raw_value: Optional[float] = None
    message: str = ""

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be non-negative")


@dataclass(frozen=True)
class DivergenceReport:
    """Outcome of a Hake limit that did not converge.

    ``diverges`` is true when the partials run off monotonically; otherwise
    the verdict is ``inconclusive``.
    """

    diverges: bool
    partials: tuple
    probes: tuple
    verdict: str
    reason: str


def _fn(f) -> RealFn:
    return f.fn if hasattr(f, "fn") and isinstance(f.fn, RealFn) else f


def _modulus(phi, f):
    if phi is None:
        mod = getattr(f, "modulus", None)
        if mod is None:
            raise UnknownNameError(f"{getattr(f, 'name', f)} has no builtin gauge modulus")
        return mod
    return phi


def _depth_cap(f, eps, depth_cap):
    # builtins whose gauges shrink fast near a point carry a sizing rule
    hint = getattr(f, "depth_hint", None)
    if depth_cap is None and hint is not None:
        return max(default_depth_cap(), hint(Fraction(eps)))
    return depth_cap


def riemann_integrate(
    f,
    target: Interval = UNIT,
    tol: float = 1e-8,
    n_max: int = 24,
) -> IntegralResult:
    """Midpoint sums on uniform meshes ``|target|/2**n``.

    Stops once two consecutive doublings each change the sum by less than
    ``tol/2``; the reported bound is the last observed gap.
    """
    f = _fn(f)
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    sums: list[float] = []
    n = 0
    for n in range(n_max + 1):
        sums.append(riemann_sum(f, uniform_partition(target, 1 << n)))
        if n >= 2 and abs(sums[-1] - sums[-2]) < tol / 2 and abs(sums[-2] - sums[-3]) < tol / 2:
            return IntegralResult(
                sums[-1], abs(sums[-1] - sums[-2]), n + 1, target.length / (1 << n), True, "riemann"
            )
    gap = abs(sums[-1] - sums[-2]) if len(sums) > 1 else math.inf
    return IntegralResult(
        sums[-1], gap, n_max + 1, target.length / (1 << n_max), False, "riemann",
        message=f"no convergence within {n_max} doublings",
    )


def _eps_levels(eps_min, eps_max) -> list[Fraction]:
    eps_min = Fraction(eps_min)
    eps_max = Fraction(eps_max)
    if eps_min <= 0:
        raise PreconditionError("eps_min must be positive")
    n = 0
    while Fraction(1, 1 << n) > eps_max:
        n += 1
    levels = []
    while Fraction(1, 1 << n) >= eps_min:
        levels.append(Fraction(1, 1 << n))
        n += 1
    if not levels:
        levels.append(Fraction(1, 1 << n))
    return levels


def gauge_integrate(
    f,
    phi: Optional[Callable[[Fraction], Gauge]] = None,
    target: Interval = UNIT,
    eps_min=Fraction(1, 1024),
    strategy: Optional[TagStrategy] = None,
    depth_cap: Optional[int] = None,
    *,
    eps_max=Fraction(1, 2),
    extrapolate: bool = False,
    max_pieces: Optional[int] = None,
) -> IntegralResult:
    """Riemann sums over ``phi(2**-n)``-fine partitions for ``2**-n >= eps_min``.

    The value is ``S(f, Q_last)`` with the bound ``2*eps_last`` that any
    gauge modulus guarantees.  With ``extrapolate`` the dyadic sequence of
    sums is also passed through one Richardson step (the sums of the shipped
    integrands approach the integral linearly in eps); the bound is then
    the observed gap of the extrapolated sequence, which is an estimate, not
    a guarantee.

    A level whose partition fails (depth cap) or has more than
    ``max_pieces`` pieces ends the schedule; the result then reports the
    deepest completed level with ``converged=False``.
    """
    fn = _fn(f)
    phi = _modulus(phi, f)
    depth_cap = _depth_cap(f, eps_min, depth_cap)
    levels = []
    failure = ""
    last_P = None
    for eps in _eps_levels(eps_min, eps_max):
        try:
            P = fine_partition(phi(eps), target, strategy, depth_cap)
        except DepthCapError as exc:
            failure = f"eps={eps}: {exc}"
            break
        if max_pieces is not None and len(P) > max_pieces:
            failure = f"eps={eps}: partition has {len(P)} pieces, over the budget of {max_pieces}"
            break
        s = riemann_sum(fn, P)
        levels.append({"eps": eps, "value": s, "pieces": len(P)})
        last_P = P
    if not levels:
        raise DepthCapError(f"no level succeeded; {failure}")
    eps_last = levels[-1]["eps"]
    raw = levels[-1]["value"]
    value, bound, method = raw, float(2 * eps_last), "gauge"
    if extrapolate and len(levels) >= 2:
        ext = [2 * levels[i]["value"] - levels[i - 1]["value"] for i in range(1, len(levels))]
        value = ext[-1]
        bound = abs(ext[-1] - ext[-2]) if len(ext) >= 2 else abs(raw - levels[-2]["value"])
        method = "gauge+richardson"
    return IntegralResult(
        value=value,
        error_bound=bound,
        partitions_used=len(levels),
        finest_mesh=mesh(last_P),
        converged=not failure,
        method=method,
        levels=tuple(levels),
        raw_value=raw,
        message=failure,
    )


# Cauchy criterion --------------------------------------------------------


def _refine_once(P: TaggedPartition, gauge: Gauge, rng, strategy, depth_cap, run_ratio) -> TaggedPartition:
    """Halve a random selection of pieces once, keeping every piece fine.

    The half holding the old tag keeps it; the other half is partitioned
    afresh.  Certified runs are subdivided by a factor 2 or 3.
    """
    out = []
    for b in P.blocks:
        if rng.random() >= 0.5:
            out.append(b)
            continue
        if isinstance(b, Run):
            if b.radius_floor is not None:
                out.append(Run(b.lo, b.hi, b.count * int(rng.integers(2, 4)), b.radius_floor))
            else:
                out.append(b)
            continue
        lo, hi, t = b.interval.lo, b.interval.hi, b.tag
        mid = (lo + hi) / 2
        for a, c in ((lo, mid), (mid, hi)):
            if a <= t <= c:
                out.append(Piece(t, Interval(a, c)))
                continue
            for s in strategy.propose(a, c, 0)[:2]:
                if gauge.covers_reach(s, max(s - a, c - s)):
                    out.append(Piece(s, Interval(a, c)))
                    break
            else:
                out.extend(fine_partition(gauge, Interval(a, c), strategy, depth_cap, run_ratio=run_ratio).blocks)
    return TaggedPartition(out)


def cauchy_sums(
    f,
    phi: Optional[Callable[[Fraction], Gauge]],
    eps,
    trials: int = 20,
    seed: int = 0,
    target: Interval = UNIT,
    depth_cap: Optional[int] = None,
) -> list[float]:
    """Riemann sums over ``trials`` seeded ``phi(eps)``-fine partitions.

    Trial 0 is the default partition; the others use a random tag order and
    run ratio, then halve random pieces once.
    """
    if trials < 2:
        raise PreconditionError("trials must be >= 2")
    fn = _fn(f)
    gauge = _modulus(phi, f)(Fraction(eps))
    depth_cap = _depth_cap(f, eps, depth_cap)
    rng = np.random.default_rng(seed)
    sums = [riemann_sum(fn, fine_partition(gauge, target, DEFAULT_STRATEGY, depth_cap))]
    ratios = [Fraction(1, 2), Fraction(5, 8), Fraction(3, 4), Fraction(7, 8)]
    for _ in range(trials - 1):
        order = tuple(_KINDS[i] for i in rng.permutation(len(_KINDS)))
        strategy = TagStrategy(order, "shuffled")
        ratio = ratios[int(rng.integers(len(ratios)))]
        P = fine_partition(gauge, target, strategy, depth_cap, run_ratio=ratio)
        P = _refine_once(P, gauge, rng, strategy, depth_cap, ratio)
        sums.append(riemann_sum(fn, P))
    return sums


def cauchy_gap(f, phi, eps, trials: int = 20, seed: int = 0, target: Interval = UNIT, depth_cap: Optional[int] = None) -> float:
    """Largest pairwise difference of Riemann sums over seeded fine partitions."""
    sums = cauchy_sums(f, phi, eps, trials, seed, target, depth_cap)
    return max(sums) - min(sums)


# Hake limits -------------------------------------------------------------


def _runaway(partials: Sequence[float], k: int, threshold: float) -> tuple[bool, str]:
    if any(abs(r) > threshold for r in partials):
        return True, f"|partial| exceeded {threshold:g}"
    if len(partials) < k:
        return False, f"fewer than {k} partials"
    tail = partials[-k:]
    d = np.diff(tail)
    if not (np.all(d > 0) or np.all(d < 0)):
        return False, "partials not monotone"
    ratios = np.abs(d[1:]) / np.abs(d[:-1])
    if np.all(ratios >= 0.99):
        return True, f"last {k} partials monotone with non-shrinking increments"
    rho = float(ratios[-1])
    if rho < 1:
        projected = abs(tail[-1]) + abs(d[-1]) * rho / (1 - rho)
        if projected > threshold:
            return True, f"geometric projection {projected:g} exceeds {threshold:g}"
    return False, "increments shrinking"


def hake_limit(
    f,
    probes: Optional[Sequence] = None,
    tol: float = 1e-2,
    *,
    upper=1,
    threshold: float = 1e6,
    min_monotone: int = 5,
    riemann_tol: Optional[float] = None,
    n_max: int = 26,
) -> Union[IntegralResult, DivergenceReport]:
    """Limit of Riemann integrals over ``[x_n, upper]`` as ``x_n`` decreases.

    Default probes are ``4**-j`` for ``j = 1..8``.  Converges when two
    successive partials differ by less than ``tol``.  Otherwise the partials
    are declared divergent if some exceeds ``threshold`` or if the last
    ``min_monotone`` are monotone and either their increments do not shrink
    or a geometric extrapolation of the increments passes ``threshold``.
    """
    fn = _fn(f)
    probes = [Fraction(1, 4**j) for j in range(1, 9)] if probes is None else [to_tag(p) for p in probes]
    upper = to_tag(upper)
    rtol = tol / 10 if riemann_tol is None else riemann_tol
    partials: list[float] = []
    used = 0
    for j, x in enumerate(probes):
        r = riemann_integrate(fn, Interval(x, upper), rtol, n_max)
        used += r.partitions_used
        partials.append(r.value)
        if len(partials) >= 2 and r.converged and abs(partials[-1] - partials[-2]) < tol:
            gap = abs(partials[-1] - partials[-2])
            return IntegralResult(r.value, gap + r.error_bound, used, r.finest_mesh, True, "hake")
        if abs(r.value) > threshold:
            break
    div, why = _runaway(partials, min_monotone, threshold)
    return DivergenceReport(div, tuple(partials), tuple(probes[: len(partials)]), "diverges" if div else "inconclusive", why)


# additivity -------------------------------------------------------------


def additivity_check(
    f,
    phi1: Callable[[Fraction], Gauge],
    phi2: Callable[[Fraction], Gauge],
    x,
    eps,
    target: Interval = UNIT,
    strategy: Optional[TagStrategy] = None,
    depth_cap: Optional[int] = None,
) -> float:
    """``|whole - (left + right)|`` using the splitting gauge at ``x``."""
    fn = _fn(f)
    x = to_tag(x)
    eps = Fraction(eps)
    depth_cap = _depth_cap(f, eps, depth_cap)
    d1, d2 = phi1(eps), phi2(eps)
    d3 = split_gauge(d1, d2, x, target)
    whole = riemann_sum(fn, fine_partition(d3, target, strategy, depth_cap))
    left = riemann_sum(fn, fine_partition(d1, Interval(target.lo, x), strategy, depth_cap))
    right = riemann_sum(fn, fine_partition(d2, Interval(x, target.hi), strategy, depth_cap))
    return abs(whole - (left + right))
