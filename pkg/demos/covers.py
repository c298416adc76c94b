"""Finite subcovers, fine partitions and the Cantor-space view of them.

Run with ``python3 demos/covers.py``.
"""

from fractions import Fraction

from gaugeint import (
    UNIT,
    ConstantGauge,
    FunctionGauge,
    Interval,
    SQRT2,
    cover_to_partition,
    cover_transfer,
    cover_transfer_inv,
    fine_partition,
    finite_subcover,
    is_fine,
    theta,
    verify_cover,
    verify_scf,
    xi_map,
)
from gaugeint.cousin import first_uncovered
from gaugeint.fan import first_bit_functional

# Exact endpoints matter: these two open intervals meet at sqrt2/2 and
# leave exactly that point out.
a = Interval.open(Fraction(-1), SQRT2 / 2)
b = Interval.open(SQRT2 / 2, Fraction(2))
print("touching at sqrt2/2 covers:", verify_cover([a, b], UNIT), " hole at", first_uncovered([a, b], UNIT))
b = Interval.open(SQRT2 / 2 - Fraction(1, 10**9), Fraction(2))
print("overlapping by 1e-9 covers:", verify_cover([a, b], UNIT))

# A gauge that shrinks towards 1: balls of radius (1 - x)/2 + 1/50.
psi = FunctionGauge(lambda t: (1 - t) / 2 + Fraction(1, 50), "(1-x)/2 + 1/50")
sc = finite_subcover(psi, UNIT)
print(f"\nsubcover of {psi.name}: {len(sc)} balls, verified={sc.verified}")
for c, r in list(zip(sc.centers, sc.radii))[:4]:
    print(f"  center {c}  radius {r}")

# every finite subcover gives a fine tagged partition
P = cover_to_partition(sc)
print(f"as a partition: {len(P)} pieces, fine={is_fine(psi, P)}")
Q = fine_partition(psi, UNIT)
print(f"direct partitioner: {len(Q)} pieces, fine={is_fine(psi, Q)}")

# Cantor space.  theta lists finitely many sequences whose prefixes,
# each of length G(g), cover every binary sequence.
G = first_bit_functional()
out = theta(G)
print("\ntheta(first bit):", [str(g) for g in out], " verified:", verify_scf(out, G, 10))

# gauges on [0, 1] and functionals on Cantor space carry covers back and forth
G = cover_transfer_inv(ConstantGauge(Fraction(1, 10)))
out = theta(G)
print(f"\nradius 1/10 as a functional: {len(out)} cylinders")
for g in out[:5]:
    n = G(g)
    lo = xi_map(g, n)
    word = "".join(map(str, g.take(n)))
    print(f"  {word:<5} ->  [{lo}, {lo + Fraction(1, 2**n)}]")
sc = finite_subcover(cover_transfer(first_bit_functional()), UNIT)
print(f"first bit as a gauge: subcover of {len(sc)} balls, verified={sc.verified}")
