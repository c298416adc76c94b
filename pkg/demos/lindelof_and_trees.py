"""Countable subcovers of the line and of Baire space, and a tree test.

Run with ``python3 demos/lindelof_and_trees.py``.
"""

from fractions import Fraction

from gaugeint import (
    BaireSeq,
    FiniteTree,
    FunctionGauge,
    Interval,
    baire_enumeration,
    countable_subcover_reals,
    find_cover_index,
    verify_cover,
    wellfounded_via_xi,
)
from gaugeint.lindelof import BaireGauge, has_maximal_path, search_functional

# On the whole line the balls 1/(1+x^2) get small far out.  Block N covers
# [-N, N] and may reuse balls emitted for earlier blocks.
psi = FunctionGauge(lambda t: 1 / (1 + t * t), "1/(1+x^2)")
cs = countable_subcover_reals(psi, N_max=4)
for N in range(1, 5):
    idx = cs.block(N)
    ivs = [Interval.around(*cs[i]) for i in idx]
    print(f"block {N}: {len(idx)} balls, largest index {max(idx)}, covers [-{N}, {N}]: {verify_cover(ivs, Interval(-N, N))}")
c, r = cs[len(cs.upto(4)) - 1]
print(f"last ball: center {c}, radius {r} ({float(r):.4f})")

# Baire space: sequences of naturals.  Psi(g) = 1 + g(0) says how long a
# prefix must match.  The enumeration lists finitely many eventually-zero
# sequences; every bounded g is matched by one of them.
Psi = BaireGauge(lambda g: 1 + g[0], None, "1+g(0)")
e = baire_enumeration(Psi, 3, 2)
print(f"\nenumeration of {len(e)} sequences:", ", ".join(str(s) for s in list(e)[:6]), "...")
for w in [(0,), (1, 1), (2, 1)]:
    n = find_cover_index(BaireSeq(w), Psi, e)
    print(f"  g = {w}: first cover is #{n} = {e[n]} (agree on {e.values[n]} entries)")

# A finite tree is well-founded when no branch reaches full depth.
full = FiniteTree.from_nodes(2, 2, [(), (0,), (1,), (0, 1)])
cut = FiniteTree.from_nodes(2, 2, [(), (0,), (1,)])
for name, t in (("with <0,1>", full), ("without", cut)):
    F = search_functional(t)
    print(f"\ntree {name}: wellfounded={wellfounded_via_xi(t)}, maximal path={has_maximal_path(t)}")
    print("  search functional on <0,1>*0^w:", F(BaireSeq((0, 1))))
