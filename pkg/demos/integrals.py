"""Integrating things a Riemann sum cannot.

Run with ``python3 demos/integrals.py``.
"""

import math
from fractions import Fraction

from gaugeint import (
    additivity_check,
    builtin,
    cauchy_gap,
    gauge_integrate,
    hake_limit,
    kappa_modulus,
    riemann_integrate,
    poly,
    SQRT2,
)

# x^-1/2 blows up at 0, so there is no Riemann integral on [0, 1].
# The gauge shrinks near 0 and the sums still settle.
f = builtin("sqrt_recip")
r = gauge_integrate(f, eps_min=Fraction(1, 128))
print(f"x^-1/2        raw {r.value:.6f}  (bound {r.error_bound:.2e}, {r.levels[-1]['pieces']} pieces)")
r = gauge_integrate(f, eps_min=Fraction(1, 128), extrapolate=True)
print(f"              extrapolated {r.value:.6f}")

# Dirichlet's function: 1 on rationals, 0 elsewhere.  Rational tags get
# tiny intervals, so their total weight is below eps.
r = gauge_integrate(builtin("dirichlet"), eps_min=Fraction(1, 2**12))
print(f"dirichlet     {r.value}  (bound {r.error_bound:.2e})")

# kappa is integrable but |kappa| is not: the positive and negative blocks
# only cancel in order.
r = gauge_integrate(builtin("kappa"), eps_min=Fraction(1, 64))
print(f"kappa         {r.value:.6f}   ln 2 = {math.log(2):.6f}")

# two random fine partitions at the same eps give close sums
for name in ("sqrt_recip", "kappa"):
    gap = cauchy_gap(builtin(name), None, Fraction(1, 64), trials=10)
    print(f"cauchy gap    {name:<10} {gap:.3e} < {1 / 64:.3e}")

# splitting [0, 1] at an irrational point and adding the halves
d = additivity_check(builtin("kappa"), kappa_modulus, kappa_modulus, SQRT2 / 2, Fraction(1, 64))
print(f"additivity    kappa at sqrt2/2, defect {d:.3e}")

# on polynomials it agrees with plain Riemann sums
p = poly([1, -2, 3])
g, R = gauge_integrate(p, eps_min=Fraction(1, 2**10)), riemann_integrate(p)
print(f"1 - 2x + 3x^2 gauge {g.value:.8f}  riemann {R.value:.8f}")

# improper limits: integrate on [c, 1] and let c go to 0
h = hake_limit(builtin("sqrt_recip"))
print(f"hake          x^-1/2 -> {h.value:.5f}")
d = hake_limit(builtin("recip"))
print(f"hake          1/x partials {', '.join(f'{v:.2f}' for v in d.partials)}  diverges={d.diverges}")
