"""
Pinching boundary points together
=================================

Bring two adjacent points together, x_{i+1} = x_i + delta.  Near the
collision a solution behaves like a combination of two powers of delta:
1 - 6/kappa (the two curves from these points join each other, "identity
channel") and 2/kappa (they continue elsewhere, "two-leg channel").
Multiplying by delta^(6/kappa - 1) and letting delta -> 0 keeps only the
identity part.

These limits, taken in every allowed order, give one number per arc diagram:
the dual vector.  Here we look at the two-pair solutions, where everything is
known in closed form.
"""

from fractions import Fraction

import numpy as np

from nullstate import diagrams as dg
from nullstate.limits import (apply_sequence_detailed, classify_interval, collapse_interval,
                              dual_vector)
from nullstate.solutions import connection_constant, s2_solution

kappa = 6
g1, g2 = s2_solution(kappa, 1, 0), s2_solution(kappa, 0, 1)

# The extrapolation ladder for one collapse: the scaled values settle quickly
r = collapse_interval(g2, 1, (0, 1, 2, 4))
print("ladder of scaled values for G2, interval (x1, x2):")
for d, v in zip(r.deltas_used[:6], r.samples[:6]):
    print(f"   delta = {d:.5f}   {v:.12f}")
print(f"limit {r.value:.14f} +- {r.stderr:.1e}, leading power {r.exponent_fit:.6f}")
print(f"closed form of the limit: {connection_constant(kappa):.14f}\n")

for name, h in (("G1", g1), ("G2", g2)):
    c = classify_interval(h, 1, [(0, 1, 2, 4), (0.5, 1, 3, 5)])
    print(f"{name}: interval (x1, x2) is {c.label}, fitted power {c.exponent_fit:.4f}")

# Dual vectors: one representative limit sequence per diagram.  G1 dies in
# the (12)(34) channel and G2 in the (14)(23) channel, so the matrix is
# anti-diagonal and invertible.
anchor = (0.0, 1.0, 2.5, 4.0)
M = np.array([dual_vector(h, anchor).values for h in (g1, g2)])
print("\ndual vectors (rows G1, G2; columns (12)(34), (14)(23)):\n", M)
print("determinant:", np.linalg.det(M))

# Different valid orders of the same diagram give the same number
h = s2_solution(Fraction(8, 3), 0.4, 1.0)
for d in dg.enumerate_diagrams(2):
    for s in dg.allowable_sequences(d):
        res = apply_sequence_detailed(h, s, anchor)
        print(f"{str(d.pairs):18s} {str(s.arcs()):18s} {str([k.split('_')[0] for k in s.kinds]):24s}"
              f" {res.value:.14f} +- {res.stderr:.0e}")
