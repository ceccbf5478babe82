"""
Crossing a rectangle: Monte Carlo against the continuum formula
===============================================================

Open each bond of a square grid with probability 1/2 and ask whether an open
path joins the left and right sides.  As the grid gets finer the answer
depends only on the aspect ratio R = width / height, and the continuum
limit is a hypergeometric function of the elliptic parameter of the
rectangle.

Run with ``python3 demos/01_crossing_probability.py [height] [trials]``.
The defaults take well under a minute; the acceptance run uses height 200
and 100000 trials per ratio.
"""

import sys
import time

import numpy as np

from nullstate.percolation import LatticeSpec, cardy_probability, compare, parameter_of_aspect_ratio

height = int(sys.argv[1]) if len(sys.argv) > 1 else 64
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 20_000

# The formula first.  R = 1 is exactly one half (the square is its own
# rotated copy) and P(R) + P(1/R) = 1 because a left-right crossing fails
# exactly when a top-bottom crossing of the dual lattice exists.
for R in (0.25, 0.5, 1, 2, 4):
    m = parameter_of_aspect_ratio(R)
    print(f"R = {R:5}   m = {m:.12f}   P(R) = {cardy_probability(R):.12f}   "
          f"P(R) + P(1/R) = {cardy_probability(R) + cardy_probability(1 / R):.15f}")

# Now the simulation.  Every trial owns a PCG64 stream keyed by (seed, trial),
# so the same command always gives the same counts.
print(f"\nsquare bond lattice, height {height}, {trials} trials per ratio")
t0 = time.perf_counter()
for R in (0.5, 1, 2, 3):
    rep = compare(LatticeSpec.square(height, R), trials, seed=42)
    print(f"R = {rep['aspect_ratio']:4.2f}   p_hat = {rep['p_hat']:.4f} +- {rep['stderr']:.4f}   "
          f"formula = {rep['cardy']:.4f}   z = {rep['z']:+.2f}   {'ok' if rep['passed'] else 'off'}")
print(f"({time.perf_counter() - t0:.1f} s)")

# The triangular site lattice has the same continuum limit; its rows are
# sqrt(3)/2 apart, so a 33 x 38 grid is close to a square.
spec = LatticeSpec("triangular_site", 33, 38)
rep = compare(spec, trials, seed=7)
print(f"\ntriangular sites, R = {spec.aspect_ratio:.4f}: p_hat = {rep['p_hat']:.4f} "
      f"+- {rep['stderr']:.4f}, formula {rep['cardy']:.4f}")

# Away from p = 1/2 the crossing probability is pushed to 0 or 1.
for p in (0.45, 0.5, 0.55):
    rep = compare(LatticeSpec("square_bond", 64, 64, p), 2000, seed=1)
    print(f"p = {p}: p_hat = {rep['p_hat']:.3f}")
print("bits used per trial at p = 1/2:", np.ceil(LatticeSpec.square(height, 1).n_variables / 64) * 64)
