"""Evolve the sawtooth under the stepped potential and split off the revival part.

At t = 2*pi*q/r the free flow rebuilds the datum from r weighted translates.
With a potential present, what is left over after removing that piece should
be continuous.  Here the jump of the remainder w is compared to the jump of
the full solution u at every candidate point.

Run: python3 demos/revival_walkthrough.py [N]
"""

import sys

from periodic_revival import Grid, RationalTime, section5_potential, section5_sawtooth
from periodic_revival.evolution import build_setup, reconstruction_error, solution
from periodic_revival.revival import decompose_and_diagnose, gauss_weights, revival_component

N = int(sys.argv[1]) if len(sys.argv) > 1 else 200
V, f = section5_potential(), section5_sawtooth()
grid = Grid(4000)

setup = build_setup(V, f, N, grid)
print(f"N = {N}: ||f - P_N f|| = {reconstruction_error(setup, f):.4f}, "
      f"norm drift over t in [0, 3] = {abs(setup.l2_norm(3.0) - setup.l2_norm(0.0)):.1e}")

for r in (60, 30, 20, 10):
    t = RationalTime(1, r)
    G = gauss_weights(t)
    u = solution(setup, t.value)
    psi = revival_component(f, t, V.mean(), grid)
    dec = decompose_and_diagnose(u, psi, [x for x, _ in f.jumps()], t, [x for x, _ in V.jumps()])
    print(f"t = {t.pi_multiple} pi: {sum(abs(G) > 1e-12)} live translates, "
          f"max|jump u| = {dec.max_jump_u:.3f}, max|jump w| = {dec.max_jump_w:.4f}, "
          f"ratio = {dec.ratio:.3f}")

# At N = 200 the ratios sit above 0.05: the fit window overlaps the first
# Gibbs lobe of the truncated series.  Try N = 1000 to see them drop.
