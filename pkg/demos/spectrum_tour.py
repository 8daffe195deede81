"""Three spectra of the stepped potential and the orderings between them.

Run: python3 demos/spectrum_tour.py
"""

import numpy as np

from periodic_revival import Grid, section5_potential
from periodic_revival.spectrum import (all_spectra, count_roots, discriminant, eigenfunctions,
                                       verify_interlacing)

V = section5_potential()
sp = all_spectra(V, 12)

print("n   periodic      semi-periodic  Dirichlet")
for n in range(12):
    print(f"{n:<3d} {sp['periodic'].values[n]:12.6f}  {sp['semiperiodic'].values[n]:12.6f}  "
          f"{sp['dirichlet'].values[n]:12.6f}")

# periodic eigenvalues sit where the discriminant touches +2
lam = sp["periodic"].values[:5]
print("\nDelta(lambda_n) - 2:", np.array([discriminant(V, x) - 2 for x in lam]))

rep = verify_interlacing(sp["periodic"], sp["semiperiodic"], sp["dirichlet"])
print(f"interlacing: {len(rep.checks)} inequalities, {len(rep.failures())} violated")

eigs = eigenfunctions(V, sp["periodic"], Grid(2000), count=7)
print("roots of psi_0..psi_6:", [count_roots(e) for e in eigs])
