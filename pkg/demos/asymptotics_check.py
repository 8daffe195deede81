"""How fast do periodic eigenvalues approach m + A1/m?

The stepped potential has jumps, so the even and odd pairs behave differently:
odd m gaps are driven by the Fourier coefficient V_hat(2m) ~ 1/m.

Run: python3 demos/asymptotics_check.py
"""

import numpy as np

from periodic_revival import section5_potential
from periodic_revival.asymptotics import asymptotic_residuals, mean_and_A1
from periodic_revival.spectrum import eigenvalues

W = section5_potential().mean_removed()
_, A1 = mean_and_A1(W)
rep = asymptotic_residuals(eigenvalues(W, "periodic", 201), A1)

print(f"A1 after mean removal: {A1:.3e}")
print(" m   m^3 * resid_lo   m^3 * resid_hi")
for m in (10, 11, 20, 21, 50, 51, 99, 100):
    i = m - 1
    print(f"{m:3d}  {rep.scaled_lo[i]:14.4f}  {rep.scaled_hi[i]:14.4f}")

print(f"log-log slope over m in [10, 100]: {rep.loglog_slope(10, 100):.3f}")
even = rep.m % 2 == 0
sel = even & (rep.m >= 10)
w = np.maximum(np.abs(rep.resid_lo[sel]), np.abs(rep.resid_hi[sel]))
print(f"even m only: {np.polyfit(np.log(rep.m[sel]), np.log(w), 1)[0]:.3f}")
