"""State-dependent lattice: where the wells sit and how much the packets overlap.

Logical partners (1,-1) and (2,+1) share a well; the leakage targets sit elsewhere,
so their motional overlap falls off as the logical wells are pulled apart.
"""

import numpy as np
from scipy.optimize import brentq

from rbcphase.lattice import LeakageGeometry
from rbcphase.molecular import RB87

F2, ER, ETA = RB87.F_up, 1 / 1500, 0.05
print(" kdz   theta  |<2,2|2,1>|^2  |<1,0|2,1>|^2  gap (2,1;n=0) - (2,-2;n=1)")
for kdz in (0.05, 0.1, 0.117, 0.2, 0.3, 0.387, 0.5):
    g = LeakageGeometry(kdz, ETA, ER)
    w = g.overlap((F2, 2, 0), (F2, 1, 0)) ** 2
    z = g.overlap((RB87.F_down, 0, 0), (F2, 1, 0)) ** 2
    print(f"{kdz:5.3f} {g.lattice.theta:6.3f}  {w:12.4f}  {z:12.4f}  {g.gap((F2, 1, 0), (F2, -2, 1)):+.4f}")

k0 = brentq(lambda k: LeakageGeometry(k, ETA, ER).gap((F2, 1, 0), (F2, -2, 1)), 0.05, 0.3)
amp = LeakageGeometry(k0, ETA, ER).overlap((F2, 1, 0), (F2, -2, 1))
print(f"vibrational degeneracy at kdz={k0:.4f}: amplitude {abs(amp):.3f}, probability {amp**2:.3f}")
