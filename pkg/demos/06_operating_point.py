"""Intensity window for the catalysis and lattice beams at the default operating point.

The lower bound keeps catalysis-induced spin flips below the lattice ones; the upper
bound keeps the gate slower than the trap. Both margins should exceed 10.
"""

import numpy as np

from rbcphase.dressed import DressedSolver, PacketGeometry, logical_pairs_list
from rbcphase.gate import ConstraintParams, constraint_check, cphase_metrics

p = ConstraintParams()
solver = DressedSolver()  # the differential shift needs the full radial grid
E = solver.elements_multi(logical_pairs_list(), [1e4], PacketGeometry(0.05, 0.15), rabi=p.rabi_squared**0.5)[0]

model_xi = cphase_metrics(np.diag(E), rabi=p.rabi_squared**0.5).xi
for label, xi in (("model", model_xi), ("reference 3.5e-7", 3.5e-7)):
    r = constraint_check(p, xi)
    print(f"{label:>17}: xi={xi:.2e} margins {r.left_margin:.1f} / {r.right_margin:.2f} "
          f"-> {'ok' if r.satisfied else 'violated'}; gate speed {r.gate_speed_hz / 1e3:.1f} kHz")
print(f"trap frequency {constraint_check(p, model_xi).trap_frequency_hz / 1e6:.3f} MHz")
