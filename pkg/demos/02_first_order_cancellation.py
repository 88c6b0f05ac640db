"""Why the conditional phase is small for pi-polarised catalysis light.

Each logical ground sublevel has the same summed pi line strength (1/3) on D1, so the
projection of V_dd onto the laser-prepared excited state is identical for all four
logical inputs. The differential shift E00 + E11 - 2 E01 then starts at second order
in V_hf / Delta.
"""

import numpy as np

from rbcphase.dressed import LogicalEncoding, drive_vector, rotate_to_body_frame
from rbcphase.molecular import tables

V = tables().vdd_unit
enc = LogicalEncoding()
for theta in (0.0, np.pi / 4, np.pi / 2):
    row = []
    for bits, pair in enc.logical_pairs.items():
        v = rotate_to_body_frame(drive_vector(pair), theta, 0.0)
        row.append(f"{bits}: {v @ V @ v / (v @ v):+.4f}")
    print(f"theta = {theta:.3f}  <V_dd> r^3 per input:", "  ".join(row))
