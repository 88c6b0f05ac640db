"""Scattering-limited CPHASE fidelity versus separation and detuning.

Uses a reduced radial grid so the script finishes in about a minute; the CLI
``surface`` command runs the full-resolution version.
"""

import numpy as np

from rbcphase.gate import SurfaceRequest, fidelity_surface, peak

kdzs = tuple(np.round(np.linspace(0.1, 0.4, 13), 4))
for eta in (0.05, 0.01):
    pts = fidelity_surface(SurfaceRequest((300.0, 600.0, 1e3, 1e4), kdzs, eta, n_radial=1500))
    for delta in (300.0, 600.0, 1e3, 1e4):
        best = peak([p for p in pts if p.delta == delta])
        m = best.metrics
        print(f"eta={eta:.2f} Delta={delta:7.0f}: best F={m.fidelity_scatter:.3e} at kdz={best.kdz:.3f} "
              f"(kappa={m.kappa:.3g}, xi={m.xi:.2e})")

big = tuple(np.geomspace(1, 3, 5))
pts = fidelity_surface(SurfaceRequest((1e4,), big, 0.05, n_radial=1500))
kap = [p.metrics.kappa for p in pts]
print("kappa at kdz 1..3:", ", ".join(f"{k:.2e}" for k in kap),
      f"slope {np.polyfit(np.log(big), np.log(kap), 1)[0]:.2f}")
