"""Molecular hyperfine potentials of two 87Rb atoms sharing one D1 excitation.

At large separation the 128 levels sit on four hyperfine asymptotes. Closer in, the
resonant dipole coupling takes over and the levels regroup by their 1/r^3 coefficient.
"""

import numpy as np

from rbcphase.molecular import spectrum

def natural_clusters(e, kmax=12):
    """Split the sorted spectrum at its largest gaps, choosing the count with the cleanest separation."""
    e = np.sort(e)
    gaps = np.diff(e)
    best = None
    for k in range(2, kmax + 1):
        cut = np.sort(np.argsort(gaps)[-(k - 1):])
        parts = np.split(e, cut + 1)
        ratio = gaps[cut].min() / max(np.ptp(p) for p in parts)
        if best is None or ratio > best[0]:
            best = (ratio, parts)
    return best


for kr in (50.0, 1.0, 0.1, 0.03):
    ratio, groups = natural_clusters(spectrum(kr).eigenvalues)
    if ratio < 2:
        print(f"kr = {kr:5.2f}: hyperfine and dipole energies comparable, no clean clustering")
        continue
    summary = ", ".join(f"{len(g)} near {g.mean():.1f}" for g in groups)
    print(f"kr = {kr:5.2f}: {len(groups)} clusters (gap ratio {ratio:.1f}): {summary}")

# C3 coefficients: energy * r^3 at short range, hyperfine negligible
c3 = np.unique(np.round(np.sort(spectrum(0.005).eigenvalues) * 0.005**3, 3))
print("distinct C3 (hbar Gamma / k^3):", c3)
