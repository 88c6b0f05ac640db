"""Two three-level atoms: dressed ground-state Hamiltonian and CPHASE figure of merit.

Each atom has ground levels |0>, |1> (split by omega01) and one excited level |e>.
Energies are in units of hbar*Gamma; ``gamma`` is kept explicit so the formulas
read as usual but defaults to 1.

Two routes are provided.  The closed-form route follows the first-order
expressions in V_c/omega01 term by term.  The exact route assembles the full
two-atom Hamiltonian in the 9-dimensional product basis and eliminates the
excited states with an energy-dependent resolvent, so each ground pair sees its
own detuning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOGICAL = ("00", "01", "10", "11")


class ResonanceError(ArithmeticError):
    """Raised when the excited block is singular (exact molecular resonance)."""


@dataclass(frozen=True)
class ThreeLevelParams:
    omega01: float
    delta: float
    gamma: float = 1.0
    gamma_c: float = 0.0
    rabi: float = 1.0
    c0: float = np.sqrt(2 / 3)
    c1: float = np.sqrt(1 / 3)
    vc: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if abs(self.gamma_c) > self.gamma:
            raise ValueError("|gamma_c| must not exceed gamma")
        if self.c0**2 + self.c1**2 > 1 + 1e-12:
            raise ValueError("c0^2 + c1^2 must not exceed 1")

    def c(self, g: int) -> float:
        return (self.c0, self.c1)[g]

    def linewidth(self, g: int, sign: int) -> float:
        """Gamma_{g+-} = Gamma +- c_g^2 Gamma_c."""
        return self.gamma + sign * self.c(g) ** 2 * self.gamma_c


@dataclass(frozen=True)
class DressedGroundHamiltonian:
    matrix: np.ndarray  # basis |00>, |01>, |10>, |11>

    def element(self, i: str, j: str) -> complex:
        return complex(self.matrix[LOGICAL.index(i), LOGICAL.index(j)])

    @property
    def diagonal(self) -> dict:
        return {b: complex(self.matrix[n, n]) for n, b in enumerate(LOGICAL)}


def lambda_shift(delta: float, linewidth: float, rabi: float) -> complex:
    """|Omega|^2 / (4 (delta + i linewidth/2))."""
    if not linewidth > 0:
        raise ValueError("linewidth must be positive")
    return abs(rabi) ** 2 / (4 * (delta + 0.5j * linewidth))


def molecular_detunings(p: ThreeLevelParams, g: int) -> tuple[float, float, float, float]:
    s = p.c(g) ** 2 * p.vc
    return (s + p.delta, -s + p.delta, s + p.delta + p.omega01, -s + p.delta + p.omega01)


def dressed_hamiltonian_perturbative(p: ThreeLevelParams) -> DressedGroundHamiltonian:
    """Closed-form dressed Hamiltonian, first order in V_c/omega01."""
    d0 = molecular_detunings(p, 0)
    d1 = molecular_detunings(p, 1)
    L = lambda_shift
    c0s, c1s, W = p.c0**2, p.c1**2, p.rabi
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = 2 * c0s * L(d0[1], p.linewidth(0, +1), W)
    diag = (
        c0s * L(d1[0], p.linewidth(1, -1), W) / 2
        + c0s * L(d1[1], p.linewidth(1, +1), W) / 2
        + c1s * L(d0[2], p.linewidth(0, -1), W) / 2
        + c1s * L(d0[3], p.linewidth(0, +1), W) / 2
    )
    exch = (
        c0s * L(d1[1], p.linewidth(1, +1), W) / 2
        - c0s * L(d1[0], p.linewidth(1, -1), W) / 2
        + c1s * L(d0[3], p.linewidth(0, +1), W) / 2
        - c1s * L(d0[2], p.linewidth(0, -1), W) / 2
    )
    h[1, 1] = h[2, 2] = diag
    h[1, 2] = h[2, 1] = exch
    h[3, 3] = 2 * c1s * L(d1[3], p.linewidth(1, +1), W)
    return DressedGroundHamiltonian(h)


# single-atom levels: 0, 1, e ; product index 3*a + b
_G, _E = (0, 1), 2


def product_hamiltonian(p: ThreeLevelParams) -> np.ndarray:
    """Full 9x9 non-Hermitian two-atom Hamiltonian (rotating frame, zero at |00>)."""
    eps = np.array([0.0, p.omega01, -p.delta - 0.5j * p.gamma])
    h = np.zeros((9, 9), dtype=complex)
    for a in range(3):
        for b in range(3):
            h[3 * a + b, 3 * a + b] = eps[a] + eps[b]
    for g in _G:
        for a in range(3):  # laser on atom alpha, then beta
            h[3 * _E + a, 3 * g + a] += -p.rabi * p.c(g) / 2
            h[3 * a + _E, 3 * a + g] += -p.rabi * p.c(g) / 2
    coupling = p.vc - 0.5j * p.gamma_c
    for g in _G:
        for gp in _G:
            amp = coupling * p.c(g) * p.c(gp)
            # D_alpha,g^dag D_beta,g' : |g, e> -> |e, g'>
            h[3 * _E + gp, 3 * g + _E] += amp
            h[3 * g + _E, 3 * _E + gp] += amp
    # the laser term carries "+ h.c." while H_A, H_dd are already symmetric
    for g in _G:
        for a in range(3):
            h[3 * g + a, 3 * _E + a] = h[3 * _E + a, 3 * g + a]
            h[3 * a + g, 3 * a + _E] = h[3 * a + _E, 3 * a + g]
    return h


def dressed_hamiltonian_exact(p: ThreeLevelParams, include_ee: bool = False) -> DressedGroundHamiltonian:
    """Eliminate the excited states exactly.

    Element (i, j) is H_gg + H_ge (E_ij - H_ee)^-1 H_eg with E_ij = (E_i + E_j)/2,
    so each ground pair is evaluated at its own energy.
    """
    h = product_hamiltonian(p)
    ground = [3 * a + b for a in _G for b in _G]
    excited = [n for n in range(9) if n not in ground and (include_ee or n != 3 * _E + _E)]
    hgg = h[np.ix_(ground, ground)]
    hge = h[np.ix_(ground, excited)]
    heg = h[np.ix_(excited, ground)]
    hee = h[np.ix_(excited, excited)]
    e0 = np.real(np.diag(hgg))
    out = hgg - np.diag(e0)  # subtract first: the shifts are tiny next to omega01
    ident = np.eye(len(excited))
    floor = 1e-12 * max(1.0, abs(p.delta), abs(p.omega01), abs(p.vc))
    for i in range(4):
        for j in range(4):
            m = 0.5 * (e0[i] + e0[j]) * ident - hee
            if np.linalg.svd(m, compute_uv=False)[-1] < floor:
                raise ResonanceError("excited block singular: exact molecular resonance")
            out[i, j] += hge[i] @ np.linalg.solve(m, heg[:, j])
    return DressedGroundHamiltonian(out)


def phase_rate(h: DressedGroundHamiltonian) -> float:
    """|Re(E00 + E11 - 2 E01)|."""
    d = h.diagonal
    return abs((d["00"] + d["11"] - 2 * d["01"]).real)


def kappa(h: DressedGroundHamiltonian) -> float:
    """Ratio of differential shift to the largest decay (rates in hbar*Gamma)."""
    worst = max(abs(v.imag) for v in h.diagonal.values())
    if worst == 0:
        return np.inf
    return phase_rate(h) / (2 * np.pi * worst)


def fidelity(h: DressedGroundHamiltonian) -> float:
    k = kappa(h)
    return 0.0 if k == 0 else float(np.exp(-1 / k))


def kappa_asymptotic(p: ThreeLevelParams) -> float:
    """Large-detuning figure of merit, first order in omega01/Delta."""
    c0s, c1s = p.c0**2, p.c1**2
    x = 2 * p.omega01 / p.delta
    terms = []
    if c0s > 0:
        terms.append((c0s + c1s * (x - 1)) / (c0s * (c0s + 1)))
    if c1s > 0:
        terms.append((c0s * (x + 1) - c1s) / (c1s * (c1s + 1)))
    if not terms:
        return 0.0
    return abs(p.vc * (c0s - c1s) / np.pi * min(terms))


# elements defined by the closed form; the exact route also yields Raman terms
# (|00> <-> |01>, ...) that are off-resonant by omega01 and are reported separately
_CLOSED_FORM = [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1)]


def compare_routes(p: ThreeLevelParams) -> dict:
    """Element-wise comparison between the closed-form and exact dressed Hamiltonians."""
    a = dressed_hamiltonian_perturbative(p).matrix
    b = dressed_hamiltonian_exact(p).matrix
    rel = []
    for i, j in _CLOSED_FORM:
        if abs(b[i, j]) > 1e-14 * np.abs(b).max():
            rel.append(abs(a[i, j] - b[i, j]) / abs(b[i, j]))
    raman = np.abs(b.copy())
    for i, j in _CLOSED_FORM:
        raman[i, j] = 0.0
    return {
        "max_relative_deviation": float(max(rel)),
        "max_raman_element": float(raman.max()),
        "kappa_closed_form": kappa(DressedGroundHamiltonian(a)),
        "kappa_exact": kappa(DressedGroundHamiltonian(b)),
        "kappa_asymptotic": float(kappa_asymptotic(p)),
    }
