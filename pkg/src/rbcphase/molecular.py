"""Excited S1/2 + P1/2 molecular hyperfine potentials.

Energies are in units of hbar*Gamma, separations in units of 1/k (k the D1
wavenumber).  The near-field resonant dipole coupling is

    V_dd = s / (kr)^3 * (D_a . D_b - 3 D_az D_bz)

with ``s = AtomSpec.dipole_scale`` (3/4 for d^2 = 3 hbar Gamma / 4k^3) and D the
dimensionless dipole operator normalised so each excited sublevel has unit total
decay strength.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .angular import clebsch_gordan, projections, wigner_6j

HALF = Fraction(1, 2)


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class AtomSpec:
    """Atomic constants for the D1 manifold (defaults: 87Rb)."""

    nuclear_spin: Fraction = Fraction(3, 2)
    vhf_ground: float = 1263.4  # hbar Gamma
    vhf_excited: float = 151.2  # hbar Gamma
    gamma_hz: float = 5.41e6  # Gamma / 2pi
    wavelength_m: float = 794.98e-9
    dipole_scale: float = 0.75  # d^2 k^3 / (hbar Gamma)

    def __post_init__(self):
        object.__setattr__(self, "nuclear_spin", Fraction(self.nuclear_spin))
        if self.nuclear_spin < Fraction(3, 2):
            raise ValueError("logical encoding needs I >= 3/2")
        if self.vhf_ground <= 0 or self.vhf_excited <= 0:
            raise ValueError("hyperfine splittings must be positive")

    @property
    def F_down(self) -> Fraction:
        return self.nuclear_spin - HALF

    @property
    def F_up(self) -> Fraction:
        return self.nuclear_spin + HALF

    @property
    def wavenumber(self) -> float:
        return 2 * np.pi / self.wavelength_m

    def ground_energy(self, F) -> float:
        return self.vhf_ground if F == self.F_up else 0.0

    def excited_energy(self, Fp) -> float:
        return self.vhf_excited if Fp == self.F_up else 0.0

    @cached_property
    def sublevels(self) -> list[tuple[Fraction, Fraction]]:
        """(F, m) for one hyperfine manifold, ordered by F then m."""
        return [(F, m) for F in (self.F_down, self.F_up) for m in projections(F)]

    @cached_property
    def sublevel_index(self) -> dict:
        return {s: n for n, s in enumerate(self.sublevels)}

    @cached_property
    def dipole(self) -> np.ndarray:
        """Raising matrices ``D[q+1][e, g] = <P1/2 F' m'| D_q |S1/2 F m>``."""
        n = len(self.sublevels)
        D = np.zeros((3, n, n))
        for q in (-1, 0, 1):
            for e, (Fp, mp) in enumerate(self.sublevels):
                for g, (F, m) in enumerate(self.sublevels):
                    D[q + 1, e, g] = dipole_element(F, m, Fp, mp, q, self.nuclear_spin)
        return D


RB87 = AtomSpec()


def reduced_dipole(F, Fp, I) -> float:
    """<F'||D||F>/sqrt(2F'+1) for J = J' = 1/2, unit-strength normalisation."""
    phase = (-1) ** int(HALF + I + F + 1)
    return phase * np.sqrt(float(2 * (2 * F + 1))) * wigner_6j(HALF, Fp, I, F, HALF, 1)


def dipole_element(F, m, Fp, mp, q, I) -> float:
    """<F' m'| D_q |F m> between ground S1/2 and excited P1/2 hyperfine sublevels."""
    cg = clebsch_gordan(F, m, 1, q, Fp, mp)
    if cg == 0.0:
        return 0.0
    return cg * reduced_dipole(F, Fp, I)


@dataclass(frozen=True, order=True)
class SymmetrizedPairState:
    """(|S(F mF)>_a |P(F' mF')>_b + pi |P>_a |S>_b) / sqrt 2, quantised along the molecular axis."""

    F: Fraction
    mF: Fraction
    Fp: Fraction
    mFp: Fraction
    pi: int

    @property
    def M(self) -> Fraction:
        return self.mF + self.mFp

    @property
    def block(self) -> tuple[int, int]:
        return (int(self.M), self.pi)


def build_basis(spec: AtomSpec = RB87) -> list[SymmetrizedPairState]:
    states = [
        SymmetrizedPairState(F, m, Fp, mp, pi)
        for (F, m) in spec.sublevels
        for (Fp, mp) in spec.sublevels
        for pi in (1, -1)
    ]
    states.sort(key=lambda s: (s.M, -s.pi, s.F, s.Fp, s.mF))
    return states


def asymptote_label(s: SymmetrizedPairState) -> tuple:
    return (s.F, s.Fp)


def _exchange_element(i, j, weights, I) -> float:
    # pi * sum_q w_q <F'_j m'_j|D_q|F_i m_i> <F'_i m'_i|D_q|F_j m_j>
    if i.pi != j.pi or i.M != j.M:
        return 0.0
    total = 0.0
    for q, w in zip((-1, 0, 1), weights):
        total += w * (
            dipole_element(i.F, i.mF, j.Fp, j.mFp, q, I)
            * dipole_element(j.F, j.mF, i.Fp, i.mFp, q, I)
        )
    return i.pi * total


def angular_coefficient(i: SymmetrizedPairState, j: SymmetrizedPairState, I=Fraction(3, 2)) -> float:
    """The A coefficient of the tensor coupling, written with CG and 6j symbols."""
    pref = (
        (-1) ** int(i.F + j.F)
        * np.sqrt(float((2 * i.F + 1) * (2 * j.F + 1)))
        * wigner_6j(i.Fp, I, HALF, HALF, 1, j.F)
        * wigner_6j(j.Fp, I, HALF, HALF, 1, i.F)
    )
    if pref == 0.0:
        return 0.0
    s = sum(
        clebsch_gordan(j.F, j.mF, 1, q, i.Fp, i.mFp) * clebsch_gordan(i.F, i.mF, 1, q, j.Fp, j.mFp)
        for q in (-1, 0, 1)
    )
    s -= 3 * clebsch_gordan(j.F, j.mF, 1, 0, i.Fp, i.mFp) * clebsch_gordan(i.F, i.mF, 1, 0, j.Fp, j.mFp)
    return float(pref * s)


def vdd_element(i: SymmetrizedPairState, j: SymmetrizedPairState, r: float, spec: AtomSpec = RB87) -> float:
    """<j|V_dd|i> = pi (2 d^2/r^3) A at separation ``r`` (units 1/k)."""
    if r <= 0:
        raise ValueError("separation must be positive")
    if i.pi != j.pi or i.M != j.M:
        return 0.0
    return i.pi * 2 * spec.dipole_scale / r**3 * angular_coefficient(i, j, spec.nuclear_spin)


def gamma_dd_element(i: SymmetrizedPairState, j: SymmetrizedPairState, spec: AtomSpec = RB87) -> float:
    """Near-field cooperative decay <j|Gamma_dd|i> in units of Gamma."""
    return 0.5 * _exchange_element(i, j, (1.0, 1.0, 1.0), spec.nuclear_spin)


@dataclass
class MolecularTables:
    """Precomputed r-independent matrices in the symmetrized basis."""

    spec: AtomSpec
    basis: list = field(init=False)
    energies: np.ndarray = field(init=False)
    vdd_unit: np.ndarray = field(init=False)
    gamma_dd: np.ndarray = field(init=False)
    blocks: list = field(init=False)

    def __post_init__(self):
        spec = self.spec
        self.basis = build_basis(spec)
        n = len(self.basis)
        idx = spec.sublevel_index
        g = np.array([idx[(s.F, s.mF)] for s in self.basis])
        e = np.array([idx[(s.Fp, s.mFp)] for s in self.basis])
        pi = np.array([s.pi for s in self.basis])
        D = spec.dipole
        # X_q[j, i] = D_q[e_j, g_i] * D_q[e_i, g_j]
        X = np.stack([D[q][e[:, None], g[None, :]] * D[q][e[None, :], g[:, None]] for q in range(3)])
        same = pi[:, None] == pi[None, :]
        self.vdd_unit = np.where(same, pi[None, :] * (X[0] - 2 * X[1] + X[2]), 0.0) * spec.dipole_scale
        self.gamma_dd = np.where(same, pi[None, :] * 0.5 * X.sum(axis=0), 0.0)
        self.energies = np.array([spec.ground_energy(s.F) + spec.excited_energy(s.Fp) for s in self.basis])
        self.blocks = []
        start = 0
        for k in range(1, n + 1):
            if k == n or self.basis[k].block != self.basis[start].block:
                self.blocks.append((self.basis[start].block, slice(start, k)))
                start = k

    def hamiltonian(self, r: float) -> np.ndarray:
        """Hermitian part H_hf + V_dd at separation r."""
        if r <= 0:
            raise ValueError("separation must be positive")
        return np.diag(self.energies) + self.vdd_unit / r**3

    @property
    def labels(self) -> list[tuple[int, int]]:
        return [s.block for s in self.basis]


_TABLES: dict = {}


def tables(spec: AtomSpec = RB87) -> MolecularTables:
    if spec not in _TABLES:
        _TABLES[spec] = MolecularTables(spec)
    return _TABLES[spec]


@dataclass
class MolecularSpectrum:
    """Born-Oppenheimer eigensystem at one separation.

    ``eigenvectors[:, e]`` is eigenstate ``e`` in the :func:`build_basis` ordering;
    states are grouped by (M, pi) block and ascending within each block.
    """

    r: float
    eigenvalues: np.ndarray
    decays: np.ndarray
    eigenvectors: np.ndarray
    labels: list


def _block_eigh(h: np.ndarray, g: np.ndarray, label, degeneracy_tol: float):
    """Diagonalise a stack of blocks; rotate degenerate subspaces to diagonalise Gamma_dd."""
    try:
        lam, vec = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(f"eigensolver failed in block M={label[0]}, pi={label[1]}") from exc
    gam = np.einsum("...ie,ij,...je->...e", vec, g, vec)
    scale = np.maximum(np.abs(lam).max(axis=-1, keepdims=True), 1.0)
    close = np.diff(lam, axis=-1) < degeneracy_tol * scale
    if close.any():
        for idx in zip(*np.nonzero(close.any(axis=-1))) if lam.ndim > 1 else [()]:
            lam_r, vec_r = lam[idx], vec[idx]
            c = close[idx]
            k = 0
            n = len(lam_r)
            while k < n:
                m = k
                while m < n - 1 and c[m]:
                    m += 1
                if m > k:
                    sub = vec_r[:, k : m + 1]
                    w, u = np.linalg.eigh(sub.T @ g @ sub)
                    vec_r[:, k : m + 1] = sub @ u
                    gam[idx][k : m + 1] = w
                k = m + 1
    return lam, vec, gam


def spectrum(r: float, spec: AtomSpec = RB87, degeneracy_tol: float = 1e-9) -> MolecularSpectrum:
    """Eigenvalues (relative to S1/2(F_down) + P1/2(F'_down)), half-width decays, eigenvectors."""
    t = tables(spec)
    h = t.hamiltonian(r)
    n = len(t.basis)
    lam = np.zeros(n)
    gam = np.zeros(n)
    vecs = np.zeros((n, n))
    for label, sl in t.blocks:
        l, v, g = _block_eigh(h[sl, sl], t.gamma_dd[sl, sl], label, degeneracy_tol)
        lam[sl], vecs[sl, sl], gam[sl] = l, v, 0.5 + g
    return MolecularSpectrum(r, lam, gam, vecs, t.labels)


@dataclass
class SpectrumGrid:
    """Block eigensystems on a radial grid, shared read-only by dressed-state sweeps."""

    spec: AtomSpec
    r: np.ndarray
    eigenvalues: np.ndarray  # (nr, 128)
    decays: np.ndarray  # (nr, 128)
    block_vectors: list  # per block: (nr, nb, nb)
    blocks: list


def spectrum_grid(r, spec: AtomSpec = RB87, degeneracy_tol: float = 1e-9) -> SpectrumGrid:
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("separations must be positive")
    t = tables(spec)
    n = len(t.basis)
    lam = np.zeros((len(r), n))
    gam = np.zeros((len(r), n))
    vec_blocks = []
    for label, sl in t.blocks:
        h = np.diag(t.energies[sl])[None] + t.vdd_unit[sl, sl][None] / r[:, None, None] ** 3
        l, v, g = _block_eigh(h, t.gamma_dd[sl, sl], label, degeneracy_tol)
        lam[:, sl], gam[:, sl] = l, 0.5 + g
        vec_blocks.append(v)
    return SpectrumGrid(spec, r, lam, gam, vec_blocks, t.blocks)


def track_curves(grid: SpectrumGrid) -> np.ndarray:
    """Permutation per radius following each curve by maximal eigenvector overlap.

    Returns ``order`` with ``grid.eigenvalues[k, order[k]]`` a continuous set of curves.
    """
    from scipy.optimize import linear_sum_assignment

    nr = len(grid.r)
    order = np.tile(np.arange(grid.eigenvalues.shape[1]), (nr, 1))
    for (label, sl), v in zip(grid.blocks, grid.block_vectors):
        perm = np.arange(sl.stop - sl.start)
        for k in range(1, nr):
            ov = np.abs(v[k - 1][:, perm].T @ v[k])
            _, cols = linear_sum_assignment(-ov)
            perm = cols
            order[k, sl] = sl.start + perm
    return order


def default_radial_grid(n: int = 400, kr_min: float = 0.02, kr_max: float = 50.0) -> np.ndarray:
    return np.geomspace(kr_min, kr_max, n)
