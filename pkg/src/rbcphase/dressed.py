"""Dressed ground-state Hamiltonian from the excited molecular potentials.

For two ground-state atoms whose relative coordinate is a Gaussian packet the
light-shift matrix is

    H_ij = |Omega|^2/4 < sum_e c_ie* c_je / (delta_e + i gamma_e) >_rel

Evaluation strategy:

* the oscillator strengths are computed in the body frame after rotating the
  pi-polarised drive with Wigner matrices; after the azimuthal integral the
  numerator is a polynomial in cos(theta), which is projected exactly onto
  Legendre polynomials with Gauss-Legendre nodes;
* the polar integral of P_k(x) exp(beta x) is 2 i_k(beta), so the angular
  average is analytic;
* the remaining radial integral is done by product integration: numerator and
  detuning are linear on each cell and the 1/(delta + i gamma) factor is
  integrated exactly, which resolves the narrow resonances at Condon points.

The sign convention gives Im H_ii < 0 (decay).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import eval_legendre, ive, spherical_in

from .angular import D_matrix, projections, small_d_matrix
from .molecular import RB87, AtomSpec, SpectrumGrid, spectrum_grid, tables


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class LogicalEncoding:
    """Logical states per species as (F, m_F); the pair is (+ species, - species)."""

    spec: AtomSpec = RB87

    def state(self, species: int, bit: int) -> tuple[Fraction, Fraction]:
        if bit == 0:
            return (self.spec.F_down, Fraction(-species))
        return (self.spec.F_up, Fraction(species))

    def pair(self, bits: str) -> tuple:
        """'01' -> ((F, m) of the + atom, (F, m) of the - atom)."""
        return (self.state(+1, int(bits[0])), self.state(-1, int(bits[1])))

    @property
    def logical_pairs(self) -> dict:
        return {b: self.pair(b) for b in ("00", "01", "10", "11")}


@dataclass(frozen=True)
class PacketGeometry:
    """Two identical isotropic Gaussian packets (rms width z0 = eta/k) separated by kdz along z."""

    eta: float
    kdz: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.kdz < 0:
            raise ValueError("kdz must be non-negative")

    @property
    def relative_width(self) -> float:
        return np.sqrt(2.0) * self.eta


@dataclass(frozen=True)
class CatalysisField:
    """Pi-polarised catalysis light; detuning relative to S1/2 F_down -> P1/2 F'_down."""

    delta: float
    rabi: float = 1.0
    polarization: str = "pi"

    def __post_init__(self):
        if self.polarization != "pi":
            raise NotImplementedError("only pi polarisation is supported")


def ground_pairs(spec: AtomSpec = RB87) -> list[tuple]:
    """All 64 two-atom ground product states ((F_a, m_a), (F_b, m_b))."""
    return [(a, b) for a in spec.sublevels for b in spec.sublevels]


def pair_energy(pair, spec: AtomSpec = RB87) -> float:
    return spec.ground_energy(pair[0][0]) + spec.ground_energy(pair[1][0])


def drive_vector(pair, spec: AtomSpec = RB87) -> np.ndarray:
    """(D^dagger . e_z) |a>_alpha |b>_beta in the space-fixed symmetrized basis."""
    t = tables(spec)
    idx = spec.sublevel_index
    D0 = spec.dipole[1]
    a, b = idx[pair[0]], idx[pair[1]]
    v = np.zeros(len(t.basis))
    for n, s in enumerate(t.basis):
        g, e = idx[(s.F, s.mF)], idx[(s.Fp, s.mFp)]
        if g == a:  # atom beta promoted
            v[n] += D0[e, b] / np.sqrt(2)
        if g == b:  # atom alpha promoted
            v[n] += s.pi * D0[e, a] / np.sqrt(2)
    return v


def frame_matrix(theta: float, phi: float = 0.0, spec: AtomSpec = RB87) -> np.ndarray:
    """W with W[i, j] = <i, body frame | j, space frame>.

    Body-frame states are sum_mu D^F_{m mu}(phi, theta, 0) D^F'_{m' mu'}(phi, theta, 0) |mu mu'>.
    """
    t = tables(spec)
    Fs = sorted({s.F for s in t.basis})
    Dm = {F: (D_matrix(F, phi, theta) if phi else small_d_matrix(F, theta)) for F in Fs}
    off = {F: {m: n for n, m in enumerate(projections(F))} for F in Fs}
    n = len(t.basis)
    W = np.zeros((n, n), dtype=complex if phi else float)
    groups: dict = {}
    for k, s in enumerate(t.basis):
        groups.setdefault((s.F, s.Fp, s.pi), []).append(k)
    for (F, Fp, pi), ks in groups.items():
        for i in ks:
            si = t.basis[i]
            a = off[F][si.mF]
            b = off[Fp][si.mFp]
            for j in ks:
                sj = t.basis[j]
                W[i, j] = np.conj(Dm[F][a, off[F][sj.mF]] * Dm[Fp][b, off[Fp][sj.mFp]])
    return W


def rotate_to_space_frame(coeffs, theta: float, phi: float, spec: AtomSpec = RB87) -> np.ndarray:
    """Body-frame coefficients -> space-frame coefficients."""
    return frame_matrix(theta, phi, spec).conj().T @ np.asarray(coeffs)


def rotate_to_body_frame(coeffs, theta: float, phi: float, spec: AtomSpec = RB87) -> np.ndarray:
    return frame_matrix(theta, phi, spec) @ np.asarray(coeffs)


def oscillator_strengths(eigenvectors: np.ndarray, pair, theta: float, phi: float = 0.0,
                         spec: AtomSpec = RB87) -> np.ndarray:
    """c_ie = <e| D^dagger . e_z |i> for every column of ``eigenvectors`` (body frame)."""
    v = rotate_to_body_frame(drive_vector(pair, spec), theta, phi, spec)
    return eigenvectors.T @ v


def legendre_weights(r: np.ndarray, geom: PacketGeometry, kmax: int) -> np.ndarray:
    """rho_k(r) such that <f>_rel = int dr sum_k a_k(r) rho_k(r) for f = sum_k a_k(r) P_k(cos theta).

    Returns an array of shape (kmax+1, len(r)).
    """
    s2 = geom.relative_width**2
    dz = geom.kdz
    r = np.asarray(r, dtype=float)
    beta = r * dz / s2
    radial = 4 * np.pi * r**2 * (2 * np.pi * s2) ** -1.5 * np.exp(-((r - dz) ** 2) / (2 * s2))
    out = np.empty((kmax + 1, len(r)))
    small = beta < 30.0
    bs = np.where(small, beta, 1.0)
    bl = np.where(small, 1.0, beta)
    for k in range(kmax + 1):
        scaled_small = spherical_in(k, bs) * np.exp(-bs)
        scaled_large = np.sqrt(np.pi / (2 * bl)) * ive(k + 0.5, bl)
        out[k] = radial * np.where(small, scaled_small, scaled_large)
    return out


def _cell_integrals(g, den):
    """Integrate (piecewise linear g) / (piecewise linear den) over each cell, per unit width.

    ``g`` and ``den`` have the radial axis first; returns len-1 cells on that axis.
    """
    g0, g1 = g[:-1], g[1:] - g[:-1]
    A, B = den[:-1], den[1:] - den[:-1]
    u = B / A
    small = np.abs(u) < 1e-3
    us = np.where(small, u, 0.0)
    series = (
        g0 * (1 - us / 2 + us**2 / 3 - us**3 / 4 + us**4 / 5 - us**5 / 6)
        + g1 * (0.5 - us / 3 + us**2 / 4 - us**3 / 5 + us**4 / 6 - us**5 / 7)
    ) / A
    Bs = np.where(small, 1.0, B)
    L = np.log(A + B) - np.log(A)
    exact = g1 / Bs + (g0 - g1 * A / Bs) * L / Bs
    return np.where(small, series, exact)


def default_radial_grid(n: int = 3000, r_min: float = 2e-3, r_max: float = 6.0) -> np.ndarray:
    return np.geomspace(r_min, r_max, n)


@dataclass
class DressedSolver:
    """Dressed-state evaluator sharing one spectrum cache across detunings and geometries.

    ``n_radial`` points on a geometric grid carry the molecular spectrum; ``n_angular``
    Gauss-Legendre nodes in cos(theta) project the oscillator-strength products onto
    Legendre polynomials up to degree ``kmax``.
    """

    spec: AtomSpec = RB87
    n_radial: int = 3000
    n_angular: int = 32
    r_min: float = 2e-3
    r_max: float = 6.0
    span: float = 9.0  # packet half-width, in relative rms widths, covered by the radial integral
    grid: SpectrumGrid = field(init=False, repr=False)
    _moments: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.kmax = int(8 * self.spec.F_up // 2)  # tensor rank bound of c* c
        if self.n_angular < self.kmax + 1:
            raise ValueError("n_angular must exceed the Legendre degree")
        self.grid = spectrum_grid(default_radial_grid(self.n_radial, self.r_min, self.r_max), self.spec)
        x, w = np.polynomial.legendre.leggauss(self.n_angular)
        self._x, self._w = x, w
        k = np.arange(self.kmax + 1)
        # projection matrix: a_k = sum_n proj[k, n] f(x_n)
        self._proj = (2 * k[:, None] + 1) / 2 * w[None, :] * eval_legendre(k[:, None], x[None, :])
        self._frames = [frame_matrix(np.arccos(xn), 0.0, self.spec) for xn in x]

    def moments(self, pairs: list[tuple], window: slice | None = None) -> np.ndarray:
        """Legendre moments a[k, r, e, p] of c_{i e} c_{j e} for (i, j) in ``pairs``.

        Full-grid moments are cached per pair list; windowed requests reuse the
        cache when present and are otherwise computed on the fly.
        """
        key = tuple(pairs)
        if key in self._moments:
            full = self._moments[key]
            return full if window is None else full[:, window]
        out = self._compute_moments(pairs, window or slice(None))
        if window is None:
            self._moments[key] = out
        return out

    def _compute_moments(self, pairs, window: slice) -> np.ndarray:
        states = sorted({s for p in pairs for s in p})
        col = {s: n for n, s in enumerate(states)}
        V = np.stack([drive_vector(s, self.spec) for s in states], axis=1)  # (128, ns)
        Vb = np.stack([W @ V for W in self._frames])  # (nx, 128, ns)
        nr = len(self.grid.r[window])
        ne = Vb.shape[1]
        out = np.zeros((self.kmax + 1, nr, ne, len(pairs)))
        ii = [col[p[0]] for p in pairs]
        jj = [col[p[1]] for p in pairs]
        for (label, sl), vec in zip(self.grid.blocks, self.grid.block_vectors):
            c = np.einsum("rme,xms->xres", vec[window], Vb[:, sl, :])  # (nx, nr, nb, ns)
            prod = c[..., ii] * c[..., jj]
            out[:, :, sl, :] = np.einsum("kx,xrep->krep", self._proj, prod)
        return out

    def window(self, geom: PacketGeometry) -> slice:
        """Radial grid cells covering the relative-coordinate packet."""
        r = self.grid.r
        s = geom.relative_width
        lo = max(np.searchsorted(r, max(geom.kdz - self.span * s, 0.0)) - 1, 0)
        hi = np.searchsorted(r, geom.kdz + self.span * s) + 1
        if hi > len(r):
            raise QuadratureError(f"radial grid ends at kr={r[-1]:.3g} inside the packet (kdz={geom.kdz})")
        return slice(lo, hi)

    def elements(self, pairs: list[tuple], field_: CatalysisField, geom: PacketGeometry) -> np.ndarray:
        """Complex H_ij (units hbar Gamma) for each (i, j) pair."""
        return self.elements_multi(pairs, [field_.delta], geom, field_.rabi)[0]

    def elements_multi(self, pairs, deltas, geom: PacketGeometry, rabi: float = 1.0) -> np.ndarray:
        """H_ij for several detunings at one geometry; shape (len(deltas), len(pairs))."""
        if rabi == 0:
            return np.zeros((len(deltas), len(pairs)), dtype=complex)
        sl = self.window(geom)
        A = self.moments(pairs, sl)
        rs = self.grid.r[sl]
        rho = legendre_weights(rs, geom, self.kmax)  # (k, nr)
        g = np.einsum("krep,kr->rep", A, rho)  # (nr, ne, np)
        lam = self.grid.eigenvalues[sl][:, :, None]
        gam = self.grid.decays[sl][:, :, None]
        e_ref = np.array([(pair_energy(p[0], self.spec) + pair_energy(p[1], self.spec)) / 2 for p in pairs])
        dr = np.diff(rs)[:, None, None]
        out = np.zeros((len(deltas), len(pairs)), dtype=complex)
        for n, delta in enumerate(deltas):
            den = (delta + e_ref)[None, None, :] - lam + 1j * gam
            cells = _cell_integrals(g, den)
            out[n] = (cells * dr).sum(axis=(0, 1))
        if not np.all(np.isfinite(out)):
            raise QuadratureError(f"non-finite dressed element at kdz={geom.kdz}")
        return out * abs(rabi) ** 2 / 4


def logical_pairs_list(spec: AtomSpec = RB87) -> list[tuple]:
    enc = LogicalEncoding(spec)
    return [(enc.pair(b), enc.pair(b)) for b in ("00", "01", "10", "11")]


def dressed_hamiltonian(solver: DressedSolver, field_: CatalysisField, geom: PacketGeometry) -> np.ndarray:
    """4x4 dressed Hamiltonian on (|00>, |01>, |10>, |11>)."""
    enc = LogicalEncoding(solver.spec)
    bits = ("00", "01", "10", "11")
    pairs = [(enc.pair(a), enc.pair(b)) for a in bits for b in bits]
    vals = solver.elements(pairs, field_, geom)
    return vals.reshape(4, 4)


def dressed_element(i, j, spec: AtomSpec, field_: CatalysisField, geom: PacketGeometry,
                    solver: DressedSolver | None = None) -> complex:
    """Single dressed matrix element between two-atom ground product states."""
    solver = solver or DressedSolver(spec)
    return complex(solver.elements([(i, j)], field_, geom)[0])
