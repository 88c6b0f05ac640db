"""State-dependent lin-theta-lin lattice along z: wells, motional overlaps, gaps.

Each sublevel feels U(z) = U0 [S+ sin^2(kz - theta/2) + S- sin^2(kz + theta/2)],
with S+- the summed D1 sigma+- line strengths of that sublevel.  Lengths are in
units of 1/k and energies in hbar*Gamma.  In these units the oscillator of a well
with curvature U'' has hbar*omega = sqrt(2 E_R U''), and the packet width is
eta = k z0 = sqrt(E_R / hbar*omega).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import eval_hermite, gammaln, roots_hermite

from .molecular import RB87, AtomSpec


class LatticeError(ValueError):
    pass


@lru_cache(maxsize=None)
def line_strengths(F: Fraction, mF: Fraction, spec: AtomSpec = RB87) -> tuple[float, float, float]:
    """(S-, S_pi, S+): summed |<F' m+q|D_q|F m>|^2 over the excited manifold."""
    D = spec.dipole
    g = spec.sublevel_index[(Fraction(F), Fraction(mF))]
    return tuple(float(np.sum(D[q][:, g] ** 2)) for q in range(3))


@dataclass(frozen=True)
class LatticeGeometry:
    theta: float
    u0: float
    recoil: float

    def __post_init__(self):
        if not 0 < self.theta <= np.pi / 2:
            raise LatticeError("theta must lie in (0, pi/2]")
        if self.u0 <= 0 or self.recoil <= 0:
            raise LatticeError("u0 and recoil must be positive")

    @classmethod
    def calibrated(cls, eta: float, recoil: float, theta: float, spec: AtomSpec = RB87) -> "LatticeGeometry":
        """Choose U0 so the logical wells at this theta hold packets of width eta."""
        unit = well_parameters(spec.F_up, Fraction(1), cls(theta, 1.0, recoil), spec)
        hw = recoil / eta**2
        return cls(theta=theta, u0=(hw / unit.omega) ** 2, recoil=recoil)


def total_strength(spec: AtomSpec = RB87) -> float:
    s = line_strengths(spec.F_down, Fraction(-1), spec)
    return s[0] + s[2]


def calibrated_depth(eta: float, recoil: float, spec: AtomSpec = RB87) -> float:
    hw = recoil / eta**2
    return hw**2 / (4 * total_strength(spec) * recoil)


def oscillator_energy(u0: float, recoil: float, spec: AtomSpec = RB87) -> float:
    """hbar*omega_osc for the theta -> 0 well (equals 2 sqrt(2 U0 E_R/3) for the D1 weights)."""
    return 2 * np.sqrt(total_strength(spec) * u0 * recoil)


def sublevel_potential(F, mF, z, geom: LatticeGeometry, spec: AtomSpec = RB87):
    sm, _, sp = line_strengths(Fraction(F), Fraction(mF), spec)
    z = np.asarray(z, dtype=float)
    return geom.u0 * (sp * np.sin(z - geom.theta / 2) ** 2 + sm * np.sin(z + geom.theta / 2) ** 2)


@dataclass(frozen=True)
class MotionalState:
    F: Fraction
    mF: Fraction
    n: int
    center: float
    omega: float  # hbar*omega in hbar*Gamma
    minimum: float = 0.0  # potential at the well bottom

    def __post_init__(self):
        if self.n < 0 or self.omega <= 0:
            raise LatticeError("need n >= 0 and omega > 0")

    def width(self, recoil: float) -> float:
        """eta = k z0 of this state's ground packet."""
        return np.sqrt(recoil / self.omega)

    def energy(self) -> float:
        return self.minimum + (self.n + 0.5) * self.omega

    def excited(self, n: int) -> "MotionalState":
        return MotionalState(self.F, self.mF, n, self.center, self.omega, self.minimum)


def well_parameters(F, mF, geom: LatticeGeometry, spec: AtomSpec = RB87) -> MotionalState:
    """Minimum nearest z = 0 and its harmonic frequency."""
    sm, _, sp = line_strengths(Fraction(F), Fraction(mF), spec)
    th = geom.theta
    # U = U0 [(a+b)/2 - a/2 cos(2z - th) - b/2 cos(2z + th)], a = S+, b = S-
    a, b = sp, sm
    amp = np.hypot(a * np.cos(th) + b * np.cos(th), a * np.sin(th) - b * np.sin(th))
    if amp < 1e-12:
        raise LatticeError(f"flat potential for F={F}, mF={mF}")
    z0 = 0.5 * np.arctan2(a * np.sin(th) - b * np.sin(th), (a + b) * np.cos(th))
    curvature = 2 * geom.u0 * amp
    hw = np.sqrt(2 * geom.recoil * curvature)
    umin = float(sublevel_potential(F, mF, z0, geom, spec))
    return MotionalState(Fraction(F), Fraction(mF), 0, float(z0), float(hw), umin)


def logical_separation(theta: float, spec: AtomSpec = RB87) -> float:
    """k times the distance between the two species' logical wells."""
    g = LatticeGeometry(theta, 1.0, 1.0)
    plus = well_parameters(spec.F_up, Fraction(1), g, spec)
    minus = well_parameters(spec.F_up, Fraction(-1), g, spec)
    return abs(plus.center - minus.center)


def theta_for_separation(kdz: float, spec: AtomSpec = RB87) -> float:
    """Polarization angle that puts the logical wells kdz apart."""
    top = logical_separation(np.pi / 2 - 1e-9, spec)
    if not 0 < kdz < top:
        raise LatticeError(f"kdz must lie in (0, {top:.4f})")
    return brentq(lambda t: logical_separation(t, spec) - kdz, 1e-12, np.pi / 2 - 1e-9, xtol=1e-14)


def _hermite_function(n: int, x, center: float, scale: float):
    # normalized HO eigenfunction with position rms width scale/sqrt(2) for n=0
    u = (x - center) / scale
    lognorm = -0.5 * (n * np.log(2.0) + gammaln(n + 1) + 0.5 * np.log(np.pi) + np.log(scale))
    return np.exp(lognorm - u**2 / 2) * eval_hermite(n, u)


def motional_overlap(a: MotionalState, b: MotionalState, recoil: float) -> float:
    """<psi_a|psi_b> for 1D harmonic states with arbitrary centers and frequencies.

    Gauss-Hermite quadrature with enough nodes is exact for polynomial times Gaussian.
    """
    sa = np.sqrt(2.0) * a.width(recoil)  # HO length
    sb = np.sqrt(2.0) * b.width(recoil)
    # combined Gaussian exp(-(x-c)^2/(2 s^2) ...) : 1/s^2 = 1/sa^2 + 1/sb^2 (product of the two envelopes)
    inv = 1 / sa**2 + 1 / sb**2
    c = (a.center / sa**2 + b.center / sb**2) / inv
    s = 1 / np.sqrt(inv)
    x, w = roots_hermite((a.n + b.n) // 2 + 2)
    pts = c + np.sqrt(2.0) * s * x
    weight = w * np.sqrt(2.0) * s * np.exp(x**2)
    return float(np.sum(weight * _hermite_function(a.n, pts, a.center, sa) * _hermite_function(b.n, pts, b.center, sb)))


def energy_gap(a: MotionalState, b: MotionalState) -> float:
    return a.energy() - b.energy()


def vd_shift(pair, theta: float, r: float, mu2: float = 1.0, spec: AtomSpec = RB87) -> float:
    """Magnetic dipolar shift -2 mu^2/r^3 P2(cos theta) g_a g_b m_a m_b, with g_F = +-1/F_up."""
    def g(F):
        return (1 if Fraction(F) == spec.F_up else -1) / float(spec.F_up)

    (Fa, ma), (Fb, mb) = pair
    p2 = 0.5 * (3 * np.cos(theta) ** 2 - 1)
    return float(-2 * mu2 / r**3 * p2 * g(Fa) * g(Fb) * float(ma) * float(mb))


@dataclass(frozen=True)
class LeakageGeometry:
    """Logical wells of both species at a chosen logical separation."""

    kdz: float
    eta: float
    recoil: float
    spec: AtomSpec = RB87

    @cached_property
    def lattice(self) -> LatticeGeometry:
        th = theta_for_separation(self.kdz, self.spec)
        return LatticeGeometry.calibrated(self.eta, self.recoil, th, self.spec)

    def state(self, F, mF, n: int = 0) -> MotionalState:
        return well_parameters(F, mF, self.lattice, self.spec).excited(n)

    def overlap(self, a: tuple, b: tuple) -> float:
        """<psi_{n_a}^{F_a,m_a}|psi_{n_b}^{F_b,m_b}> with a = (F, m, n)."""
        return motional_overlap(self.state(*a), self.state(*b), self.recoil)

    def gap(self, a: tuple, b: tuple) -> float:
        return energy_gap(self.state(*a), self.state(*b))
