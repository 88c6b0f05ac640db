"""Angular momentum algebra: Clebsch-Gordan coefficients, 6j symbols, rotation matrices.

Quantum numbers may be passed as ints, floats, ``Fraction`` or :class:`HalfInt`;
internally everything is stored as twice the value so half-integers stay exact.
Condon-Shortley phases throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored as ``twice_value``."""

    twice_value: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        t = 2 * Fraction(x).limit_denominator(2)
        if t.denominator != 1 or t != 2 * Fraction(x):
            raise ValueError(f"{x!r} is not a half-integer")
        return cls(int(t))

    @property
    def value(self) -> float:
        return self.twice_value / 2

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        if self.twice_value % 2:
            return f"HalfInt({self.twice_value}/2)"
        return f"HalfInt({self.twice_value // 2})"


def _tw(x) -> int:
    return HalfInt.of(x).twice_value


def projections(j) -> list[Fraction]:
    """m = -j, ..., j as Fractions."""
    t = _tw(j)
    return [Fraction(m2, 2) for m2 in range(-t, t + 1, 2)]


def _triangle(a: int, b: int, c: int) -> bool:
    # arguments are twice the angular momenta
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    return Fraction(
        factorial((a + b - c) // 2) * factorial((a - b + c) // 2) * factorial((-a + b + c) // 2),
        factorial((a + b + c) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _cg_twice(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    if m1 + m2 != M:
        return 0.0
    if not _triangle(j1, j2, J):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0.0
    if (j1 + m1) % 2 or (j2 + m2) % 2 or (J + M) % 2:
        return 0.0
    # Racah's formula, exact in rationals up to one square root
    pref = (J + 1) * _delta_sq(j1, j2, J) * (
        factorial((j1 + m1) // 2) * factorial((j1 - m1) // 2)
        * factorial((j2 + m2) // 2) * factorial((j2 - m2) // 2)
        * factorial((J + M) // 2) * factorial((J - M) // 2)
    )
    total = Fraction(0)
    for k in range(0, (j1 + j2 - J) // 2 + 1):
        args = (
            k,
            (j1 + j2 - J) // 2 - k,
            (j1 - m1) // 2 - k,
            (j2 + m2) // 2 - k,
            (J - j2 + m1) // 2 + k,
            (J - j1 - m2) // 2 + k,
        )
        if min(args) < 0:
            continue
        den = 1
        for a in args:
            den *= factorial(a)
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * sqrt(float(pref * total * total))


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1, j2 m2 | J M>; zero whenever a selection rule fails."""
    return _cg_twice(_tw(j1), _tw(m1), _tw(j2), _tw(m2), _tw(J), _tw(M))


@lru_cache(maxsize=None)
def _sixj_twice(a: int, b: int, c: int, d: int, e: int, f: int) -> float:
    triads = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
    if not all(_triangle(*t) for t in triads):
        return 0.0
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    s = [(x + y + z) // 2 for x, y, z in triads]
    p = [(a + b + d + e) // 2, (a + c + d + f) // 2, (b + c + e + f) // 2]
    total = Fraction(0)
    for z in range(max(s), min(p) + 1):
        den = 1
        for si in s:
            den *= factorial(z - si)
        for pi in p:
            den *= factorial(pi - z)
        total += Fraction((-1) ** z * factorial(z + 1), den)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * sqrt(float(pref * total * total))


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """The 6j symbol {j1 j2 j3; j4 j5 j6}."""
    return _sixj_twice(_tw(j1), _tw(j2), _tw(j3), _tw(j4), _tw(j5), _tw(j6))


@lru_cache(maxsize=None)
def _small_d_coeffs(j: int, m: int, mp: int) -> tuple:
    # Wigner's formula as (coef, power of cos(theta/2), power of sin(theta/2)); twice-units in
    norm = sqrt(
        factorial((j + m) // 2) * factorial((j - m) // 2)
        * factorial((j + mp) // 2) * factorial((j - mp) // 2)
    )
    terms = []
    for s in range(0, j + 1):
        a, c, dd = (j + mp) // 2 - s, (m - mp) // 2 + s, (j - m) // 2 - s
        if min(a, c, dd) < 0:
            continue
        coef = (-1) ** ((mp - m) // 2 + s) * norm / (factorial(a) * factorial(s) * factorial(c) * factorial(dd))
        terms.append((coef, j + (mp - m) // 2 - 2 * s, (m - mp) // 2 + 2 * s))
    return tuple(terms)


def wigner_small_d(j, m, mp, theta):
    """d^j_{m,mp}(theta); vectorised over ``theta``."""
    tj, tm, tmp = _tw(j), _tw(m), _tw(mp)
    if abs(tm) > tj or abs(tmp) > tj:
        raise ValueError("projection exceeds j")
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.zeros_like(theta)
    for coef, pc, ps in _small_d_coeffs(tj, tm, tmp):
        out = out + coef * c**pc * s**ps
    return out


def wigner_D(j, m, mp, phi, theta):
    """D^j_{m,mp}(phi, theta, 0) = exp(-i m phi) d^j_{m,mp}(theta)."""
    return np.exp(-1j * float(HalfInt.of(m).value) * np.asarray(phi)) * wigner_small_d(j, m, mp, theta)


def small_d_matrix(j, theta: float) -> np.ndarray:
    """Full (2j+1)x(2j+1) d-matrix, rows/cols ordered m = -j..j."""
    ms = projections(j)
    return np.array([[float(wigner_small_d(j, m, mp, theta)) for mp in ms] for m in ms])


def D_matrix(j, phi: float, theta: float) -> np.ndarray:
    ms = projections(j)
    phase = np.exp(-1j * np.array([float(m) for m in ms]) * phi)
    return phase[:, None] * small_d_matrix(j, theta)
