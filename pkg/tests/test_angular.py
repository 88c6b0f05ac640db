from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Rational
from sympy.physics.wigner import clebsch_gordan as sym_cg
from sympy.physics.wigner import wigner_6j as sym_6j

from rbcphase.angular import (
    D_matrix,
    HalfInt,
    clebsch_gordan,
    projections,
    small_d_matrix,
    wigner_6j,
    wigner_small_d,
)

HALVES = [Fraction(n, 2) for n in range(0, 7)]  # 0 .. 3


def R(x):
    return Rational(x.numerator, x.denominator)


def test_halfint_rejects_quarter():
    with pytest.raises(ValueError):
        HalfInt.of(0.25)
    assert HalfInt.of(Fraction(3, 2)).twice_value == 3


def test_cg_against_sympy_all_j_up_to_3():
    worst = 0.0
    for j1, j2 in product(HALVES, repeat=2):
        for J in HALVES:
            if not abs(j1 - j2) <= J <= j1 + j2 or (j1 + j2 + J).denominator != 1:
                continue
            for m1, m2 in product(projections(j1), projections(j2)):
                M = m1 + m2
                if abs(M) > J:
                    continue
                ref = float(sym_cg(R(j1), R(j2), R(J), R(m1), R(m2), R(M)))
                worst = max(worst, abs(clebsch_gordan(j1, m1, j2, m2, J, M) - ref))
    assert worst < 1e-12


def test_cg_selection_rules():
    assert clebsch_gordan(1, 0, 1, 0, 1, 0) == 0.0  # parity
    assert clebsch_gordan(1, 1, 1, 0, 1, 0) == 0.0  # M mismatch
    assert clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0  # triangle


def test_6j_against_sympy():
    grid = [Fraction(n, 2) for n in range(0, 5)]
    worst = 0.0
    count = 0
    for args in product(grid, repeat=6):
        try:
            ref = float(sym_6j(*[R(a) for a in args]))
        except ValueError:  # sympy rejects mixed-parity triads; the symbol is zero there
            ref = 0.0
        worst = max(worst, abs(wigner_6j(*args) - ref))
        count += ref != 0
    assert count > 100
    assert worst < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=6, max_size=6))
def test_6j_column_and_flip_symmetry(tw):
    a, b, c, d, e, f = [Fraction(x, 2) for x in tw]
    v = wigner_6j(a, b, c, d, e, f)
    assert wigner_6j(b, a, c, e, d, f) == pytest.approx(v, abs=1e-12)
    assert wigner_6j(c, b, a, f, e, d) == pytest.approx(v, abs=1e-12)
    assert wigner_6j(d, e, c, a, b, f) == pytest.approx(v, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.floats(0, np.pi), st.floats(-np.pi, np.pi))
def test_rotation_matrices_unitary(tj, theta, phi):
    j = Fraction(tj, 2)
    d = small_d_matrix(j, theta)
    D = D_matrix(j, phi, theta)
    n = tj + 1
    assert np.allclose(d @ d.T, np.eye(n), atol=1e-12)
    assert np.allclose(D @ D.conj().T, np.eye(n), atol=1e-12)


def test_small_d_closed_forms():
    t = 0.7
    assert wigner_small_d(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), t) == pytest.approx(np.cos(t / 2))
    assert wigner_small_d(1, 1, 0, t) == pytest.approx(-np.sin(t) / np.sqrt(2))
    assert wigner_small_d(2, 0, 0, t) == pytest.approx(0.5 * (3 * np.cos(t) ** 2 - 1))


def test_small_d_composition():
    j = Fraction(3, 2)
    a, b = 0.4, 1.1
    assert np.allclose(small_d_matrix(j, a) @ small_d_matrix(j, b), small_d_matrix(j, a + b), atol=1e-12)
