from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from rbcphase.dressed import LogicalEncoding
from rbcphase.lattice import (
    LatticeError,
    LatticeGeometry,
    LeakageGeometry,
    MotionalState,
    calibrated_depth,
    energy_gap,
    line_strengths,
    logical_separation,
    motional_overlap,
    oscillator_energy,
    sublevel_potential,
    theta_for_separation,
    vd_shift,
    well_parameters,
)
from rbcphase.molecular import RB87

F1, F2 = RB87.F_down, RB87.F_up
ER = 1 / 1500


@pytest.mark.parametrize(
    "F, m, expect",
    [
        (F1, -1, (1 / 2, 1 / 6)),
        (F2, 1, (1 / 2, 1 / 6)),
        (F2, -1, (1 / 6, 1 / 2)),
        (F2, 2, (2 / 3, 0.0)),
        (F2, -2, (0.0, 2 / 3)),
        (F1, 0, (1 / 3, 1 / 3)),
        (F2, 0, (1 / 3, 1 / 3)),
    ],
)
def test_line_strengths(F, m, expect):
    sm, spi, sp = line_strengths(Fraction(F), Fraction(m))
    assert (sm, sp) == pytest.approx(expect, abs=1e-12)
    assert sm + spi + sp == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, np.pi / 2))
def test_partners_share_minimum_and_m0_symmetric(theta):
    g = LatticeGeometry(theta, 10.0, ER)
    for s in (+1, -1):
        a = well_parameters(F1, -s, g)
        b = well_parameters(F2, s, g)
        assert a.center == pytest.approx(b.center, abs=1e-12)
        assert a.omega == pytest.approx(b.omega, rel=1e-12)
    z = np.linspace(-3, 3, 101)
    for F in (F1, F2):
        assert np.allclose(sublevel_potential(F, 0, z, g), sublevel_potential(F, 0, -z, g))
    for F, m in RB87.sublevels:
        assert sublevel_potential(F, m, z, g).min() >= -1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.02, 1.5))
def test_separation_closed_form_and_inverse(theta):
    # logical wells sit at +-(1/2) atan((S+ - S-)/(S+ + S-) tan theta) = +-(1/2) atan(tan(theta)/2)
    assert logical_separation(theta) == pytest.approx(np.arctan(np.tan(theta) / 2), abs=1e-12)
    assert theta_for_separation(logical_separation(theta)) == pytest.approx(theta, abs=1e-9)


def test_well_is_numerical_minimum():
    g = LatticeGeometry(0.6, 20.0, ER)
    w = well_parameters(F2, 1, g)
    z = np.linspace(w.center - 0.3, w.center + 0.3, 60001)
    u = sublevel_potential(F2, 1, z, g)
    assert z[np.argmin(u)] == pytest.approx(w.center, abs=2e-5)
    h = 1e-4
    curv = (sublevel_potential(F2, 1, w.center + h, g) - 2 * w.minimum + sublevel_potential(F2, 1, w.center - h, g)) / h**2
    assert w.omega == pytest.approx(np.sqrt(2 * ER * curv), rel=1e-6)


def test_calibration_round_trip_and_trap_frequency():
    for theta in (0.1, 0.6, 1.3):
        lat = LatticeGeometry.calibrated(0.05, ER, theta)
        for s in (+1, -1):
            assert well_parameters(F2, s, lat).width(ER) == pytest.approx(0.05, rel=1e-12)
    hw = oscillator_energy(calibrated_depth(0.05, ER), ER)
    assert hw == pytest.approx(ER / 0.05**2)
    # one tenth of the trap frequency, in Hz
    assert 0.1 * hw * RB87.gamma_hz == pytest.approx(144e3, rel=0.01)


def test_flat_potential_rejected():
    with pytest.raises(LatticeError):
        well_parameters(F2, 0, LatticeGeometry(np.pi / 2, 1.0, ER))
    with pytest.raises(LatticeError):
        LatticeGeometry(0.0, 1.0, ER)
    with pytest.raises(LatticeError):
        theta_for_separation(2.0)


def _state(center, omega=0.2, n=0):
    return MotionalState(F2, Fraction(1), n, center, omega)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(0.05, 1.0), st.integers(0, 4))
def test_overlap_normalization_and_gaussian_falloff(d, omega, n):
    a = _state(0.0, omega, n)
    assert motional_overlap(a, a, ER) == pytest.approx(1.0, abs=1e-12)
    eta = a.width(ER)
    g = motional_overlap(_state(0.0, omega), _state(d, omega), ER)
    assert g == pytest.approx(np.exp(-(d**2) / (8 * eta**2)), abs=1e-12)


def test_overlap_unequal_frequencies_and_orthogonality():
    a, b = _state(0.0, 0.2), _state(0.0, 0.45)
    sa, sb = a.width(ER), b.width(ER)
    assert motional_overlap(a, b, ER) == pytest.approx(np.sqrt(2 * sa * sb / (sa**2 + sb**2)), abs=1e-12)
    for m in range(5):
        for n in range(5):
            ov = motional_overlap(_state(0.0, 0.3, m), _state(0.0, 0.3, n), ER)
            assert ov == pytest.approx(float(m == n), abs=1e-12)


def test_overlap_completeness():
    a = _state(0.0)
    total = sum(motional_overlap(a, _state(0.05, n=n), ER) ** 2 for n in range(40))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_gap_and_degeneracy():
    g = LeakageGeometry(0.15, 0.05, ER)
    assert g.gap((F2, 1, 0), (F2, 1, 0)) == 0.0
    assert g.gap((F2, 1, 1), (F2, 1, 0)) == pytest.approx(ER / 0.05**2)
    f = lambda k: LeakageGeometry(k, 0.05, ER).gap((F2, 1, 0), (F2, -2, 1))  # noqa: E731
    k0 = brentq(f, 0.05, 0.3)
    assert k0 == pytest.approx(0.117, abs=0.005)
    ks = np.linspace(k0 + 0.005, k0 + 0.05, 10)
    assert np.all(np.diff([f(k) for k in ks]) > 0)
    assert energy_gap(g.state(F2, 1), g.state(F2, 1)) == 0.0


def test_magnetic_dipolar_shift_is_common():
    enc = LogicalEncoding()
    for theta in (0.0, 0.5, 1.1):
        shifts = [vd_shift(p, theta, 0.2) for p in enc.logical_pairs.values()]
        assert np.ptp(shifts) == pytest.approx(0.0, abs=1e-15)
        assert shifts[0] != 0.0 or np.isclose(3 * np.cos(theta) ** 2, 1)
    assert vd_shift(enc.pair("00"), np.arccos(1 / np.sqrt(3)), 0.2) == pytest.approx(0.0, abs=1e-14)
