import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbcphase.threelevel import (
    DressedGroundHamiltonian,
    ResonanceError,
    ThreeLevelParams,
    compare_routes,
    dressed_hamiltonian_exact,
    dressed_hamiltonian_perturbative,
    fidelity,
    kappa,
    kappa_asymptotic,
    lambda_shift,
    molecular_detunings,
    phase_rate,
    product_hamiltonian,
)


def test_lambda_shift_value():
    assert lambda_shift(1.0, 1.0, 1.0) == pytest.approx(0.2 - 0.1j)
    with pytest.raises(ValueError):
        lambda_shift(1.0, 0.0, 1.0)


def test_molecular_detunings():
    p = ThreeLevelParams(omega01=100, delta=10, vc=3)
    assert molecular_detunings(p, 0) == pytest.approx((12, 8, 112, 108))


def test_linewidths_super_and_subradiant():
    p = ThreeLevelParams(omega01=10, delta=100, gamma_c=0.6)
    assert p.linewidth(0, +1) == pytest.approx(1 + 0.4)
    assert p.linewidth(0, -1) == pytest.approx(1 - 0.4)
    assert p.linewidth(1, +1) == pytest.approx(1 + 0.2)


@pytest.mark.parametrize("kw", [{"gamma": 0}, {"gamma_c": 2}, {"c0": 1, "c1": 0.5}])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        ThreeLevelParams(omega01=10, delta=100, **kw)


def test_product_hamiltonian_symmetric():
    h = product_hamiltonian(ThreeLevelParams(omega01=50, delta=300, gamma_c=0.5, vc=2))
    assert np.allclose(h, h.T)


@settings(max_examples=30, deadline=None)
@given(st.floats(5, 500), st.floats(200, 5e4))
def test_no_coupling_is_separable(w, d):
    p = ThreeLevelParams(omega01=w, delta=d)
    assert phase_rate(dressed_hamiltonian_exact(p)) < 1e-9 * abs(lambda_shift(d, 1, 1))
    assert phase_rate(dressed_hamiltonian_perturbative(p)) < 1e-9 * abs(lambda_shift(d, 1, 1))


def test_light_shift_limit_single_atom():
    # with vc = 0 each atom shifts independently by c_g^2 |W|^2 / 4(delta_g + i/2)
    p = ThreeLevelParams(omega01=40, delta=900, rabi=2.0)
    d = dressed_hamiltonian_exact(p).diagonal
    s0 = p.c0**2 * lambda_shift(p.delta, 1, p.rabi)
    s1 = p.c1**2 * lambda_shift(p.delta + p.omega01, 1, p.rabi)
    assert d["00"] == pytest.approx(2 * s0, rel=1e-3)
    assert d["11"] == pytest.approx(2 * s1, rel=1e-3)


def test_routes_agree_to_first_order_scaling():
    devs = []
    vcs = [0.1, 1.0]
    for vc in vcs:
        devs.append(compare_routes(ThreeLevelParams(omega01=100, delta=1e4, vc=vc))["max_relative_deviation"])
    slope = np.log(devs[1] / devs[0]) / np.log(vcs[1] / vcs[0])
    assert slope == pytest.approx(1.0, abs=0.1)


def test_closed_form_large_detuning_kappa_within_ten_percent():
    for vc in (0.1, 1.0, 10.0):
        r = compare_routes(ThreeLevelParams(omega01=100, delta=1e4, gamma_c=1.0, vc=vc))
        assert r["kappa_asymptotic"] == pytest.approx(r["kappa_exact"], rel=0.1)


def test_kappa_and_fidelity_definitions():
    h = DressedGroundHamiltonian(np.diag([1.0 - 0.1j, 0.0 - 0.05j, 0.0 - 0.05j, 0.0 - 0.02j]))
    assert phase_rate(h) == pytest.approx(1.0)
    assert kappa(h) == pytest.approx(1 / (2 * np.pi * 0.1))
    assert fidelity(h) == pytest.approx(np.exp(-2 * np.pi * 0.1))
    assert kappa(DressedGroundHamiltonian(np.eye(4))) == np.inf


def test_kappa_asymptotic_single_ground_level():
    assert kappa_asymptotic(ThreeLevelParams(omega01=10, delta=1e3, c0=0, c1=0, vc=1)) == 0.0


def test_exact_resonance_raises():
    with pytest.raises(ResonanceError):
        dressed_hamiltonian_exact(ThreeLevelParams(omega01=0.0, delta=0.0, gamma=1e-20))
