import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbcphase.dressed import LogicalEncoding, pair_energy
from rbcphase.gate import (
    ConstraintParams,
    GateMetrics,
    LeakChannel,
    SurfaceRequest,
    constraint_check,
    cphase_metrics,
    fidelity_surface,
    fit_power_law,
    leakage_correction,
    leakage_probability,
    leakage_targets,
    peak,
)


def test_kappa_one_gives_inverse_e():
    w = 1 / (2 * math.pi)
    m = cphase_metrics(np.diag([1.0 - 1j * w, -0.1j, -0.1j, -0.05j]), rabi=2.0)
    assert m.kappa == pytest.approx(1.0)
    assert m.fidelity_scatter == pytest.approx(math.exp(-1))
    assert m.tau == pytest.approx(math.pi)
    assert m.xi == pytest.approx(0.25)
    assert m.fidelity_total == m.fidelity_scatter


@settings(max_examples=40, deadline=None)
@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.floats(0, 1))
def test_separable_input_flagged(a, b, g):
    # E00 + E11 = 2 E01: a sum of single-atom shifts, no conditional phase
    h = np.diag([a - 1j * g, b - 1j * g, b - 1j * g, 2 * b - a - 1j * g])
    m = cphase_metrics(h)
    assert m.separable and m.tau == math.inf and m.fidelity_scatter == 0.0


def test_exactly_separable():
    m = cphase_metrics(np.diag([1.0, 0.5, 0.5, 0.0]))
    assert m.separable and m.tau == math.inf and m.kappa == 0.0


def test_no_decay_gives_unit_fidelity():
    m = cphase_metrics(np.diag([1.0, 0.0, 0.0, 0.0]))
    assert m.kappa == math.inf and m.fidelity_scatter == 1.0


def test_leak_channel_bounds():
    assert LeakChannel(0.0, 1.0, 0.0).probability == 0.0
    # resonant: full transfer unless the gate is short
    assert LeakChannel(0.01, 1.0, 0.0).probability == pytest.approx(1.0)
    assert LeakChannel(0.01, 1.0, 0.0, duration=10.0).probability == pytest.approx(0.01)
    # far detuned: v^2 / (gap/2)^2
    p = LeakChannel(1e-3, 0.5, 2.0).probability
    assert p == pytest.approx((5e-4) ** 2 / 1.0, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=6))
def test_leakage_combination(ps):
    chans = [LeakChannel(math.sqrt(p), 1.0, 0.0) for p in ps]
    total = leakage_probability(chans)
    assert 0 <= total <= 1
    assert total >= max(c.probability for c in chans) - 1e-12
    assert total == pytest.approx(1 - np.prod([1 - c.probability for c in chans]))


def test_leakage_correction_only_lowers_fidelity():
    m = GateMetrics(tau=1.0, kappa=2.0, fidelity_scatter=math.exp(-0.5), xi=1e-7)
    out = leakage_correction(m, [LeakChannel(0.01, 0.3, 0.1), LeakChannel(0.02, 0.1, 0.5)])
    assert 0 < out.leak_prob < 1
    assert out.fidelity_total < m.fidelity_scatter
    assert out.fidelity_total == pytest.approx(m.fidelity_scatter * (1 - out.leak_prob))


def test_leakage_targets():
    enc = LogicalEncoding()
    t = leakage_targets()
    assert {b: len(v) for b, v in t.items()} == {"00": 2, "01": 3, "10": 3, "11": 4}
    logical = set(enc.logical_pairs.values())
    for b, targets in t.items():
        src = enc.pair(b)
        for tgt in targets:
            assert tgt not in logical
            assert tgt[0][1] + tgt[1][1] == src[0][1] + src[1][1]
            assert pair_energy(tgt) == pair_energy(src)


def test_constraint_margins():
    p = ConstraintParams()
    r = constraint_check(p, 1e-8)
    assert r.left_margin == pytest.approx(0.1 / 0.05**2)
    assert r.trap_frequency_hz == pytest.approx(p.e_r / p.eta**2 * p.gamma_hz)
    assert r.gate_speed_hz == pytest.approx(3.2e5 * 1e-8 * p.gamma_hz)
    # right margin falls as the shift per scattering event grows
    margins = [constraint_check(p, xi).right_margin for xi in (1e-9, 1e-8, 1e-7, 1e-6)]
    assert all(a > b for a, b in zip(margins, margins[1:]))
    assert constraint_check(p, 0.0).right_margin == math.inf
    assert not constraint_check(p, 1e-3).satisfied
    with pytest.raises(ValueError):
        ConstraintParams(eta=0)


def test_surface_request_validation():
    with pytest.raises(ValueError):
        SurfaceRequest((), (0.1,), 0.05)
    with pytest.raises(ValueError):
        SurfaceRequest((-1.0,), (0.1,), 0.05)
    with pytest.raises(ValueError):
        SurfaceRequest((1e4,), (0.0,), 0.05)


def test_surface_deterministic_across_workers():
    req = SurfaceRequest((300.0, 1e4), (0.15, 0.3), 0.05, include_leakage=True, n_radial=600)
    a = fidelity_surface(req, workers=1)
    b = fidelity_surface(req, workers=2)
    assert [p.row() for p in a] == [p.row() for p in b]
    assert [(p.kdz, p.delta) for p in a] == [(0.15, 300.0), (0.15, 1e4), (0.3, 300.0), (0.3, 1e4)]
    for p in a:
        assert p.metrics.fidelity_total <= p.metrics.fidelity_scatter
    assert peak(a) is not None


def test_surface_records_point_failures():
    req = SurfaceRequest((1e4,), (0.15, 50.0), 0.05, n_radial=300)
    pts = fidelity_surface(req)
    assert pts[0].metrics is not None
    assert pts[1].metrics is None and pts[1].error
    assert math.isnan(pts[1].row()["kappa"])


def test_power_law_fit():
    x = np.linspace(1, 3, 9)
    assert fit_power_law(x, 2.5 * x**-3) == pytest.approx(-3.0)
