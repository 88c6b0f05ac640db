"""CPHASE gate metrics, leakage bound, operating-point constraints and fidelity surfaces."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from itertools import product

import numpy as np

from .dressed import (
    DressedSolver,
    LogicalEncoding,
    PacketGeometry,
    QuadratureError,
    ground_pairs,
    logical_pairs_list,
    pair_energy,
)
from .lattice import LatticeError, LeakageGeometry
from .molecular import RB87, AtomSpec

BITS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class GateMetrics:
    tau: float  # 1/Gamma
    kappa: float
    fidelity_scatter: float
    xi: float
    leak_prob: float = 0.0
    fidelity_total: float = math.nan
    separable: bool = False

    def __post_init__(self):
        if math.isnan(self.fidelity_total):
            object.__setattr__(self, "fidelity_total", self.fidelity_scatter * (1 - self.leak_prob))


def cphase_metrics(h, rabi: float = 1.0) -> GateMetrics:
    """Gate time, figure of merit and scattering-limited fidelity from a 4x4 logical Hamiltonian.

    ``rabi`` is the Rabi frequency ``h`` was computed with; it only enters xi, the
    differential shift in units of the on-resonance scattering rate Omega^2/Gamma.
    """
    h = np.asarray(h)
    d = np.diag(h)
    shift = abs((d[0] + d[3] - 2 * d[1]).real)
    worst = np.abs(d.imag).max()
    xi = shift / abs(rabi) ** 2 if rabi else 0.0
    if shift == 0:
        return GateMetrics(tau=math.inf, kappa=0.0, fidelity_scatter=0.0, xi=0.0, separable=True)
    tau = math.pi / shift
    if worst == 0:
        return GateMetrics(tau=tau, kappa=math.inf, fidelity_scatter=1.0, xi=xi)
    kappa = shift / (2 * math.pi * worst)
    return GateMetrics(tau=tau, kappa=kappa, fidelity_scatter=math.exp(-1 / kappa), xi=xi)


@dataclass(frozen=True)
class LeakChannel:
    coupling: complex  # dressed matrix element [hbar Gamma]
    overlap: float  # product of motional overlaps
    gap: float  # [hbar Gamma]
    duration: float = math.inf  # gate time [1/Gamma]

    @property
    def probability(self) -> float:
        """Two-level transfer bound; with a finite duration also capped by (|V| tau)^2."""
        v2 = abs(self.coupling * self.overlap) ** 2
        if v2 == 0:
            return 0.0
        envelope = v2 / (v2 + (self.gap / 2) ** 2)
        return min(envelope, v2 * self.duration**2)


def leakage_probability(channels) -> float:
    survive = 1.0
    for c in channels:
        survive *= 1 - c.probability
    return 1 - survive


def leakage_correction(metrics: GateMetrics, channels) -> GateMetrics:
    """Worst-case two-level bound per channel, combined as independent survival."""
    p = leakage_probability(channels)
    return replace(metrics, leak_prob=p, fidelity_total=metrics.fidelity_scatter * (1 - p))


# ----------------------------------------------------------------------------- constraints

@dataclass(frozen=True)
class ConstraintParams:
    il_over_i0: float = 3.2e6
    ic_over_i0: float = 3.2e5
    delta_l: float = 1e4
    delta_c: float = 1e4
    omega_osc: float = 0.0  # hbar*omega_osc in hbar*Gamma; 0 -> derived from e_r and eta
    e_r: float = 1 / 1500
    eta: float = 0.05
    gamma_hz: float = RB87.gamma_hz
    margin: float = 10.0

    def __post_init__(self):
        for name in ("il_over_i0", "ic_over_i0", "delta_l", "delta_c", "e_r", "eta", "margin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def oscillator(self) -> float:
        return self.omega_osc if self.omega_osc > 0 else self.e_r / self.eta**2

    @property
    def rabi_squared(self) -> float:
        """Omega^2 in Gamma^2 for the catalysis intensity (s = I/I0 = 2 Omega^2/Gamma^2)."""
        return self.ic_over_i0 / 2


@dataclass(frozen=True)
class ConstraintReport:
    left_margin: float
    right_margin: float
    satisfied: bool
    gate_speed_hz: float
    trap_frequency_hz: float


def constraint_check(p: ConstraintParams, xi: float) -> ConstraintReport:
    """Both sides of eta^2 (Dc/DL)^2 << Ic/IL << (1/xi)(omega_osc/Gamma)(I0/IL) as ratios."""
    ratio = p.ic_over_i0 / p.il_over_i0
    left = ratio / (p.eta**2 * (p.delta_c / p.delta_l) ** 2)
    right = math.inf if xi == 0 else (p.oscillator / xi / p.il_over_i0) / ratio
    speed = p.ic_over_i0 * xi * p.gamma_hz  # 1/tau = Ic xi Gamma / (2 pi I0) with Gamma = 2 pi gamma_hz
    return ConstraintReport(
        left_margin=left,
        right_margin=right,
        satisfied=left > p.margin and right > p.margin,
        gate_speed_hz=speed,
        trap_frequency_hz=p.oscillator * p.gamma_hz,
    )


# ----------------------------------------------------------------------------- leakage channels

def leakage_targets(spec: AtomSpec = RB87) -> dict:
    """For each logical input, ground pairs with equal M_tot and equal hyperfine energy."""
    enc = LogicalEncoding(spec)
    logical = set(enc.logical_pairs.values())
    out = {}
    for b, src in enc.logical_pairs.items():
        M = src[0][1] + src[1][1]
        E = pair_energy(src, spec)
        out[b] = [
            t for t in ground_pairs(spec)
            if t != src and t[0][1] + t[1][1] == M and abs(pair_energy(t, spec) - E) < 1e-9
            and t not in logical
        ]
    return out


def leakage_channels(couplings: dict, geometry: LeakageGeometry, n_max: int = 2,
                     duration: float = math.inf) -> dict:
    """Channels per logical input given dressed couplings {(bits, target): H_ij}."""
    enc = LogicalEncoding(geometry.spec)
    out = {b: [] for b in BITS}
    for (b, tgt), h in couplings.items():
        src = enc.pair(b)
        (fa, ma), (fb, mb) = src
        (ga, na_), (gb, nb_) = tgt
        e0 = geometry.state(fa, ma).energy() + geometry.state(fb, mb).energy()
        for na, nb in product(range(n_max + 1), repeat=2):
            ov = geometry.overlap((fa, ma, 0), (ga, na_, na)) * geometry.overlap((fb, mb, 0), (gb, nb_, nb))
            e1 = geometry.state(ga, na_, na).energy() + geometry.state(gb, nb_, nb).energy()
            out[b].append(LeakChannel(h, ov, e0 - e1, duration))
    return out


# ----------------------------------------------------------------------------- surfaces

@dataclass(frozen=True)
class SurfaceRequest:
    deltas: tuple
    kdzs: tuple
    eta: float
    include_leakage: bool = False
    recoil: float = 1 / 1500
    rabi_squared: float = 1.6e5  # Omega^2 [Gamma^2]; cancels in kappa, not in tau or leakage
    n_max: int = 2
    n_radial: int = 3000
    n_angular: int = 32

    def __post_init__(self):
        if not self.deltas or not self.kdzs:
            raise ValueError("empty scan range")
        if any(d <= 0 for d in self.deltas):
            raise ValueError("only positive detunings are supported")
        if any(k <= 0 for k in self.kdzs):
            raise ValueError("separations must be positive")
        if self.eta <= 0:
            raise ValueError("eta must be positive")


@dataclass
class SurfacePoint:
    delta: float
    kdz: float
    metrics: GateMetrics | None
    error: str = ""

    def row(self) -> dict:
        base = {"delta": self.delta, "kdz": self.kdz}
        if self.metrics is None:
            keys = GateMetrics.__dataclass_fields__
            return {**base, **{k: math.nan for k in keys}, "error": self.error}
        return {**base, **asdict(self.metrics), "error": self.error}


_WORKER: dict = {}


def _solver(req: SurfaceRequest, spec: AtomSpec) -> DressedSolver:
    key = (req.n_radial, req.n_angular, spec)
    if _WORKER.get("key") != key:
        _WORKER["key"] = key
        _WORKER["solver"] = DressedSolver(spec, n_radial=req.n_radial, n_angular=req.n_angular)
    return _WORKER["solver"]


def _column(args) -> list[SurfacePoint]:
    req, spec, kdz = args
    solver = _solver(req, spec)
    pairs = logical_pairs_list(spec)
    geom = PacketGeometry(req.eta, kdz)
    try:
        E = solver.elements_multi(pairs, req.deltas, geom, rabi=math.sqrt(req.rabi_squared))
    except (QuadratureError, np.linalg.LinAlgError) as exc:
        return [SurfacePoint(d, kdz, None, str(exc)) for d in req.deltas]
    leak = None
    if req.include_leakage:
        targets = leakage_targets(spec)
        enc = LogicalEncoding(spec)
        lpairs = [(enc.pair(b), t) for b in BITS for t in targets[b]]
        keys = [(b, t) for b in BITS for t in targets[b]]
        try:
            lg = LeakageGeometry(kdz, req.eta, req.recoil, spec)
            _ = lg.lattice
            L = solver.elements_multi(lpairs, req.deltas, geom, rabi=math.sqrt(req.rabi_squared))
        except (LatticeError, QuadratureError) as exc:
            return [SurfacePoint(d, kdz, None, str(exc)) for d in req.deltas]
        leak = (lg, keys, L)
    points = []
    for n, d in enumerate(req.deltas):
        h = np.diag(E[n])
        m = cphase_metrics(h, rabi=math.sqrt(req.rabi_squared))
        if leak is not None:
            lg, keys, L = leak
            chans = leakage_channels(dict(zip(keys, L[n])), lg, req.n_max, m.tau)
            worst = max(leakage_probability(c) for c in chans.values())
            m = replace(m, leak_prob=worst, fidelity_total=m.fidelity_scatter * (1 - worst))
        points.append(SurfacePoint(d, kdz, m))
    return points


def fidelity_surface(req: SurfaceRequest, spec: AtomSpec = RB87, workers: int = 1) -> list[SurfacePoint]:
    """Metrics on the (delta, kdz) grid, row-major in kdz then delta.

    Point failures are recorded on the point and never abort the sweep.
    """
    jobs = [(req, spec, float(k)) for k in req.kdzs]
    if workers <= 1:
        columns = [_column(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_column, jobs))
    return [p for col in columns for p in col]


def peak(points: list[SurfacePoint], key: str = "fidelity_scatter") -> SurfacePoint | None:
    ok = [p for p in points if p.metrics is not None and not math.isnan(getattr(p.metrics, key))]
    return max(ok, key=lambda p: getattr(p.metrics, key), default=None)


def fit_power_law(x, y) -> float:
    """Exponent of y ~ x^p by least squares in log-log."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
