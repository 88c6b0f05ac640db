"""Command-line front end.

    rbcphase <potentials|surface|lattice|threelevel|constraints>
             [--config FILE] [--out DIR] [--workers N] [--override section.key=value ...]

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


# ----------------------------------------------------------------------------- configuration

def default_config() -> dict:
    text = resources.files("rbcphase").joinpath("default_config.json").read_text()
    return json.loads(text)


_DEFAULTS = default_config()


def _check_against(cfg: dict, ref: dict, path: str = "") -> None:
    for key, val in cfg.items():
        where = f"{path}{key}"
        if key not in ref:
            raise ConfigError(f"unknown key {where}")
        want = ref[key]
        if "unit" in want:
            if not isinstance(val, dict) or set(val) != {"value", "unit"}:
                raise ConfigError(f"{where} must be an object with 'value' and 'unit'")
            if val["unit"] != want["unit"]:
                raise ConfigError(f"{where}: unit {val['unit']!r} given, expected {want['unit']!r}")
        else:
            if not isinstance(val, dict):
                raise ConfigError(f"{where} must be a section")
            _check_against(val, want, where + ".")


def merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and "unit" not in val and isinstance(out.get(key), dict):
            out[key] = merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str | None, overrides: list[str] = ()) -> dict:
    cfg = copy.deepcopy(_DEFAULTS)
    if path:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be an object")
        _check_against(user, _DEFAULTS)
        cfg = merge(cfg, user)
    for item in overrides:
        apply_override(cfg, item)
    return cfg


def apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, raw = item.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for p in parts[:-1]:
        if p not in node or "unit" in node[p]:
            raise ConfigError(f"unknown override key {key}")
        node = node[p]
    leaf = parts[-1]
    if leaf not in node or "unit" not in node[leaf]:
        raise ConfigError(f"unknown override key {key}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node[leaf]["value"] = value


def dump_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _v(cfg: dict, section: str, key: str, kind=float, positive: bool = False):
    raw = cfg[section][key]["value"]
    try:
        if kind is bool:
            if not isinstance(raw, bool):
                raise TypeError
            val = raw
        elif kind is int:
            if isinstance(raw, bool) or int(raw) != raw:
                raise TypeError
            val = int(raw)
        elif kind is list:
            val = [float(x) for x in raw]
        else:
            val = float(raw)
            if not math.isfinite(val):
                raise TypeError
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: invalid value {raw!r}") from exc
    if positive:
        vals = val if isinstance(val, list) else [val]
        if not vals or any(x <= 0 for x in vals):
            raise ConfigError(f"{section}.{key} must be positive and non-empty")
    return val


def atom_spec(cfg: dict):
    from .molecular import AtomSpec

    try:
        return AtomSpec(
            nuclear_spin=Fraction(_v(cfg, "atom", "nuclear_spin", positive=True)).limit_denominator(2),
            vhf_ground=_v(cfg, "atom", "vhf_ground", positive=True),
            vhf_excited=_v(cfg, "atom", "vhf_excited", positive=True),
            gamma_hz=_v(cfg, "atom", "gamma_hz", positive=True),
            wavelength_m=_v(cfg, "atom", "wavelength", positive=True),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _linspace(cfg, section):
    a = _v(cfg, section, "kdz_start", positive=True)
    b = _v(cfg, section, "kdz_stop", positive=True)
    n = _v(cfg, section, "kdz_points", int, positive=True)
    if b < a:
        raise ConfigError(f"{section}: kdz_stop < kdz_start")
    return [float(x) for x in np.linspace(a, b, n)]


# ----------------------------------------------------------------------------- output helpers

def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows, meta: dict) -> None:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    path.write_text(buf.getvalue())


def write_json(path: Path, obj) -> None:
    def clean(o):
        if isinstance(o, dict):
            return {str(k): clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, (bool, np.bool_)):
            return bool(o)
        if isinstance(o, (np.integer, int)):
            return int(o)
        if isinstance(o, (complex, np.complexfloating)):
            return {"re": float(o.real), "im": float(o.imag)}
        if isinstance(o, (np.floating, float)):
            f = float(o)
            return f if math.isfinite(f) else str(f)
        if isinstance(o, np.ndarray):
            return clean(o.tolist())
        return o

    path.write_text(json.dumps(clean(obj), indent=2, sort_keys=True) + "\n")


def _meta(cfg: dict, command: str, units: str) -> dict:
    return {"rbcphase": __version__, "command": command, "config_sha256_16": config_hash(cfg), "units": units}


# ----------------------------------------------------------------------------- commands

def cmd_potentials(cfg: dict, out: Path, workers: int) -> dict:
    from .molecular import default_radial_grid, spectrum_grid, track_curves

    spec = atom_spec(cfg)
    lo = _v(cfg, "potentials", "kr_min", positive=True)
    hi = _v(cfg, "potentials", "kr_max", positive=True)
    n = _v(cfg, "potentials", "points", int, positive=True)
    if hi <= lo:
        raise ConfigError("potentials.kr_max must exceed kr_min")
    r = default_radial_grid(n, lo, hi)
    grid = spectrum_grid(r, spec)
    order = track_curves(grid)
    names = []
    for label, sl in grid.blocks:
        for k in range(sl.stop - sl.start):
            names.append(f"M={label[0]:+d}|pi={label[1]:+d}|n={k}")
    header = ["kr"] + [f"lambda[{s}]" for s in names] + [f"gamma[{s}]" for s in names]
    rows = []
    for i, kr in enumerate(r):
        o = order[i]
        rows.append([kr, *grid.eigenvalues[i, o], *grid.decays[i, o]])
    path = out / "potentials.csv"
    write_csv(path, header, rows, _meta(cfg, "potentials", "kr in 1/k; lambda in hbar*Gamma; gamma in Gamma"))
    return {"file": str(path), "rows": len(rows), "columns": len(header)}


def cmd_surface(cfg: dict, out: Path, workers: int) -> dict:
    from .gate import SurfaceRequest, fidelity_surface, peak

    spec = atom_spec(cfg)
    try:
        req = SurfaceRequest(
            deltas=tuple(_v(cfg, "surface", "deltas", list, positive=True)),
            kdzs=tuple(_linspace(cfg, "surface")),
            eta=_v(cfg, "surface", "eta", positive=True),
            include_leakage=_v(cfg, "surface", "include_leakage", bool),
            recoil=_v(cfg, "surface", "recoil", positive=True),
            rabi_squared=_v(cfg, "surface", "rabi_squared", positive=True),
            n_max=_v(cfg, "surface", "n_max", int),
            n_radial=_v(cfg, "quadrature", "n_radial", int, positive=True),
            n_angular=_v(cfg, "quadrature", "n_angular", int, positive=True),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    points = fidelity_surface(req, spec, workers)
    rows = [p.row() for p in points]
    header = list(rows[0].keys())
    write_csv(out / "surface.csv", header, [[r[h] for h in header] for r in rows],
              _meta(cfg, "surface", "delta in Gamma; kdz in 1/k; tau in 1/Gamma; xi dimensionless"))
    failures = sum(1 for p in points if p.metrics is None)
    if failures == len(points):
        raise NumericalFailure("every surface point failed: " + points[0].error)
    summary = {"points": len(points), "failed_points": failures}
    for key in ("fidelity_scatter", "fidelity_total"):
        best = peak(points, key)
        if best is not None:
            summary[f"peak_{key}"] = {"delta": best.delta, "kdz": best.kdz, **asdict(best.metrics)}
    write_json(out / "surface_summary.json", summary)
    return summary


def cmd_lattice(cfg: dict, out: Path, workers: int) -> dict:
    from scipy.optimize import brentq

    from .lattice import LatticeError, LeakageGeometry, sublevel_potential

    spec = atom_spec(cfg)
    eta = _v(cfg, "lattice", "eta", positive=True)
    recoil = _v(cfg, "lattice", "recoil", positive=True)
    kdz0 = _v(cfg, "lattice", "kdz", positive=True)
    nz = _v(cfg, "lattice", "kz_points", int, positive=True)
    kdzs = _linspace(cfg, "lattice")
    Fd, Fu = spec.F_down, spec.F_up
    try:
        geo = LeakageGeometry(kdz0, eta, recoil, spec)
        lat = geo.lattice
    except LatticeError as exc:
        raise ConfigError(str(exc)) from exc
    z = np.linspace(-np.pi / 2, np.pi / 2, nz)
    subs = spec.sublevels
    header = ["kz"] + [f"U[F={F},m={m}]" for F, m in subs]
    rows = [[zz, *[float(sublevel_potential(F, m, zz, lat, spec)) for F, m in subs]] for zz in z]
    write_csv(out / "lattice_potentials.csv", header, rows,
              _meta(cfg, "lattice", f"kz in 1/k; U in hbar*Gamma; theta={lat.theta:.12g}; U0={lat.u0:.12g}"))

    series = {
        "m0_vs_m1": ((Fu, 0, 0), (Fu, 1, 0)),
        "m1_vs_mirror_m1": ((Fu, 1, 0), (Fu, -1, 0)),
        "m2_vs_m1": ((Fu, 2, 0), (Fu, 1, 0)),
        "m1_vs_m_minus2_n1": ((Fu, 1, 0), (Fu, -2, 1)),
        "F_down_m0_vs_F_up_m1": ((Fd, 0, 0), (Fu, 1, 0)),
    }
    rows = []
    for k in kdzs:
        try:
            g = LeakageGeometry(k, eta, recoil, spec)
            vals = [g.overlap(a, b) for a, b in series.values()]
            gap = g.gap((Fu, 1, 0), (Fu, -2, 1))
        except LatticeError:
            vals, gap = [math.nan] * len(series), math.nan
        rows.append([k, *vals, *[v * v for v in vals], gap])
    header = ["kdz", *[f"overlap[{s}]" for s in series], *[f"overlap_sq[{s}]" for s in series], "gap[m1_n0-m-2_n1]"]
    write_csv(out / "lattice_overlaps.csv", header, rows,
              _meta(cfg, "lattice", "kdz in 1/k; overlaps dimensionless; gap in hbar*Gamma"))

    def worst(k):
        return LeakageGeometry(k, eta, recoil, spec).overlap((Fu, 2, 0), (Fu, 1, 0)) ** 2 - 0.1

    def degeneracy(k):
        return LeakageGeometry(k, eta, recoil, spec).gap((Fu, 1, 0), (Fu, -2, 1))

    summary = {"theta": lat.theta, "u0": lat.u0, "kdz": kdz0}
    try:
        summary["worst_overlap_0p1_crossing_kdz"] = brentq(worst, 0.05, 0.6, xtol=1e-10)
        kd = brentq(degeneracy, 0.05, 0.3, xtol=1e-10)
        g = LeakageGeometry(kd, eta, recoil, spec)
        amp = g.overlap((Fu, 1, 0), (Fu, -2, 1))
        summary["degeneracy_kdz"] = kd
        summary["degenerate_overlap"] = amp
        summary["degenerate_overlap_sq"] = amp**2
    except (ValueError, LatticeError) as exc:
        raise NumericalFailure(f"lattice root search failed: {exc}") from exc
    write_json(out / "lattice_summary.json", summary)
    return summary


def cmd_threelevel(cfg: dict, out: Path, workers: int) -> dict:
    from .threelevel import (
        ResonanceError,
        ThreeLevelParams,
        compare_routes,
        dressed_hamiltonian_exact,
        dressed_hamiltonian_perturbative,
        fidelity,
        phase_rate,
    )

    s = "threelevel"
    try:
        p = ThreeLevelParams(
            omega01=_v(cfg, s, "omega01"), delta=_v(cfg, s, "delta"), gamma=_v(cfg, s, "gamma"),
            gamma_c=_v(cfg, s, "gamma_c"), rabi=_v(cfg, s, "rabi"), c0=_v(cfg, s, "c0"),
            c1=_v(cfg, s, "c1"), vc=_v(cfg, s, "vc"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    include_ee = _v(cfg, s, "include_ee", bool)
    try:
        exact = dressed_hamiltonian_exact(p, include_ee)
        report = compare_routes(p)
    except ResonanceError as exc:
        raise NumericalFailure(f"Condon resonance: {exc}") from exc
    pert = dressed_hamiltonian_perturbative(p)
    shift = phase_rate(exact)
    report.update({
        "perturbative": pert.matrix,
        "exact": exact.matrix,
        "tau": math.inf if shift == 0 else math.pi / shift,
        "fidelity_exact": fidelity(exact),
        "fidelity_closed_form": fidelity(pert),
        "separable": shift < 1e-12 * max(abs(np.diag(exact.matrix))),
    })
    write_json(out / "threelevel.json", report)
    return report


def cmd_constraints(cfg: dict, out: Path, workers: int) -> dict:
    from .dressed import DressedSolver, PacketGeometry, logical_pairs_list
    from .gate import ConstraintParams, constraint_check, cphase_metrics

    spec = atom_spec(cfg)
    s = "constraints"
    try:
        p = ConstraintParams(
            il_over_i0=_v(cfg, s, "il_over_i0"), ic_over_i0=_v(cfg, s, "ic_over_i0"),
            delta_l=_v(cfg, s, "delta_l"), delta_c=_v(cfg, s, "delta_c"), e_r=_v(cfg, s, "e_r"),
            eta=_v(cfg, s, "eta"), gamma_hz=spec.gamma_hz, margin=_v(cfg, s, "margin"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raw_xi = cfg[s]["xi"]["value"]
    if raw_xi is None:
        solver = DressedSolver(
            spec,
            n_radial=_v(cfg, "quadrature", "n_radial", int, positive=True),
            n_angular=_v(cfg, "quadrature", "n_angular", int, positive=True),
        )
        kdz = _v(cfg, s, "kdz", positive=True)
        E = solver.elements_multi(logical_pairs_list(spec), [p.delta_c], PacketGeometry(p.eta, kdz))[0]
        metrics = cphase_metrics(np.diag(E))
        xi, source = metrics.xi, "model"
    else:
        xi, source = _v(cfg, s, "xi", positive=True), "config"
    rep = constraint_check(p, xi)
    summary = {"xi": xi, "xi_source": source, **asdict(rep)}
    write_json(out / "constraints.json", summary)
    return summary


COMMANDS = {
    "potentials": cmd_potentials,
    "surface": cmd_surface,
    "lattice": cmd_lattice,
    "threelevel": cmd_threelevel,
    "constraints": cmd_constraints,
}


_EPILOG = """commands:
  potentials   molecular potentials and decay rates vs kr (potentials.csv)
  surface      gate metrics over (Delta, kdz) (surface.csv, surface_summary.json)
  lattice      sublevel potentials, motional overlaps, crossings (lattice_*.csv, lattice_summary.json)
  threelevel   closed-form vs exact three-level dressed Hamiltonian (threelevel.json)
  constraints  intensity window, gate speed and trap frequency (constraints.json)

exit codes: 0 success, 2 invalid configuration, 3 numerical failure
"""


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rbcphase",
        description="Molecular-interaction CPHASE gate calculations for 87Rb.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON configuration (merged over the packaged defaults)")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                    help="worker processes for surface scans (default: all cores)")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="set section.key to a JSON value, e.g. surface.eta=0.01")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = load_config(args.config, args.override)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}_config.json").write_text(dump_config(cfg))
        result = COMMANDS[args.command](cfg, out, args.workers)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RuntimeError as exc:  # solver-level failures (eigensolver, quadrature)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps({"command": args.command, "out": str(out)}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
