"""Command-line entry point: ``emviscosity <command> [--config PATH] [flags]``.

Exit codes: 0 success, 1 configuration error, 2 computation failure,
3 acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import warnings

import numpy as np

from . import acceptance
from . import asymptotics as asy
from . import spectral_density as sd
from . import units
from .config import COMMANDS, ConfigError, RunConfig
from .force import ROUTES, ResonantRegimeWarning, viscosity
from .materials import NonOhmicError, PoleError, lambda_rho, resistivity_rho
from .quadrature import IntegrandError, QuadratureBudgetError, sweep

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_ACCEPTANCE = 0, 1, 2, 3
COMPUTE_ERRORS = (QuadratureBudgetError, IntegrandError, PoleError, NonOhmicError,
                  FloatingPointError, ArithmeticError)


class ComputationError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# commands

def _point_only(cfg, axes=("z_nm", "v_m_s", "T_K")):
    swept = [a for a in cfg.swept_axes() if a in axes]
    if swept:
        raise ConfigError(f"scenario.{swept[0]}_range", "ranges need the sweep command")


def cmd_viscosity(cfg: RunConfig):
    """mu, its t/r split, references, regime and quadrature error at one point."""
    _point_only(cfg)
    if cfg.scenario.material is None:
        raise ConfigError("scenario.material", "a material is required for this command")
    if cfg.scenario.v_m_s == 0:
        raise ConfigError("scenario.v_m_s", "v = 0 has no drag force; use the 'asymptotic' "
                          "command for the v -> 0 viscosity")
    s = cfg.build_scenario()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResonantRegimeWarning)
            b = viscosity(s, cfg.computation.route)
    except COMPUTE_ERRORS as exc:
        raise ComputationError(f"z={s.z} nm, v={s.v} m/s, T={s.T} K: {exc}") from exc
    out = {"z_nm": s.z, "v_m_s": s.v, "T_K": s.T, "mode": s.mode, "order": s.order}
    out.update(b.as_dict())
    return out


def cmd_asymptotic(cfg: RunConfig):
    """Closed-form viscosities and critical scales (no force integral)."""
    _point_only(cfg)
    atom, mat = cfg.build_atom(), cfg.build_material()
    s = cfg.scenario
    z = s.z_nm * units.NM
    rho = resistivity_rho(mat)
    mu_T, mu_Tt, mu_Tr = asy.mu_t_planar(atom, rho, z, s.T_K)
    scales = asy.critical_scales(z, s.v_m_s or None, s.T_K or None, lambda_rho(rho))
    return {
        "z_nm": s.z_nm, "v_m_s": s.v_m_s, "T_K": s.T_K, "rho_ohm_m": rho,
        "mu_qf": asy.mu_qf_planar(atom, rho, z, s.v_m_s or 0.0),
        "mu_T": mu_T, "mu_T_t": mu_Tt, "mu_T_r": mu_Tr,
        "mu_vac_lowT": asy.mu_bb_lowT(atom, s.T_K),
        "mu_vac_resonant": asy.mu_bb_resonant(atom, s.T_K),
        "regime": asy.classify_regime(z, s.T_K, s.v_m_s or 0.0, mat, atom),
        "scales": {k: v for k, v in scales.__dict__.items() if v is not None},
    }


def _sweep_eval(args):
    cfg_dict, z, v, T = args
    cfg = RunConfig.from_dict(cfg_dict)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonantRegimeWarning)
        b = viscosity(cfg.build_scenario(z, v, T), cfg.computation.route)
    return b.as_dict()


SWEEP_COLUMNS = ("z_nm", "v_m_s", "T_K", "mu", "mu_t", "mu_r", "mu_over_mu_qf",
                 "mu_over_mu_T", "regime", "error", "seconds", "ok", "message")


def cmd_sweep(cfg: RunConfig):
    """One row per scenario of the 1- or 2-axis product grid."""
    swept = cfg.swept_axes()
    if not swept:
        raise ConfigError("scenario", "sweep needs at least one <axis>_range")
    if cfg.scenario.material is None:
        raise ConfigError("scenario.material", "a material is required for this command")
    axes = [cfg.axis_values(a) for a in ("z_nm", "v_m_s", "T_K")]
    for name, vals in zip(("z_nm", "v_m_s", "T_K"), axes):
        if vals is None:
            raise ConfigError(f"scenario.{name}", "missing")
        if name == "v_m_s" and np.any(vals == 0):
            raise ConfigError("scenario.v_m_s", "v = 0 has no drag force; use 'asymptotic'")
    points = list(itertools.product(*axes))
    cfg.build_scenario(*points[0])    # validate once before fanning out
    base = cfg.to_dict()
    items = [(base, float(z), float(v), float(T)) for z, v, T in points]
    results = sweep(items, _sweep_eval, cfg.computation.workers)
    rows = []
    for (z, v, T), it in zip(points, results):
        row = {"z_nm": float(z), "v_m_s": float(v), "T_K": float(T), "ok": it.ok,
               "seconds": it.seconds, "message": it.error or ""}
        if it.ok:
            row.update({k: it.value[k] for k in ("mu", "mu_t", "mu_r", "mu_over_mu_qf",
                                                 "mu_over_mu_T", "regime", "error")})
        rows.append(row)
    return rows


def reference_velocity(z_range_nm, T_range):
    """v_c at the geometric centre of the (z, T) grid."""
    zc = math.sqrt(z_range_nm[0] * z_range_nm[-1]) * units.NM
    Tc = math.sqrt(T_range[0] * T_range[-1])
    return asy.v_c(zc, Tc)


def cmd_regime_map(cfg: RunConfig):
    """Regime labels on a z x T grid plus the two analytic boundary curves."""
    s = cfg.scenario
    if s.z_nm_range is None or s.T_K_range is None:
        raise ConfigError("scenario", "regime-map needs z_nm_range and T_K_range")
    atom, mat = cfg.build_atom(), cfg.build_material()
    z = cfg.axis_values("z_nm")
    T = cfg.axis_values("T_K")
    if cfg.computation.v_at_grid_centre or s.v_m_s is None:
        v = reference_velocity(z, T)
    else:
        v = float(s.v_m_s)
    rho = resistivity_rho(mat)
    lr = lambda_rho(rho)
    rows = []
    for t in T:
        for zz in z:
            rows.append({"series": "regime", "z_nm": float(zz), "T_K": float(t),
                         "value": asy.classify_regime(zz * units.NM, t, v, mat, atom)})
    zm = z * units.NM
    for name, Tb in (("boundary_qf_thermal", asy.boundary_qf_thermal(zm, v)),
                     ("boundary_thermal_vacuum", asy.boundary_thermal_vacuum(zm, lr))):
        for zz, t in zip(z, np.atleast_1d(Tb)):
            rows.append({"series": name, "z_nm": float(zz), "T_K": float(t), "value": ""})
    return {"v_m_s": v, "rows": rows}


def cmd_spectral_density(cfg: RunConfig):
    """eta / eta_lowfreq and T d_T rho / half-max on a log grid, with resonance markers."""
    _point_only(cfg)
    atom, mat = cfg.build_atom(), cfg.build_material()
    s = cfg.scenario
    r = s.omega_eV_range
    lo, hi = (1e-3, 20.0) if r is None else (r.start, r.stop)
    if s.T_K is None or not s.T_K > 0:
        raise ConfigError("scenario.T_K", "spectral-density needs T > 0")
    curves = sd.filter_curves(atom, mat, s.z_nm, s.T_K, lo, hi)
    markers = {"omega_a": atom.omega_a, "omega_sp": mat.surface_resonance()}
    marker_rows = []
    for name, w in markers.items():
        if w is not None and lo <= w <= hi:
            val = float(sd.eta_full(atom, mat, s.z_nm, w) / sd.eta_lowfreq(atom, mat, s.z_nm, w))
            marker_rows.append((w, val, f"marker_{name}"))
    return {"curves": curves, "markers": marker_rows, "metadata": curves[0].metadata}


def cmd_validate(criteria=None, rtol=None):
    checks = acceptance.run(criteria, rtol)
    return checks, acceptance.report(checks)


# --------------------------------------------------------------------------
# output

def _fmt(v, precision):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{precision}g}"
    return v


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def write_rows(rows, columns, fmt, precision, fh):
    if fmt == "json":
        json.dump(rows, fh, indent=2, default=_json_default)
        fh.write("\n")
        return
    w = csv.writer(fh)
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c, ""), precision) for c in columns])


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else None


def emit(cfg: RunConfig, payload, fh):
    fmt, prec = cfg.output.format, cfg.output.precision
    cmd = cfg.command
    if cmd in ("viscosity", "asymptotic"):
        if fmt == "json":
            write_rows(payload, None, "json", prec, fh)
        else:
            flat = {k: v for k, v in payload.items() if k != "scenarios" and k != "scales"}
            flat.update({f"scale_{k}": v for k, v in payload.get("scales", {}).items()})
            write_rows([flat], list(flat), "csv", prec, fh)
    elif cmd == "sweep":
        write_rows(payload, SWEEP_COLUMNS, fmt, prec, fh)
    elif cmd == "regime-map":
        if fmt == "json":
            write_rows(payload, None, "json", prec, fh)
        else:
            write_rows(payload["rows"], ("series", "z_nm", "T_K", "value"), "csv", prec, fh)
    elif cmd == "spectral-density":
        rows = [{"omega_eV": w, "value": v, "kind": k}
                for c in payload["curves"] for w, v, k in c.to_rows()]
        rows += [{"omega_eV": w, "value": v, "kind": k} for w, v, k in payload["markers"]]
        if fmt == "json":
            write_rows({"metadata": payload["metadata"], "rows": rows}, None, "json", prec, fh)
        else:
            write_rows(rows, ("omega_eV", "value", "kind"), "csv", prec, fh)


# --------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="emviscosity", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int)
    p.add_argument("--tol", type=float, help="relative tolerance of the frequency integral")
    p.add_argument("--route", choices=ROUTES)
    p.add_argument("--mode", choices=("full", "lte"))
    p.add_argument("--order", choices=("dressed", "leading"))
    p.add_argument("--criteria", help="comma-separated acceptance criteria for validate")
    return p


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            crit = None
            if args.criteria:
                crit = [int(c) for c in args.criteria.split(",")]
                bad = [c for c in crit if c not in acceptance.CRITERIA]
                if bad:
                    raise ConfigError("--criteria", f"unknown criterion {bad[0]}")
            checks, rep = cmd_validate(crit, args.tol)
            for c in checks:
                print(c.line(), file=sys.stderr)
            text = json.dumps(rep, indent=2, default=_json_default)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text, file=stdout)
            return EXIT_OK if rep["passed"] else EXIT_ACCEPTANCE

        cfg = RunConfig.load(args.config) if args.config else RunConfig.example()
        cfg.command = args.command
        cfg.apply_overrides(route=args.route, mode=args.mode, order=args.order, tol=args.tol,
                            workers=args.workers, out=args.out, format=args.format)
        handler = {"viscosity": cmd_viscosity, "asymptotic": cmd_asymptotic,
                   "sweep": cmd_sweep, "regime-map": cmd_regime_map,
                   "spectral-density": cmd_spectral_density}[cfg.command]
        try:
            payload = handler(cfg)
        except COMPUTE_ERRORS as exc:
            raise ComputationError(str(exc)) from exc
        fh = _open_out(cfg.output.path)
        buf = fh or io.StringIO()
        emit(cfg, payload, buf)
        if fh:
            fh.close()
        else:
            stdout.write(buf.getvalue())
        if cfg.command == "sweep" and not all(r["ok"] for r in payload):
            return EXIT_COMPUTE
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
