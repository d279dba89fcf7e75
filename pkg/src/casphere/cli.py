r"""Command line front end.

Subcommands: ``compute`` (one point), ``sweep`` (separation scan),
``fit-beta`` (PFA-correction slope extraction), ``pfa`` (proximity
quantities), ``limits`` (closed-form anchors), ``ratio`` (plasma/Drude
dissipation ratio scan).  Lengths, temperatures and energies take explicit
unit suffixes (um, nm, K, eV); ranges are ``start:stop[unit][:log20|lin20]``.
Output is CSV (fixed column order, fixed float format) or JSON; identical
configurations produce byte-identical files.
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import e as E_CHARGE
from scipy.constants import hbar as HBAR

from .analysis import (
    dissipation_ratio,
    dissipation_ratio_pfa,
    fit_beta,
    rho_series,
    theta_factor,
)
from .materials import MirrorSpec, mirror_from_dict
from .pfa import f_alpha, ld_free_energy_perfect, pfa_energy, pfa_force, pfa_gradient, phi_thermal, pp_energy_per_area
from .roundtrip import CasphereError, ComputeConfig, Geometry
from .spectrum import energy_T0, entropy, force, force_gradient, free_energy

__all__ = ["main"]

_CSV_COLUMNS = [
    "radius_m",
    "separation_m",
    "temperature_K",
    "sphere",
    "plane",
    "quantity",
    "value",
    "unit",
    "lmax",
    "nmax",
    "nk",
    "est_rel_err",
]

_LENGTH_UNITS = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}


def _parse_length(text: str) -> float:
    match = re.fullmatch(r"\s*([-+0-9.eE]+)\s*(m|mm|um|nm)\s*", text)
    if not match:
        raise CasphereError(f"cannot parse length {text!r}; expected e.g. 0.5um, 136nm")
    return float(match.group(1)) * _LENGTH_UNITS[match.group(2)]


def _parse_temperature(text: str) -> float:
    match = re.fullmatch(r"\s*([-+0-9.eE]+)\s*(K?)\s*", text)
    if not match:
        raise CasphereError(f"cannot parse temperature {text!r}; expected e.g. 300K")
    value = float(match.group(1))
    if value < 0.0:
        raise CasphereError("temperature must be nonnegative")
    return value


def _parse_frequency(text: str) -> float:
    """Angular frequency in rad/s from eV or rad/s suffix."""
    match = re.fullmatch(r"\s*([-+0-9.eE]+)\s*(eV|rad/s)\s*", text)
    if not match:
        raise CasphereError(f"cannot parse frequency {text!r}; expected e.g. 9eV")
    value = float(match.group(1))
    if match.group(2) == "eV":
        return value * E_CHARGE / HBAR
    return value


def _parse_range(text: str, parse_value, default_n: int = 20):
    """start:stop[unit][:log20|lin20] -> array of points."""
    parts = text.split(":")
    if len(parts) == 2:
        spec = f"log{default_n}"
    elif len(parts) == 3:
        spec = parts[2]
    else:
        raise CasphereError(f"cannot parse range {text!r}; expected start:stop[:log20]")
    match = re.fullmatch(r"(log|lin)?(\d+)", spec)
    if not match:
        raise CasphereError(f"cannot parse range spacing {spec!r}")
    kind = match.group(1) or "log"
    count = int(match.group(2))
    if count < 2:
        raise CasphereError("ranges need at least 2 points")
    stop = parse_value(parts[1])
    # a bare first token inherits the unit of the second
    try:
        start = parse_value(parts[0])
    except CasphereError:
        tail = re.sub(r"^[-+0-9.eE]+", "", parts[1])
        start = parse_value(parts[0] + tail)
    if start <= 0.0 or stop <= start:
        raise CasphereError("ranges must be positive and increasing")
    if kind == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _parse_scalar_or_unitless(text: str, parse_value):
    try:
        return parse_value(text)
    except CasphereError:
        return float(text)


def _parse_material(text: str) -> MirrorSpec:
    """'perfect', 'plasma:lambdaP=136nm', 'drude:lambdaP=...,lambdaGamma=...' or JSON."""
    text = text.strip()
    if text.startswith("{"):
        return mirror_from_dict(json.loads(text))
    if text == "perfect":
        return MirrorSpec.perfect()
    match = re.fullmatch(r"(plasma|drude):(.+)", text)
    if not match:
        raise CasphereError(f"cannot parse material {text!r}")
    kind = match.group(1)
    params = {}
    for item in match.group(2).split(","):
        key, _, raw = item.partition("=")
        key = key.strip()
        if key in ("lambdaP", "lambda_p"):
            params["lambda_p"] = _parse_length(raw)
        elif key in ("lambdaGamma", "lambda_gamma"):
            params["lambda_gamma"] = _parse_length(raw)
        elif key in ("omegaP", "omega_p"):
            params["omega_p"] = _parse_frequency(raw)
        elif key == "gamma":
            params["gamma"] = _parse_frequency(raw)
        else:
            raise CasphereError(f"unknown material parameter {key!r}")
    if kind == "plasma":
        params.pop("lambda_gamma", None)
        params.pop("gamma", None)
        return MirrorSpec.plasma(**params)
    return MirrorSpec.drude(**params)


def _mirror_label(m: MirrorSpec) -> str:
    if m.kind == "perfect":
        return "perfect"
    if m.kind == "plasma":
        return f"plasma(lambda_P={m.lambda_p:.6e}m)"
    lam_g = 2.0 * math.pi * C_LIGHT / m.gamma
    return f"drude(lambda_P={m.lambda_p:.6e}m,lambda_gamma={lam_g:.6e}m)"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12e}"
    return str(value)


def _emit_rows(rows: list[dict], fmt: str, out_path: str | None):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in _CSV_COLUMNS])
        text = buf.getvalue()
    else:
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out_path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_from_args(args) -> ComputeConfig:
    kwargs = {}
    if getattr(args, "lmax", None) is not None:
        kwargs["lmax"] = args.lmax
    if getattr(args, "nquad", None) is not None:
        kwargs["n_quad"] = args.nquad
    if getattr(args, "rel_tol", None) is not None:
        kwargs["rel_tol"] = args.rel_tol
    if getattr(args, "nxi", None) is not None:
        kwargs["n_xi"] = args.nxi
    return ComputeConfig(**kwargs)


def _materials_from_args(args) -> tuple[MirrorSpec, MirrorSpec]:
    base = _parse_material(args.material) if args.material else MirrorSpec.perfect()
    sphere = _parse_material(args.sphere) if getattr(args, "sphere", None) else base
    plane = _parse_material(args.plane) if getattr(args, "plane", None) else base
    return sphere, plane


def _compute_one(task):
    """One (quantity, geometry, materials, T, config) evaluation -> row dict."""
    quantity, radius, separation, sphere, plane, temperature, config, diag = task
    geom = Geometry(radius, separation)
    collect_cfg = config
    if diag and quantity == "energy":
        collect_cfg = dataclasses.replace(config, keep_terms=True)
    if quantity == "energy":
        if temperature == 0.0:
            res = energy_T0(geom, sphere, plane, collect_cfg)
        else:
            res = free_energy(geom, sphere, plane, temperature, collect_cfg)
    elif quantity == "force":
        res = force(geom, sphere, plane, temperature, config)
    elif quantity == "gradient":
        res = force_gradient(geom, sphere, plane, temperature, config)
    elif quantity == "entropy":
        res = entropy(geom, sphere, plane, temperature, config)
    elif quantity == "theta":
        value = theta_factor(geom, sphere, plane, temperature, config)
        lmax = config.resolved_lmax(geom)
        row = {
            "radius_m": radius,
            "separation_m": separation,
            "temperature_K": temperature,
            "sphere": _mirror_label(sphere),
            "plane": _mirror_label(plane),
            "quantity": "theta",
            "value": value,
            "unit": "1",
            "lmax": lmax,
            "nmax": 0,
            "nk": config.resolved_n_quad(lmax),
            "est_rel_err": config.rel_tol,
        }
        return row, None
    else:
        raise CasphereError(f"unknown quantity {quantity!r}")
    row = {
        "radius_m": res.radius,
        "separation_m": res.separation,
        "temperature_K": res.temperature,
        "sphere": _mirror_label(sphere),
        "plane": _mirror_label(plane),
        "quantity": quantity,
        "value": res.value,
        "unit": res.unit,
        "lmax": res.lmax,
        "nmax": res.nmax,
        "nk": res.n_quad,
        "est_rel_err": res.est_rel_err,
    }
    return row, res.terms


def _write_diagnostics(path: str, terms):
    with open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["xi_rad_s", "m", "logdet"])
        for xi, m, ld in terms:
            writer.writerow([f"{xi:.12e}", m, f"{ld:.12e}"])


def _cmd_compute(args) -> int:
    sphere, plane = _materials_from_args(args)
    config = _config_from_args(args)
    temperature = _parse_temperature(args.T)
    task = (
        args.quantity,
        _parse_length(args.R),
        _parse_length(args.L),
        sphere,
        plane,
        temperature,
        config,
        bool(args.emit_diagnostics),
    )
    row, terms = _compute_one(task)
    if args.emit_diagnostics:
        if terms is None:
            raise CasphereError("--emit-diagnostics requires --quantity energy")
        _write_diagnostics(args.emit_diagnostics, terms)
    if args.format == "csv":
        _emit_rows([row], "csv", args.output)
    else:
        _emit_json(row, args.output)
    return 0


def _cmd_sweep(args) -> int:
    sphere, plane = _materials_from_args(args)
    config = _config_from_args(args)
    temperature = _parse_temperature(args.T)
    radius = _parse_length(args.R)
    seps = _parse_range(args.L, _parse_length)
    tasks = [
        (args.quantity, radius, float(sep), sphere, plane, temperature, config, False)
        for sep in seps
    ]
    rows = [pair[0] for pair in _map_tasks(tasks, args.threads)]
    _emit_rows(rows, args.format, args.output)
    return 0


def _map_tasks(tasks, threads: int):
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_compute_one, tasks))
    return [_compute_one(t) for t in tasks]


def _cmd_fit_beta(args) -> int:
    sphere, plane = _materials_from_args(args)
    config = _config_from_args(args)
    temperature = _parse_temperature(args.T)
    radius = _parse_length(args.R) if args.R else 1e-6
    aspects = _parse_range(args.aspect, float)
    kind = {"energy": "E", "force": "F", "gradient": "G"}[args.quantity]
    series = rho_series(radius, aspects, sphere, plane, temperature, kind, config)
    window = None
    if args.window:
        lo, hi = args.window.split(":")
        window = (float(lo), float(hi))
    fit = fit_beta(series, window)
    payload = {
        "command": "fit-beta",
        "quantity": args.quantity,
        "radius_m": radius,
        "temperature_K": temperature,
        "sphere": _mirror_label(sphere),
        "plane": _mirror_label(plane),
        "beta": fit.beta,
        "gamma": fit.gamma_curv,
        "window": list(fit.window),
        "residual": fit.residual,
        "sensitivity": fit.sensitivity,
        "stable": fit.stable,
        "n_points": fit.n_points,
        "series": [[float(x), float(r)] for x, r in zip(series.x, series.rho)],
    }
    _emit_json(payload, args.output)
    return 0


def _cmd_pfa(args) -> int:
    sphere, plane = _materials_from_args(args)
    temperature = _parse_temperature(args.T)
    radius = _parse_length(args.R)
    gap = _parse_length(args.L)
    quantity = args.quantity
    if quantity == "energy":
        value, unit = pfa_energy(sphere, plane, radius, gap, temperature), "J"
    elif quantity == "force":
        value, unit = pfa_force(sphere, plane, radius, gap, temperature), "N"
    elif quantity == "gradient":
        value, unit = pfa_gradient(sphere, plane, radius, gap, temperature), "N/m"
    elif quantity == "pp-energy":
        value, unit = pp_energy_per_area(sphere, plane, gap, temperature), "J/m^2"
    else:
        raise CasphereError(f"unknown pfa quantity {quantity!r}")
    row = {
        "radius_m": radius,
        "separation_m": gap,
        "temperature_K": temperature,
        "sphere": _mirror_label(sphere),
        "plane": _mirror_label(plane),
        "quantity": f"pfa_{quantity}",
        "value": value,
        "unit": unit,
        "lmax": 0,
        "nmax": 0,
        "nk": 120,
        "est_rel_err": 1e-10,
    }
    if args.format == "csv":
        _emit_rows([row], "csv", args.output)
    else:
        _emit_json(row, args.output)
    return 0


def _cmd_limits(args) -> int:
    temperature = _parse_temperature(args.T)
    radius = _parse_length(args.R)
    gap = _parse_length(args.L)
    center = radius + gap
    from scipy.constants import k as K_B

    nu = 2.0 * math.pi * center * K_B * temperature / (HBAR * C_LIGHT)
    payload = {
        "command": "limits",
        "radius_m": radius,
        "separation_m": gap,
        "center_distance_m": center,
        "temperature_K": temperature,
        "nu": nu,
        "phi": phi_thermal(nu) if nu > 0.0 else None,
        "ld_free_energy_J": ld_free_energy_perfect(radius, center, temperature),
        "pp_perfect_T0_J_per_m2": -math.pi**2 * HBAR * C_LIGHT / (720.0 * gap**3),
    }
    if args.lambdaP:
        lam_p = _parse_length(args.lambdaP)
        alpha = 2.0 * math.pi * radius / lam_p
        payload["alpha"] = alpha
        payload["f_alpha"] = f_alpha(alpha)
    _emit_json(payload, args.output)
    return 0


def _ratio_one(task):
    radius, sep, temperature, plasma, drude, config = task
    geom = Geometry(radius, sep)
    r_sp = dissipation_ratio(geom, temperature, plasma, drude, config)
    r_pp = dissipation_ratio_pfa(temperature, plasma, drude, sep)
    return r_sp, r_pp


def _cmd_ratio(args) -> int:
    temperature = _parse_temperature(args.T)
    radius = _parse_length(args.R)
    lam_p = _parse_length(args.lambdaP)
    lam_g = _parse_length(args.lambdaGamma)
    plasma = MirrorSpec.plasma(lambda_p=lam_p)
    drude = MirrorSpec.drude(lambda_p=lam_p, lambda_gamma=lam_g)
    config = _config_from_args(args)
    seps = _parse_range(args.L, _parse_length)
    tasks = [(radius, float(s), temperature, plasma, drude, config) for s in seps]
    if args.threads and args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_ratio_one, tasks))
    else:
        results = [_ratio_one(t) for t in tasks]
    alpha = 2.0 * math.pi * radius / lam_p
    rows = []
    for (rad, sep, temp, _, _, cfg), (r_sp, r_pp) in zip(tasks, results):
        lmax = cfg.resolved_lmax(Geometry(rad, sep))
        common = {
            "radius_m": rad,
            "separation_m": sep,
            "temperature_K": temp,
            "sphere": _mirror_label(plasma),
            "plane": _mirror_label(drude),
            "unit": "1",
            "lmax": lmax,
            "nmax": 0,
            "nk": cfg.resolved_n_quad(lmax),
            "est_rel_err": cfg.rel_tol,
        }
        rows.append({**common, "quantity": "dissipation_ratio", "value": r_sp})
        rows.append({**common, "quantity": "dissipation_ratio_pfa", "value": r_pp})
    rows.append(
        {
            "radius_m": radius,
            "separation_m": 0.0,
            "temperature_K": temperature,
            "sphere": _mirror_label(plasma),
            "plane": _mirror_label(drude),
            "quantity": "f_alpha",
            "value": f_alpha(alpha),
            "unit": "1",
            "lmax": 0,
            "nmax": 0,
            "nk": 0,
            "est_rel_err": 0.0,
        }
    )
    _emit_rows(rows, args.format, args.output)
    return 0


def _add_common(parser, with_quantity=True, with_material=True):
    if with_quantity:
        parser.add_argument(
            "--quantity",
            default="energy",
            choices=["energy", "force", "gradient", "entropy", "theta"],
        )
    if with_material:
        parser.add_argument("--material", default="perfect", help="both mirrors, e.g. perfect")
        parser.add_argument("--sphere", default=None, help="override sphere mirror")
        parser.add_argument("--plane", default=None, help="override plane mirror")
    parser.add_argument("--T", default="0", help="temperature, e.g. 300K")
    parser.add_argument("--lmax", type=int, default=None)
    parser.add_argument("--nquad", type=int, default=None)
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    parser.add_argument("--nxi", type=int, default=None)
    parser.add_argument("--output", default=None)
    parser.add_argument("--format", default=None, choices=["csv", "json"])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casphere",
        description="Casimir interaction of a sphere facing a plane",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="one configuration, one quantity")
    _add_common(p)
    p.add_argument("--R", required=True, help="sphere radius, e.g. 0.2um")
    p.add_argument("--L", required=True, help="surface gap, e.g. 1um")
    p.add_argument("--emit-diagnostics", default=None, metavar="PATH")

    p = sub.add_parser("sweep", help="scan the separation")
    _add_common(p)
    p.add_argument("--R", required=True)
    p.add_argument("--L", required=True, help="range start:stop[unit][:log20]")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("fit-beta", help="extract the PFA correction slope")
    _add_common(p)
    p.add_argument("--R", default=None, help="sphere radius (default 1um)")
    p.add_argument("--aspect", required=True, help="aspect range, e.g. 0.05:0.4:log20")
    p.add_argument("--window", default=None, help="fit window lo:hi in aspect ratio")

    p = sub.add_parser("pfa", help="proximity force approximation quantities")
    p.add_argument(
        "--quantity",
        default="energy",
        choices=["energy", "force", "gradient", "pp-energy"],
    )
    p.add_argument("--material", default="perfect")
    p.add_argument("--sphere", default=None)
    p.add_argument("--plane", default=None)
    p.add_argument("--T", default="0")
    p.add_argument("--R", required=True)
    p.add_argument("--L", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--format", default=None, choices=["csv", "json"])

    p = sub.add_parser("limits", help="closed-form anchor values")
    p.add_argument("--R", required=True)
    p.add_argument("--L", required=True)
    p.add_argument("--T", default="0")
    p.add_argument("--lambdaP", default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser("ratio", help="plasma over Drude force ratio scan")
    p.add_argument("--R", required=True)
    p.add_argument("--lambdaP", required=True)
    p.add_argument("--lambdaGamma", required=True)
    p.add_argument("--T", default="300K")
    p.add_argument("--L", required=True, help="range start:stop[unit][:log20]")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--nquad", type=int, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    p.add_argument("--nxi", type=int, default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--format", default=None, choices=["csv", "json"])
    return parser


_DEFAULT_FORMATS = {
    "compute": "json",
    "sweep": "csv",
    "fit-beta": "json",
    "pfa": "json",
    "limits": "json",
    "ratio": "csv",
}

_HANDLERS = {
    "compute": _cmd_compute,
    "sweep": _cmd_sweep,
    "fit-beta": _cmd_fit_beta,
    "pfa": _cmd_pfa,
    "limits": _cmd_limits,
    "ratio": _cmd_ratio,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None and hasattr(args, "format"):
        args.format = _DEFAULT_FORMATS[args.command]
    try:
        return _HANDLERS[args.command](args)
    except (CasphereError, ValueError, OSError) as exc:
        report = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
