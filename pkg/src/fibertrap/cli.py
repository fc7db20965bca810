"""Command-line front end: ``fibertrap {mode,potential,report,bound,sweep}``.

Parameters come from a ``key = value`` config file (``--config``; bundled
figure configs can be named directly, e.g. ``--config fig4``) and are
overridden by flags.  Boundary units are um, nm, mW and mK; SI inside.

Exit codes: 0 ok, 2 bad input, 3 no trap / multimode, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from importlib import resources
from typing import Optional

import numpy as np
from scipy import constants as csts

from . import __version__
from .analysis import analyze, find_minimum
from .atom import load_atom
from .bound import solve_bound_states
from .errors import (ConvergenceError, DomainError, FiberTrapError, InvalidInputError,
                     MultimodeError, NoGuidedModeError, NoTrapError)
from .modes import FiberSpec, solve_he11
from .potential import (CIRCULAR, LINEAR, TrapConfiguration, color_potentials,
                        optimize_blue_power, radial_grid, to_mk, vdw_potential)
from .vdw import vdw_flat, vdw_table

EXIT_OK, EXIT_INPUT, EXIT_NOTRAP, EXIT_CONVERGENCE = 0, 2, 3, 4
SWEEP_AXES = ("P1", "P2", "radius", "lambda1", "lambda2")


@dataclass
class RunConfig:
    atom: str = "cesium"
    radius_um: Optional[float] = None
    lambda1_um: Optional[float] = None
    lambda2_nm: Optional[float] = None
    p1_mw: Optional[float] = None
    p2_mw: Optional[float] = None
    pol: str = CIRCULAR
    vdw: bool = True
    vdw_only: bool = False
    points: int = 2000
    r_max_um: Optional[float] = None
    xy_points: int = 0
    xy_extent_um: float = 1.0
    cut_radius_um: Optional[float] = None
    phi_points: int = 361
    m: int = 0
    levels: int = 6
    bound_points: int = 4000
    axis: Optional[str] = None
    values: Optional[str] = None
    optimize_blue: bool = False
    jobs: int = 1
    out: Optional[str] = None
    wavefunctions: Optional[str] = None
    format: str = "json"

    def validate(self, need_modes: bool = True, need_powers: bool = True):
        if self.radius_um is None or not self.radius_um > 0:
            raise InvalidInputError("fiber radius (--radius-um) must be given and positive")
        if need_modes:
            required = ("lambda1_um", "lambda2_nm") + (("p1_mw", "p2_mw") if need_powers else ())
            missing = [n for n in required if getattr(self, n) is None]
            if missing:
                raise InvalidInputError("missing parameter(s): " + ", ".join(missing))
            if not self.lambda1_um * 1e3 > self.lambda2_nm:
                raise InvalidInputError("lambda1 (red) must be longer than lambda2 (blue)")
            if need_powers and (self.p1_mw < 0 or self.p2_mw < 0):
                raise InvalidInputError("powers must be non-negative")
        if self.pol not in (CIRCULAR, LINEAR):
            raise InvalidInputError(f"unknown polarization '{self.pol}'")
        if self.format not in ("json", "csv"):
            raise InvalidInputError(f"unknown format '{self.format}'")

    def trap(self) -> TrapConfiguration:
        return TrapConfiguration.build(
            load_atom(self.atom), self.radius_um * 1e-6, self.lambda1_um * 1e-6,
            self.lambda2_nm * 1e-9, self.p1_mw * 1e-3, self.p2_mw * 1e-3, self.pol, self.vdw)


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _coerce(name, raw):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    text = str(raw).strip()
    try:
        if "bool" in kind:
            return _BOOL[text.lower()]
        if "float" in kind:
            return float(text)
        if "int" in kind:
            return int(text)
    except (KeyError, ValueError):
        raise InvalidInputError(f"bad value for '{name}': {raw!r}") from None
    return text


def read_config(source: str) -> dict:
    """Parse a key = value file; ``source`` is a path or a bundled config name."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        res = resources.files("fibertrap") / "configs" / f"{source}.cfg"
        if not res.is_file():
            raise InvalidInputError(f"config '{source}' not found")
        text = res.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + text)
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in parser["run"].items():
        name = key.replace("-", "_")
        if name not in known:
            raise InvalidInputError(f"unknown config key '{key}'")
        out[name] = _coerce(name, value)
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.9g}"


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return None
        return float(f"{float(obj):.9g}")
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True) + "\n"


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- subcommands ------------------------------------------------------------------

def mode_summary(cfg: RunConfig) -> dict:
    fiber = FiberSpec(cfg.radius_um * 1e-6)
    rows = []
    for label, lam in (("red", cfg.lambda1_um * 1e-6), ("blue", cfg.lambda2_nm * 1e-9)):
        m = solve_he11(fiber, lam)
        rows.append({
            "label": label, "wavelength_um": lam * 1e6, "n1": m.n1, "V": m.v,
            "beta_per_um": m.beta * 1e-6, "neff": m.neff, "qa": m.q * m.radius,
            "ha": m.h * m.radius, "decay_length_um": m.decay_length * 1e6,
            "s": m.s, "w": m.w, "f": m.f, "xi": m.xi,
        })
    return {"radius_um": cfg.radius_um, "modes": rows}


MODE_COLUMNS = ("label", "wavelength_um", "n1", "V", "beta_per_um", "neff", "qa", "ha",
                "decay_length_um", "s", "w", "f", "xi")


def cmd_mode(cfg: RunConfig) -> int:
    cfg.validate(need_powers=False)
    summary = mode_summary(cfg)
    if cfg.format == "json":
        _emit(dumps(summary), cfg.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(MODE_COLUMNS)
        for row in summary["modes"]:
            w.writerow([row["label"]] + [_fmt(row[c]) for c in MODE_COLUMNS[1:]])
        _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def _vdw_profile(cfg: RunConfig) -> str:
    atom = load_atom(cfg.atom)
    fiber = FiberSpec(cfg.radius_um * 1e-6)
    a = fiber.radius
    table = vdw_table(atom, fiber)
    r_max = (cfg.r_max_um or cfg.radius_um + 1.0) * 1e-6
    r = a + np.geomspace(a * 1e-4, r_max - a, cfg.points)
    d = r - a
    v = table(r)
    vf = vdw_flat(table.c3, d)
    rows = zip(r * 1e6, d * 1e6, to_mk(v), to_mk(vf), v / vf)
    return write_csv(["r_um", "D_um", "V_vdw_mK", "V_flat_mK", "V_over_V_flat"], rows)


def potential_files(cfg: RunConfig, trap: TrapConfiguration) -> dict:
    """Name -> CSV text for every profile this config asks for."""
    a = trap.radius
    r = radial_grid(trap, cfg.points) if cfg.r_max_um is None else \
        a + np.geomspace(a * 1e-4, cfg.r_max_um * 1e-6 - a, cfg.points)
    header = ["r_um", "D_um", "U1_mK", "U2_mK", "U_net_mK", "V_vdw_mK", "U_tot_mK"]
    v = vdw_potential(trap, r)
    files = {}
    cuts = [("radial", 0.0)] if trap.scheme == CIRCULAR else [("radial_x", 0.0), ("radial_y", np.pi / 2)]
    for name, phi in cuts:
        u1, u2 = color_potentials(trap, r, phi)
        rows = zip(r * 1e6, (r - a) * 1e6, to_mk(u1), to_mk(u2), to_mk(u1 + u2), to_mk(v), to_mk(u1 + u2 + v))
        files[name] = write_csv(header, rows)

    cut_r = (cfg.cut_radius_um or 0.4) * 1e-6
    phi = np.linspace(0, 2 * np.pi, cfg.phi_points)
    u1, u2 = color_potentials(trap, np.full_like(phi, cut_r), phi)
    u_tot = u1 + u2 + vdw_potential(trap, np.full_like(phi, cut_r))
    files["azimuthal"] = write_csv(["phi_rad", "U_tot_mK"], zip(phi, to_mk(u_tot)))

    if cfg.xy_points > 0:
        x = np.linspace(-cfg.xy_extent_um, cfg.xy_extent_um, cfg.xy_points) * 1e-6
        xx, yy = np.meshgrid(x, x, indexing="ij")
        rr, pp = np.hypot(xx, yy), np.arctan2(yy, xx)
        outside = rr > a * (1 + 1e-4)
        u = np.full(rr.shape, np.nan)
        u1, u2 = color_potentials(trap, rr[outside], pp[outside])
        u[outside] = to_mk(u1 + u2 + vdw_potential(trap, rr[outside]))
        rows = zip(xx.ravel() * 1e6, yy.ravel() * 1e6, u.ravel())
        files["xy"] = write_csv(["x_um", "y_um", "U_tot_mK"], rows)
    return files


def cmd_potential(cfg: RunConfig) -> int:
    if cfg.vdw_only:
        cfg.validate(need_modes=False)
        _emit(_vdw_profile(cfg), cfg.out)
        return EXIT_OK
    cfg.validate()
    trap = cfg.trap()
    files = potential_files(cfg, trap)
    if cfg.out is None:
        first = "radial" if "radial" in files else "radial_x"
        sys.stdout.write(files[first])
    else:
        os.makedirs(cfg.out, exist_ok=True)
        for name in sorted(files):
            _emit(files[name], os.path.join(cfg.out, f"{name}.csv"))
    try:
        find_minimum(trap)
    except NoTrapError:
        print("no-minimum: the total potential has no trap outside the fiber", file=sys.stderr)
        return EXIT_NOTRAP
    return EXIT_OK


def _config_echo(cfg: RunConfig) -> dict:
    return {"atom": cfg.atom, "radius_um": cfg.radius_um, "lambda1_um": cfg.lambda1_um,
            "lambda2_nm": cfg.lambda2_nm, "p1_mw": cfg.p1_mw, "p2_mw": cfg.p2_mw,
            "pol": cfg.pol, "vdw": cfg.vdw}


def cmd_report(cfg: RunConfig) -> int:
    cfg.validate()
    trap = cfg.trap()
    try:
        report = analyze(trap)
    except NoTrapError as exc:
        _emit(dumps({"config": _config_echo(cfg), "trap": False, "reason": str(exc)}), cfg.out)
        return EXIT_NOTRAP
    d1, d2 = trap.detunings()
    payload = {"config": _config_echo(cfg), "trap": True, "report": report.to_dict(),
               "detuning_red_THz": d1 * 1e-12, "detuning_blue_THz": d2 * 1e-12}
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def cmd_bound(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.pol != CIRCULAR:
        raise InvalidInputError("bound states need --pol circular")
    states = solve_bound_states(cfg.trap(), m=cfg.m, n_levels=cfg.levels, points=cfg.bound_points)
    _emit(dumps({"config": _config_echo(cfg), "bound_states": states.to_dict()}), cfg.out)
    if cfg.wavefunctions:
        _emit(states.wavefunctions_csv(), cfg.wavefunctions)
    return EXIT_OK


def parse_values(text: Optional[str]):
    """``"25,27,30"`` or ``"start:stop:num"`` (inclusive linspace)."""
    if not text:
        raise InvalidInputError("sweep needs --values")
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            vals = np.linspace(float(start), float(stop), int(num)).tolist()
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInputError(f"cannot parse sweep values {text!r}") from None
    if not vals:
        raise InvalidInputError("empty sweep range")
    return vals


_AXIS_FIELD = {"P1": "p1_mw", "P2": "p2_mw", "radius": "radius_um",
               "lambda1": "lambda1_um", "lambda2": "lambda2_nm"}
SWEEP_COLUMNS = ["index", "value", "p1_mw", "p2_mw", "trap", "r_m_um", "phi_m_rad", "depth_mK",
                 "gamma_red_per_s", "gamma_blue_per_s", "tau_coh_ms", "tau_trap_s", "nu_r_kHz", "nu_phi_kHz",
                 "l_r_nm", "l_phi_nm", "barrier_mK"]


def sweep_row(cfg: RunConfig, index: int, value: float) -> list:
    point = replace(cfg, **{_AXIS_FIELD[cfg.axis]: value})
    base = [index, value]
    try:
        point.validate()
        trap = point.trap()
        if cfg.optimize_blue:
            p2 = optimize_blue_power(trap)
            point = replace(point, p2_mw=p2 * 1e3)
            trap = trap.with_powers(p_blue=p2)
        rep = analyze(trap).to_dict()
    except (NoTrapError, MultimodeError, NoGuidedModeError):
        return base + [point.p1_mw, point.p2_mw, 0] + [None] * (len(SWEEP_COLUMNS) - 5)
    return base + [point.p1_mw, point.p2_mw, 1, rep["r_m_um"], rep["phi_m"], rep["depth_mK"],
                   rep["gamma_red"], rep["gamma_blue"], rep["tau_coh_ms"], rep["tau_trap"],
                   rep["nu_r_kHz"], rep["nu_phi_kHz"], rep["l_r_nm"], rep["l_phi_nm"],
                   rep["barrier_mK"]]


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.axis not in SWEEP_AXES:
        raise InvalidInputError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}")
    values = parse_values(cfg.values)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(lambda iv: sweep_row(cfg, *iv), enumerate(values)))
    else:
        rows = [sweep_row(cfg, i, v) for i, v in enumerate(values)]
    _emit(write_csv(SWEEP_COLUMNS, rows), cfg.out)
    return EXIT_OK


COMMANDS = {"mode": cmd_mode, "potential": cmd_potential, "report": cmd_report,
            "bound": cmd_bound, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("trap parameters")
    g.add_argument("--config", help="key = value file, or a bundled name such as fig4")
    g.add_argument("--atom", help="bundled species name or path to an atom data file")
    g.add_argument("--radius-um", type=float)
    g.add_argument("--lambda1-um", type=float, help="red-detuned wavelength")
    g.add_argument("--lambda2-nm", type=float, help="blue-detuned wavelength")
    g.add_argument("--p1-mw", type=float)
    g.add_argument("--p2-mw", type=float)
    g.add_argument("--pol", choices=(CIRCULAR, LINEAR))
    g.add_argument("--no-vdw", dest="vdw", action="store_const", const=False)
    g.add_argument("--out", help="output file (directory for 'potential')")
    g.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="fibertrap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mode", parents=[common], help="HE11 mode parameters for both colors")
    p = sub.add_parser("potential", parents=[common], help="radial, azimuthal and 2D potential CSVs")
    p.add_argument("--points", type=int)
    p.add_argument("--r-max-um", type=float)
    p.add_argument("--xy-points", type=int)
    p.add_argument("--xy-extent-um", type=float)
    p.add_argument("--cut-radius-um", type=float)
    p.add_argument("--phi-points", type=int)
    p.add_argument("--vdw-only", action="store_const", const=True)
    sub.add_parser("report", parents=[common], help="trap report as JSON")
    b = sub.add_parser("bound", parents=[common], help="radial bound states")
    b.add_argument("--m", type=int)
    b.add_argument("--levels", type=int)
    b.add_argument("--bound-points", type=int)
    b.add_argument("--wavefunctions", help="CSV path for the wavefunctions")
    s = sub.add_parser("sweep", parents=[common], help="trap reports along one parameter")
    s.add_argument("--axis", choices=SWEEP_AXES)
    s.add_argument("--values", help="comma list or start:stop:num")
    s.add_argument("--optimize-blue", action="store_const", const=True)
    s.add_argument("--jobs", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    known = {f.name for f in fields(RunConfig)}
    for key, value in vars(args).items():
        if key in known and value is not None:
            values[key] = value
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (MultimodeError, NoGuidedModeError, NoTrapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOTRAP
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InvalidInputError, DomainError, FiberTrapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
