"""Command-line front end.

Exit status: 0 on success, 1 on input errors, 2 when a verification
tolerance is breached.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import exact, fv, grh, limits, weak
from .model import DomainError, Frame, NotApplicableError, RiemannSetup

COMMANDS = ("solve", "sample", "verify", "grh", "sweep-a0", "sweep-zero", "fv")
SETUP_FIELDS = ("rho_l", "u_l", "rho_r", "u_r", "A", "beta")
DEFAULTS = {
    "beta": 0.0,
    "t_end": 1.0,
    "dt": 1e-3,
    "cells": 2000,
    "cfl": 0.45,
    "quad_level": 24,
    "seed": 0,
    "n_psi": 10,
    "tol": None,
    "x_min": None,
    "x_max": None,
    "times": None,
    "nx": 201,
    "a_values": None,
    "window": 10,
}
ENV_OUT = "RIEMANN_AWR_OUT_DIR"


class ConfigError(ValueError):
    pass


def _f(v: float) -> str:
    return f"{float(v):.17g}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([c if isinstance(c, str) else _f(c) for c in row])


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


# -- config -----------------------------------------------------------------


def read_config_file(path) -> dict:
    """JSON object or ``key = value`` lines ('#' comments allowed)."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        return {k.replace("-", "_"): v for k, v in data.items()}
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v.strip("'\"")
    return out


def _number(name: str, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {name}: not a number ({value!r})") from None
    if not math.isfinite(x):
        raise ConfigError(f"field {name}: must be finite")
    return x


def _number_list(name: str, value) -> list[float]:
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [s for s in str(value).replace(";", ",").split(",") if s.strip()]
    return [_number(name, v) for v in items]


def build_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for k, v in vars(args).items():
        if k in ("config", "command") or v is None:
            continue
        cfg[k] = v
    cfg["command"] = args.command
    for k in SETUP_FIELDS:
        if cfg.get(k) is None:
            raise ConfigError(f"missing required field: {k}")
        cfg[k] = _number(k, cfg[k])
    for k in ("t_end", "dt", "cfl", "tol", "x_min", "x_max"):
        if cfg.get(k) is not None:
            cfg[k] = _number(k, cfg[k])
    for k in ("cells", "quad_level", "seed", "n_psi", "nx", "window"):
        cfg[k] = int(_number(k, cfg[k]))
    for k in ("times", "a_values"):
        if cfg.get(k) is not None:
            cfg[k] = _number_list(k, cfg[k])
    out = cfg.get("out_dir") or os.environ.get(ENV_OUT) or "riemann_out"
    cfg["out_dir"] = str(out)
    return cfg


def setup_from_config(cfg: dict) -> RiemannSetup:
    try:
        return RiemannSetup.from_values(*(cfg[k] for k in SETUP_FIELDS))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


# -- plot data --------------------------------------------------------------


def emit_plotdata(solution, t_list, x_grid, sample_path, paths_path, n_path: int = 201) -> None:
    """Sampled fields on the (t, x) grid and wave-path polylines."""
    t_list = [float(t) for t in t_list]
    if any(not t > 0 for t in t_list):
        raise ConfigError("field times: all sample times must be positive")
    rows = []
    for t in t_list:
        for x in x_grid:
            sp = exact.sample(solution, float(x), t)
            if sp.kind is exact.SampleKind.SMOOTH:
                rows.append((t, x, sp.state.rho, sp.state.vel, "0"))
            elif sp.kind is exact.SampleKind.ON_DELTA:
                rows.append((t, x, sp.weight, sp.u_delta, "1"))
            else:
                rows.append((t, x, 0.0, "", "0"))
    write_csv(sample_path, ["t", "x", "rho", "u", "on_delta"], rows)

    coeffs = solution.path_coefficients()
    names = ["x_delta"] if solution.delta is not None else [f"x{i + 1}" for i in range(len(coeffs))]
    beta = solution.params.beta
    ts = np.linspace(0.0, max(t_list), n_path)
    write_csv(
        paths_path,
        ["t"] + names,
        ([t] + [exact.path_position(c, t, beta) for c in coeffs] for t in ts),
    )


# -- commands ---------------------------------------------------------------


def _descriptor(setup: RiemannSetup, sol) -> dict:
    d = {"setup": {k: v for k, v in zip(SETUP_FIELDS, _setup_values(setup))}, "solution": exact.solution_to_dict(sol)}
    tp = exact.turning_point(sol)
    if tp is not None:
        d["turning_point"] = {"t": tp[0], "x": tp[1]}
    return d


def _setup_values(s: RiemannSetup):
    return s.rho_l, s.u_l, s.rho_r, s.u_r, s.params.A, s.params.beta


def cmd_solve(cfg, setup, out: Path) -> int:
    sol = exact.solve(setup)
    write_json(out / "summary.json", _descriptor(setup, sol))
    return 0


def cmd_sample(cfg, setup, out: Path) -> int:
    sol = exact.solve(setup)
    times = cfg["times"] or [0.25 * cfg["t_end"], 0.5 * cfg["t_end"], cfg["t_end"]]
    T = max(times)
    coeffs = sol.path_coefficients()
    reach = max([abs(c) for c in coeffs] + [abs(setup.u_l), abs(setup.u_r), 1.0]) * T
    reach += 0.5 * abs(setup.params.beta) * T * T
    x_min = cfg["x_min"] if cfg["x_min"] is not None else -1.5 * reach
    x_max = cfg["x_max"] if cfg["x_max"] is not None else 1.5 * reach
    x_grid = np.linspace(x_min, x_max, cfg["nx"])
    emit_plotdata(sol, times, x_grid, out / "plotdata.csv", out / "paths.csv")
    write_json(out / "summary.json", _descriptor(setup, sol))
    return 0


def cmd_verify(cfg, setup, out: Path) -> int:
    sol = exact.solve(setup)
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-7
    worst_f, rep_f = weak.residual_suite(sol, setup, cfg["n_psi"], cfg["seed"], cfg["quad_level"], Frame.FIXED)
    worst_m, rep_m = weak.residual_suite(sol, setup, cfg["n_psi"], cfg["seed"], cfg["quad_level"], Frame.MOVING)
    weak.write_residual_table(out / "residuals.csv", rep_f)
    weak.write_residual_table(out / "residuals_moving.csv", rep_m)
    summary = _descriptor(setup, sol)
    worst = max(worst_f, worst_m)
    summary["verify"] = {"worst_fixed": worst_f, "worst_moving": worst_m, "tolerance": tol, "pass": worst <= tol}
    write_json(out / "summary.json", summary)
    return 0 if worst <= tol else 2


def cmd_grh(cfg, setup, out: Path) -> int:
    sol = exact.solve(setup)
    if not isinstance(sol, exact.DeltaShock):
        raise NotApplicableError("grh needs delta-shock data (region III or S with A > 0)")
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-8
    traj = grh.integrate_grh(setup, cfg["t_end"], cfg["dt"])
    err = grh.compare_to_closed_form(traj, sol)
    write_csv(out / "trajectory.csv", ["t", "x", "w", "u_delta"], grh.trajectory_rows(traj))
    summary = _descriptor(setup, sol)
    summary["grh"] = {"dt": cfg["dt"], "t_end": cfg["t_end"], "max_rel_error": err, "tolerance": tol, "pass": err <= tol}
    write_json(out / "summary.json", summary)
    return 0 if err <= tol else 2


def cmd_sweep(cfg, setup, out: Path, kind: str) -> int:
    seq = cfg["a_values"]
    if kind == "sweep-a0":
        report = limits.sweep_to_A0(setup, seq)
    elif setup.u_l > setup.u_r:
        report = limits.sweep_to_zero(setup, seq)
    else:
        report = limits.vacuum_limit(setup, seq)
    report.write_csv(out / "sweep.csv")
    report.write_json(out / "sweep.json")
    summary = _descriptor(setup, exact.solve(setup)) if setup.params.A > 0 else {}
    summary["sweep"] = _finite(report.summary())
    write_json(out / "summary.json", summary)
    return 0 if report.passed else 2


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def cmd_fv(cfg, setup, out: Path) -> int:
    sol = exact.solve(setup)
    t_end = cfg["t_end"]
    coeffs = sol.path_coefficients()
    reach = max([abs(c) for c in coeffs] + [abs(setup.u_l), abs(setup.u_r), 1.0]) * t_end
    reach += 0.5 * abs(setup.params.beta) * t_end * t_end
    x_min = cfg["x_min"] if cfg["x_min"] is not None else -2.0 * reach
    x_max = cfg["x_max"] if cfg["x_max"] is not None else 2.0 * reach
    grid = fv.FvGrid(x_min, x_max, cfg["cells"], t_end, cfg["cfl"])
    times = sorted(set(cfg["times"] or [0.5 * t_end, t_end]))
    run = fv.run_fv(setup, grid, times)
    for snap in run.snapshots:
        snap.write_csv(out / f"fv_t{snap.time:.6g}.csv")
    locs = fv.compare_speeds(run.snapshots, sol)
    result = {
        "steps": run.steps,
        "rejected_steps": run.rejected,
        "cap_events": run.cap_events,
        "grid": {"x_min": x_min, "x_max": x_max, "cells": grid.n_cells, "cfl": grid.cfl},
        "waves": [
            [{"wave": w.wave, "x_exact": w.x_exact, "x_numeric": w.x_numeric, "error_cells": w.error_cells} for w in row]
            for row in locs
        ],
    }
    ok = all(w.detected and w.error_cells <= 5.0 for row in locs for w in row if w.wave != "delta")
    if sol.delta is not None:
        measured, predicted = fv.measure_concentration(run.field, sol, cfg["window"])
        rel = abs(measured - predicted) / predicted
        result["concentration"] = {"measured": measured, "predicted": predicted, "rel_error": rel}
        ok = ok and rel <= 0.2
    result["pass"] = ok
    summary = _descriptor(setup, sol)
    summary["fv"] = _finite(result)
    write_json(out / "summary.json", summary)
    return 0 if ok else 2


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="riemann-awr", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON or key=value file; flags override it")
    for name in ("rho-l", "u-l", "rho-r", "u-r"):
        p.add_argument(f"--{name}", type=float, dest=name.replace("-", "_"))
    p.add_argument("--A", type=float, dest="A")
    p.add_argument("--beta", type=float)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--cfl", type=float)
    p.add_argument("--quad-level", type=int, dest="quad_level")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-psi", type=int, dest="n_psi")
    p.add_argument("--tol", type=float)
    p.add_argument("--x-min", type=float, dest="x_min")
    p.add_argument("--x-max", type=float, dest="x_max")
    p.add_argument("--nx", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--times", help="comma-separated sample/snapshot times")
    p.add_argument("--a-values", dest="a_values", help="comma-separated A sequence for sweeps")
    p.add_argument("--out-dir", dest="out_dir")
    return p


def run(cfg: dict) -> int:
    setup = setup_from_config(cfg)
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    cmd = cfg["command"]
    if cmd == "solve":
        return cmd_solve(cfg, setup, out)
    if cmd == "sample":
        return cmd_sample(cfg, setup, out)
    if cmd == "verify":
        return cmd_verify(cfg, setup, out)
    if cmd == "grh":
        return cmd_grh(cfg, setup, out)
    if cmd in ("sweep-a0", "sweep-zero"):
        return cmd_sweep(cfg, setup, out, cmd)
    return cmd_fv(cfg, setup, out)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return run(cfg)
    except (ConfigError, DomainError, NotApplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
