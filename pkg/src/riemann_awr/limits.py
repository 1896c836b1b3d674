"""Vanishing-pressure sweeps: A -> A0 (delta formation) and A -> 0 (transport limit)."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .exact import DeltaShock, TransportKind, TwoContacts, path_position, solve, solve_transport
from .model import DomainError, NotApplicableError, RiemannSetup
from .phase_plane import Region, thresholds

SLOPE_BAND = (0.9, 1.1)


@dataclass
class LimitSweepReport:
    kind: str
    A_values: list[float]
    records: list[dict]
    targets: dict
    errors: dict[str, list[float]]
    slopes: dict[str, float] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "targets": self.targets,
            "slopes": self.slopes,
            "checks": self.checks,
            "pass": self.passed,
        }

    def write_csv(self, path) -> None:
        keys = ["A", "region", "rho_star", "v_delta", "w0"]
        err_keys = sorted(self.errors)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(keys + [f"err_{k}" for k in err_keys])
            for i, rec in enumerate(self.records):
                row = [_fmt(rec.get(k)) for k in keys]
                row += [_fmt(self.errors[k][i]) for k in err_keys]
                wr.writerow(row)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def loglog_slope(A, err) -> float:
    """Least-squares slope of log(err) against log(A); nan if too few positive errors."""
    A = np.asarray(A, dtype=float)
    err = np.asarray(err, dtype=float)
    ok = err > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(A[ok]), np.log(err[ok]), 1)[0])


def eventually_decreasing(err, tail: int | None = None) -> bool:
    """Non-increasing over the last ``tail`` entries (default: the second half)."""
    err = list(err)
    if tail is None:
        tail = max(2, len(err) // 2)
    e = err[-tail:]
    return all(b <= a for a, b in zip(e, e[1:]))


def contact_gap(solution: TwoContacts, t: float) -> float:
    """x2(t) - x1(t); the beta t^2/2 shifts cancel identically."""
    return (solution.j2_speed0 - solution.j1_speed0) * t


def mass_between_contacts(solution: TwoContacts, t: float) -> float:
    """Integral of rho* over the intermediate state at time t; equals A t."""
    return solution.intermediate.rho * contact_gap(solution, t)


def default_a0_sequence(A0: float, A1: float, n: int = 20) -> list[float]:
    return [A0 + (A1 - A0) * 2.0 ** (-j) for j in range(1, n + 1)]


def default_zero_sequence(A0: float, n: int = 20) -> list[float]:
    return [A0 * 2.0 ** (-j) for j in range(1, n + 1)]


def sweep_to_A0(setup: RiemannSetup, A_sequence=None, probe_time: float = 1.0) -> LimitSweepReport:
    """Follow the two-contact solution as A decreases to A0 = rho-(u- - u+).

    The intermediate density blows up like A rho-/(A - A0) while its mass
    stays A t, so the limit is the delta shock of the boundary S with
    v_delta = u+ and w0 = A0.
    """
    th = thresholds(setup)
    if th.degenerate:
        raise NotApplicableError("A0 sweep needs u+ > 0 so that A0 < A1")
    A0, A1 = th.A0, th.A1
    A_values = list(A_sequence) if A_sequence is not None else default_a0_sequence(A0, A1)
    for A in A_values:
        if not A0 < A < A1:
            raise DomainError(f"A={A!r} outside (A0, A1) = ({A0!r}, {A1!r})")
    beta, ur, rl = setup.params.beta, setup.u_r, setup.rho_l
    t = probe_time
    records, errs = [], {"sigma": [], "mass": [], "momentum": [], "identity": []}
    for A in A_values:
        sol = solve(setup.with_params(A=A))
        if not isinstance(sol, TwoContacts) or sol.region is not Region.REGION_II:
            raise DomainError(f"A={A!r} does not give a region II solution")
        rho_star = sol.intermediate.rho
        mass = mass_between_contacts(sol, t)
        mom = (sol.intermediate.vel + beta * t) * mass
        s1 = [sol.j1_speed0, sol.j1_speed0 + beta * t]
        s2 = [sol.j2_speed0, sol.j2_speed0 + beta * t]
        target = [ur, ur + beta * t]
        errs["sigma"].append(max(abs(a - b) for a, b in zip(s1 + s2, target + target)))
        errs["mass"].append(abs(mass - A0 * t))
        errs["momentum"].append(abs(mom - (ur + beta * t) * A0 * t))
        errs["identity"].append(abs(mass - A * t) / (A * t))
        records.append(
            {
                "A": A,
                "region": sol.region.value,
                "rho_star": rho_star,
                "blowup_ratio": rho_star * (A - A0) / A,
                "sigma1_0": sol.j1_speed0,
                "sigma2_0": sol.j2_speed0,
                "mass": mass,
                "momentum": mom,
                "width": path_position(sol.j2_speed0, t, beta) - path_position(sol.j1_speed0, t, beta),
            }
        )

    # limit objects: w(t) = A0 t, u_d(t) = u+ + beta t, x(t) = u+ t + beta t^2/2
    limit = {"v_delta": ur, "w0": A0}
    at_A0 = solve(setup.with_params(A=A0), tol=1e-12)
    if not isinstance(at_A0, DeltaShock):
        raise DomainError("A = A0 did not resolve to a delta shock")
    delta_err = max(
        abs(at_A0.v_delta - limit["v_delta"]) / max(abs(limit["v_delta"]), 1e-300),
        abs(at_A0.w0 - limit["w0"]) / limit["w0"],
    )
    targets = {
        "A0": A0,
        "A1": A1,
        "sigma": ur,
        "mass_at_probe": A0 * t,
        "momentum_at_probe": (ur + beta * t) * A0 * t,
        "rho_l": rl,
        "limit_delta": limit,
        "delta_at_A0": {"v_delta": at_A0.v_delta, "w0": at_A0.w0, "region": at_A0.region.value},
        "probe_time": t,
    }
    checks = {
        "sigma_decreasing": eventually_decreasing(errs["sigma"]),
        "mass_decreasing": eventually_decreasing(errs["mass"]),
        "identity": max(errs["identity"]) <= 1e-12,
        "delta_at_A0": delta_err <= 1e-12,
    }
    report = LimitSweepReport("sweep-a0", A_values, records, targets, errs, checks=checks)
    report.targets["delta_at_A0_error"] = delta_err
    return report


def sweep_to_zero(setup: RiemannSetup, A_sequence=None, probe_time: float = 1.0) -> LimitSweepReport:
    """Follow the delta shock as A -> 0 and compare with the transport delta."""
    if not setup.u_r < setup.u_l:
        raise NotApplicableError("zero sweep needs u+ < u-")
    A0 = setup.rho_l * (setup.u_l - setup.u_r)
    A_values = list(A_sequence) if A_sequence is not None else default_zero_sequence(A0)
    for A in A_values:
        if not 0 < A <= A0:
            raise DomainError(f"A={A!r} outside (0, A0] = (0, {A0!r}]")
    beta, t = setup.params.beta, probe_time
    target = solve_transport(setup.with_params(A=0.0))
    x_target = path_position(target.sigma, t, beta)
    records, errs = [], {"v_delta": [], "w0": [], "x": []}
    for A in A_values:
        sol = solve(setup.with_params(A=A), tol=1e-12)
        if not isinstance(sol, DeltaShock):
            raise DomainError(f"A={A!r} did not give a delta shock")
        x = path_position(sol.v_delta, t, beta)
        errs["v_delta"].append(abs(sol.v_delta - target.sigma))
        errs["w0"].append(abs(sol.w0 - target.w_slope))
        errs["x"].append(abs(x - x_target))
        records.append({"A": A, "region": sol.region.value, "v_delta": sol.v_delta, "w0": sol.w0, "x_probe": x})
    slopes = {k: loglog_slope(A_values, e) for k, e in errs.items()}
    lo, hi = SLOPE_BAND
    checks = {
        "v_delta_slope": lo <= slopes["v_delta"] <= hi,
        "w0_slope": (lo <= slopes["w0"] <= hi) or max(errs["w0"]) == 0.0,
    }
    targets = {"sigma": target.sigma, "w_slope": target.w_slope, "x_at_probe": x_target, "probe_time": t}
    return LimitSweepReport("sweep-zero", A_values, records, targets, errs, slopes, checks)


def vacuum_limit(setup: RiemannSetup, A_sequence=None) -> LimitSweepReport:
    """Two contacts with u- <= u+ as A -> 0: the intermediate state empties into vacuum."""
    if setup.u_l > setup.u_r:
        raise NotApplicableError("vacuum limit needs u- <= u+")
    if A_sequence is None:
        base = setup.rho_l * max(setup.u_r - setup.u_l, 1.0)
        A_values = [base * 2.0 ** (-j) for j in range(1, 21)]
    else:
        A_values = list(A_sequence)
    target = solve_transport(setup.with_params(A=0.0))
    ul, ur = setup.u_l, setup.u_r
    records, errs = [], {"rho_star": [], "sigma1": [], "sigma2": []}
    for A in A_values:
        sol = solve(setup.with_params(A=A))
        if not isinstance(sol, TwoContacts):
            raise DomainError(f"A={A!r} did not give two contacts")
        rho_star = sol.intermediate.rho
        records.append(
            {"A": A, "region": sol.region.value, "rho_star": rho_star, "sigma1_0": sol.j1_speed0, "sigma2_0": sol.j2_speed0}
        )
        # on J2 the intermediate state is the left state and never empties
        errs["rho_star"].append(rho_star if target.tag is TransportKind.VACUUM else abs(rho_star - setup.rho_l))
        errs["sigma1"].append(abs(sol.j1_speed0 - ul) if target.tag is TransportKind.VACUUM else 0.0)
        errs["sigma2"].append(abs(sol.j2_speed0 - ur))
    slopes = {k: loglog_slope(A_values, e) for k, e in errs.items()}
    checks = {k: eventually_decreasing(e) for k, e in errs.items()}
    targets = {"tag": target.tag.value, "rho_star": 0.0, "sigma1": ul, "sigma2": ur}
    return LimitSweepReport("vacuum", A_values, records, targets, errs, slopes, checks)
