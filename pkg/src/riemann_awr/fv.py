"""First-order finite-volume reference scheme with exact source splitting.

Conserved variables m = rho and q = rho (u + P) = rho u - A, so
rho u = q + A and the fluxes are (m u, q u). Each step applies a local
Lax-Friedrichs update of the homogeneous system and then the exact source
update q <- q + beta m dt. Outflow boundaries copy the edge cells.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exact import DeltaShock, TransportPattern, WaveSolution, path_position
from .model import DomainError, NotApplicableError, RiemannSetup

M_FLOOR = 1e-12
MAX_HALVINGS = 30


class FvPositivityError(RuntimeError):
    pass


@dataclass(frozen=True)
class FvGrid:
    x_min: float
    x_max: float
    n_cells: int
    t_end: float
    cfl: float = 0.45

    def __post_init__(self):
        if self.n_cells < 100:
            raise DomainError("n_cells must be >= 100")
        if not 0 < self.cfl <= 0.9:
            raise DomainError("cfl must lie in (0, 0.9]")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")
        if not self.t_end >= 0:
            raise DomainError("t_end must be >= 0")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class FvField:
    grid: FvGrid
    m: np.ndarray
    q: np.ndarray
    time: float
    A: float

    @property
    def u(self) -> np.ndarray:
        return (self.q + self.A) / self.m

    def total_mass(self) -> float:
        return float(np.sum(self.m) * self.grid.dx)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["x_center", "m", "q", "u"])
            for x, m, q, u in zip(self.grid.centers, self.m, self.q, self.u):
                wr.writerow([f"{x:.17g}", f"{m:.17g}", f"{q:.17g}", f"{u:.17g}"])


@dataclass
class FvRun:
    field: FvField
    snapshots: list[FvField]
    steps: int = 0
    rejected: int = 0
    cap_events: int = 0
    # per step: (dt, mass_before, mass_after, boundary mass flux in - out)
    mass_log: list[tuple[float, float, float, float]] = field(default_factory=list)
    # per step: (dt, q_before, q_after, boundary q flux in - out, source total)
    q_log: list[tuple[float, float, float, float, float]] = field(default_factory=list)


def initial_field(setup: RiemannSetup, grid: FvGrid) -> FvField:
    """Exact cell averages of the Riemann data (the cell containing x = 0 is mixed)."""
    dx = grid.dx
    left_edge = grid.x_min + np.arange(grid.n_cells) * dx
    frac = np.clip((0.0 - left_edge) / dx, 0.0, 1.0)
    A = setup.params.A
    m = frac * setup.rho_l + (1.0 - frac) * setup.rho_r
    q = frac * (setup.rho_l * setup.u_l - A) + (1.0 - frac) * (setup.rho_r * setup.u_r - A)
    return FvField(grid, m, q, 0.0, A)


def _velocity(m, q, A, u_cap):
    u = (q + A) / m
    capped = np.abs(u) > u_cap
    if capped.any():
        u = np.clip(u, -u_cap, u_cap)
    return u, int(capped.sum())


def max_speed(m, q, A, u_cap=np.inf) -> float:
    """max over cells of |u| + |u - A/rho|."""
    u, _ = _velocity(m, q, A, u_cap)
    return float(np.max(np.abs(u) + np.abs(u - A / m)))


def llf_step(m, q, dt, dx, A, u_cap=np.inf):
    """One local Lax-Friedrichs update of the homogeneous system.

    Returns (m_new, q_new, (Fm_left, Fm_right), (Fq_left, Fq_right), caps)
    where the F values are the boundary-interface fluxes.
    """
    mg = np.concatenate(([m[0]], m, [m[-1]]))
    qg = np.concatenate(([q[0]], q, [q[-1]]))
    u, caps = _velocity(mg, qg, A, u_cap)
    fm = mg * u
    fq = qg * u
    a = np.maximum(np.abs(u), np.abs(u - A / mg))
    aa = np.maximum(a[:-1], a[1:])
    Fm = 0.5 * (fm[:-1] + fm[1:]) - 0.5 * aa * (mg[1:] - mg[:-1])
    Fq = 0.5 * (fq[:-1] + fq[1:]) - 0.5 * aa * (qg[1:] - qg[:-1])
    lam = dt / dx
    m_new = m - lam * (Fm[1:] - Fm[:-1])
    q_new = q - lam * (Fq[1:] - Fq[:-1])
    return m_new, q_new, (Fm[0], Fm[-1]), (Fq[0], Fq[-1]), caps


def run_fv(setup: RiemannSetup, grid: FvGrid, snapshot_times=()) -> FvRun:
    """Advance the Riemann data to ``grid.t_end``, keeping snapshots at the requested times.

    The velocity (q + A)/m is capped at 10 max(|u-|, |u+|) + 10 |beta| t_end;
    each capped cell-step is counted in ``cap_events``. A step that produces
    m <= 1e-12 or violates the CFL bound with the new speeds is rejected and
    retried with half the time step.
    """
    A, beta = setup.params.A, setup.params.beta
    u_cap = 10.0 * max(abs(setup.u_l), abs(setup.u_r)) + 10.0 * abs(beta) * grid.t_end
    u_cap = max(u_cap, 1.0)
    fld = initial_field(setup, grid)
    m, q, t = fld.m.copy(), fld.q.copy(), 0.0
    dx = grid.dx
    stops = sorted({float(s) for s in snapshot_times if 0 <= s <= grid.t_end})
    run = FvRun(fld, [])
    while stops and stops[0] == 0.0:
        run.snapshots.append(FvField(grid, m.copy(), q.copy(), 0.0, A))
        stops.pop(0)

    while t < grid.t_end:
        target = stops[0] if stops else grid.t_end
        s = max_speed(m, q, A, u_cap)
        dt = grid.cfl * dx / s if s > 0 else target - t
        dt = min(dt, target - t)
        for _ in range(MAX_HALVINGS):
            m1, q1, (fml, fmr), (fql, fqr), caps = llf_step(m, q, dt, dx, A, u_cap)
            if np.all(m1 > M_FLOOR) and max_speed(m1, q1, A, u_cap) * dt <= dx:
                break
            run.rejected += 1
            dt *= 0.5
        else:
            raise FvPositivityError(f"density fell below {M_FLOOR:g} at t={t!r}")
        run.cap_events += caps
        src = beta * m1 * dt
        q2 = q1 + src
        run.mass_log.append((dt, float(np.sum(m)) * dx, float(np.sum(m1)) * dx, dt * (fml - fmr)))
        run.q_log.append((dt, float(np.sum(q)) * dx, float(np.sum(q2)) * dx, dt * (fql - fqr), float(np.sum(src)) * dx))
        m, q = m1, q2
        t = target if dt == target - t else t + dt
        run.steps += 1
        if stops and t >= stops[0]:
            run.snapshots.append(FvField(grid, m.copy(), q.copy(), t, A))
            stops.pop(0)
    run.field = FvField(grid, m, q, t, A)
    return run


def measure_concentration(fld: FvField, solution: DeltaShock | TransportPattern, window_cells: int):
    """Excess mass near the predicted delta position versus w(t) = w0 t.

    Background is the exact side density on each side of x(t).
    """
    if solution.delta is None:
        raise NotApplicableError("measure_concentration needs a delta solution")
    v_d, w0 = solution.delta
    t = fld.time
    xd = path_position(v_d, t, solution.params.beta)
    grid = fld.grid
    dx = grid.dx
    if xd - window_cells * dx < grid.x_min or xd + window_cells * dx > grid.x_max:
        raise DomainError("concentration window exceeds the domain")
    xc = grid.centers
    sel = np.abs(xc - xd) <= window_cells * dx
    bg = np.where(xc < xd, solution.left.rho, solution.right.rho)
    excess = float(np.sum((fld.m - bg)[sel]) * dx)
    return excess, w0 * t


@dataclass(frozen=True)
class WaveLocation:
    wave: str
    x_exact: float
    x_numeric: float | None
    error_cells: float | None

    @property
    def detected(self) -> bool:
        return self.x_numeric is not None


def _gradient_peaks(fld: FvField, n: int, rel: float = 0.1) -> list[float]:
    """Interface positions of the ``n`` strongest separated jumps in m."""
    g = np.abs(np.diff(fld.m))
    xi = fld.grid.x_min + (np.arange(1, fld.grid.n_cells)) * fld.grid.dx
    scale = float(np.max(np.abs(fld.m)))
    g = g.copy()
    found = []
    for _ in range(n):
        k = int(np.argmax(g))
        peak = g[k]
        if peak <= 1e-12 * scale:
            break
        found.append(float(xi[k]))
        lo = k
        while lo > 0 and g[lo - 1] <= g[lo] and g[lo - 1] > rel * peak:
            lo -= 1
        hi = k
        while hi < len(g) - 1 and g[hi + 1] <= g[hi] and g[hi + 1] > rel * peak:
            hi += 1
        g[lo : hi + 1] = 0.0
    return sorted(found)


def compare_speeds(snapshots, solution: WaveSolution) -> list[list[WaveLocation]]:
    """Per snapshot, numeric versus exact wave positions in cell widths.

    Contacts are located at the steepest density jumps, a delta at the
    densest cell, or at the steepest jump while no cell exceeds the side
    densities. At t = 0 every wave sits at the imposed jump x = 0.
    """
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("need at least one snapshot")
    beta = solution.params.beta
    out = []
    for fld in snapshots:
        t, dx = fld.time, fld.grid.dx
        rows = []
        if t == 0.0:
            for i, c in enumerate(solution.path_coefficients()):
                rows.append(WaveLocation(f"wave{i + 1}", 0.0, 0.0, 0.0))
            out.append(rows)
            continue
        if solution.delta is not None:
            v_d, _ = solution.delta
            x_ex = path_position(v_d, t, beta)
            peak = float(np.max(fld.m))
            if peak > 1.01 * max(solution.left.rho, solution.right.rho):
                x_num = float(fld.grid.centers[int(np.argmax(fld.m))])
            else:
                found = _gradient_peaks(fld, 1)
                x_num = found[0] if found else None
            rows.append(WaveLocation("delta", x_ex, x_num, None if x_num is None else abs(x_num - x_ex) / dx))
        else:
            coeffs = solution.path_coefficients()
            states = solution.region_states()
            waves = []
            for i, c in enumerate(coeffs):
                a, b = states[i], states[i + 1]
                ra = 0.0 if a is None else a.rho
                rb = 0.0 if b is None else b.rho
                if ra != rb:
                    waves.append((f"wave{i + 1}", path_position(c, t, beta)))
            found = _gradient_peaks(fld, len(waves))
            if len(found) < len(waves):
                rows = [WaveLocation(name, x, None, None) for name, x in waves]
            else:
                for (name, x_ex), x_num in zip(sorted(waves, key=lambda w: w[1]), found):
                    rows.append(WaveLocation(name, x_ex, x_num, abs(x_num - x_ex) / dx))
        out.append(rows)
    return out


def plateau_state(fld: FvField, x_lo: float, x_hi: float) -> tuple[float, float]:
    """Median (rho, u) over cells with centers in [x_lo, x_hi]."""
    xc = fld.grid.centers
    sel = (xc >= x_lo) & (xc <= x_hi)
    if not sel.any():
        raise DomainError("empty plateau window")
    return float(np.median(fld.m[sel])), float(np.median(fld.u[sel]))


__all__ = [
    "FvGrid",
    "FvField",
    "FvRun",
    "WaveLocation",
    "run_fv",
    "llf_step",
    "initial_field",
    "measure_concentration",
    "compare_speeds",
    "plateau_state",
]
