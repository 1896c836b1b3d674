"""Distributional residuals of constructed solutions against bump test functions.

For a test function psi with compact support in t > 0 the fixed-frame
identities are

    R1 = ∬ rho psi_t + rho u psi_x + ∫ w(t) dpsi(x(t), t)/dt dt
    R2 = ∬ rho(u+P) psi_t + rho u (u+P) psi_x + beta rho psi
         + ∫ w(t) u_d(t) dpsi(x(t), t)/dt + beta w(t) psi(x(t), t) dt

and the moving frame drops the source terms, replaces u by v in the conserved
quantities and keeps v + beta t as the transport speed. The area integral is
split along the wave paths and, in time, at the instants a path enters or
leaves the support, so every panel integrand is a polynomial and
Gauss-Legendre quadrature is exact once the level is high enough.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .exact import WaveSolution, _path_times, path_position
from .model import DomainError, Frame, RiemannSetup


@dataclass(frozen=True)
class TestFunction:
    """psi(x, t) = ((1 - sx^2)(1 - st^2))^k on |sx|, |st| < 1, zero outside."""

    __test__ = False  # not a pytest class

    x0: float
    t0: float
    rx: float
    rt: float
    order: int = 4

    def __post_init__(self):
        if not (self.rx > 0 and self.rt > 0):
            raise DomainError("test-function radii must be positive")
        if self.order < 4:
            raise DomainError("test-function order must be >= 4")

    @property
    def t_range(self) -> tuple[float, float]:
        return self.t0 - self.rt, self.t0 + self.rt

    @property
    def x_range(self) -> tuple[float, float]:
        return self.x0 - self.rx, self.x0 + self.rx

    def _parts(self, x, t):
        sx = (np.asarray(x, dtype=float) - self.x0) / self.rx
        st = (np.asarray(t, dtype=float) - self.t0) / self.rt
        X = 1.0 - sx * sx
        T = 1.0 - st * st
        inside = (X > 0) & (T > 0)
        X = np.where(inside, X, 0.0)
        T = np.where(inside, T, 0.0)
        return sx, st, X, T

    def value(self, x, t):
        _, _, X, T = self._parts(x, t)
        return (X * T) ** self.order

    def grad(self, x, t):
        """(psi, psi_x, psi_t) in closed form."""
        k = self.order
        sx, st, X, T = self._parts(x, t)
        base = (X * T) ** (k - 1)
        psi = base * X * T
        psi_x = k * base * T * (-2.0 * sx / self.rx)
        psi_t = k * base * X * (-2.0 * st / self.rt)
        return psi, psi_x, psi_t


@dataclass(frozen=True)
class ResidualReport:
    R1: float
    R2: float
    scale1: float
    scale2: float
    quad_level: int

    @property
    def scale(self) -> float:
        return self.scale1 + self.scale2

    @property
    def normalized(self) -> float:
        """max(|R1|, |R2|) / scale, each residual against its own equation's scale."""
        r1 = abs(self.R1) / self.scale1 if self.scale1 > 0 else abs(self.R1)
        r2 = abs(self.R2) / self.scale2 if self.scale2 > 0 else abs(self.R2)
        return max(r1, r2)


def _time_panels(solution: WaveSolution, psi: TestFunction) -> list[float]:
    ta, tb = psi.t_range
    xa, xb = psi.x_range
    beta = solution.params.beta
    cuts = {ta, tb}
    for c in solution.path_coefficients():
        for edge in (xa, xb):
            for t in _path_times(c, beta, edge):
                if ta < t < tb:
                    cuts.add(t)
    return sorted(cuts)


def _fields(state, T, params, frame):
    """(density, density flux, conserved q, q flux) of a moving-frame state at times T."""
    rho, v = state.rho, state.vel
    speed = v + params.beta * T
    if frame is Frame.FIXED:
        q = rho * speed - params.A
    else:
        q = np.full_like(T, rho * v - params.A)
    return rho, rho * speed, q, q * speed


def residual(
    solution: WaveSolution,
    setup: RiemannSetup | None,
    psi: TestFunction,
    quad_level: int = 24,
    frame: Frame = Frame.FIXED,
    include_delta_source: bool = True,
) -> ResidualReport:
    """Evaluate both weak-form residuals of ``solution`` against ``psi``.

    ``include_delta_source=False`` drops the beta w(t) psi line term from the
    fixed-frame momentum identity (used to show that term is needed).
    """
    if not psi.t_range[0] > 0:
        raise DomainError("test function support must lie in t > 0")
    if setup is not None and (setup.left != solution.left or setup.right != solution.right):
        raise ValueError("setup does not match solution")
    frame = Frame(frame)
    params = solution.params
    beta = params.beta
    coeffs = solution.path_coefficients()
    states = solution.region_states()
    xa, xb = psi.x_range
    gx, gw = np.polynomial.legendre.leggauss(quad_level)
    cuts = _time_panels(solution, psi)

    R1 = R2 = S1 = S2 = 0.0
    for ta, tb in zip(cuts[:-1], cuts[1:]):
        tau = ta + 0.5 * (tb - ta) * (gx + 1.0)
        wt = 0.5 * (tb - ta) * gw
        tm = 0.5 * (ta + tb)
        mid_pos = [path_position(c, tm, beta) for c in coeffs]
        n_left = sum(p <= xa for p in mid_pos)
        inside = [i for i, p in enumerate(mid_pos) if xa < p < xb]
        bounds = [np.full_like(tau, xa)]
        bounds += [path_position(coeffs[i], tau, beta) for i in inside]
        bounds.append(np.full_like(tau, xb))

        for j in range(len(bounds) - 1):
            state = states[n_left + j]
            if state is None:
                continue
            lo, hi = bounds[j], bounds[j + 1]
            half = 0.5 * (hi - lo)
            X = lo[:, None] + half[:, None] * (gx[None, :] + 1.0)
            T = np.broadcast_to(tau[:, None], X.shape)
            W = wt[:, None] * half[:, None] * gw[None, :]
            p, px, pt = psi.grad(X, T)
            rho, m, q, g = _fields(state, T, params, frame)
            a1, b1 = rho * pt, m * px
            a2, b2 = q * pt, g * px
            R1 += float(np.sum(W * (a1 + b1)))
            S1 += float(np.sum(W * (np.abs(a1) + np.abs(b1))))
            c2 = beta * rho * p if frame is Frame.FIXED else 0.0 * p
            R2 += float(np.sum(W * (a2 + b2 + c2)))
            S2 += float(np.sum(W * (np.abs(a2) + np.abs(b2) + np.abs(c2))))

        delta = solution.delta
        if delta is not None:
            v_d, w0 = delta
            xd = path_position(v_d, tau, beta)
            sigma = v_d + beta * tau
            p, px, pt = psi.grad(xd, tau)
            dpsi = pt + sigma * px
            w = w0 * tau
            u_d = sigma if frame is Frame.FIXED else np.full_like(tau, v_d)
            l1 = w * dpsi
            l2 = w * u_d * dpsi
            R1 += float(np.sum(wt * l1))
            S1 += float(np.sum(wt * np.abs(l1)))
            if frame is Frame.FIXED and include_delta_source:
                src = beta * w * p
            else:
                src = 0.0 * p
            R2 += float(np.sum(wt * (l2 + src)))
            S2 += float(np.sum(wt * (np.abs(l2) + np.abs(src))))
    return ResidualReport(R1, R2, S1, S2, quad_level)


def draw_test_functions(solution: WaveSolution, n: int, rng_seed: int = 0, order: int = 4) -> list[TestFunction]:
    """Test functions cycling through straddling, left-of-all and right-of-all placements."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(rng_seed)
    beta = solution.params.beta
    coeffs = solution.path_coefficients()
    placements = [("straddle", i) for i in range(len(coeffs))] + [("left", None), ("right", None)]
    out = []
    for k in range(n):
        kind, idx = placements[k % len(placements)]
        t0 = rng.uniform(0.4, 2.0)
        rt = rng.uniform(0.2, 0.9) * t0
        rx = rng.uniform(0.2, 2.0)
        pos = [path_position(c, t0, beta) for c in coeffs]
        if kind == "straddle":
            x0 = pos[idx] + rng.uniform(-0.3, 0.3) * rx
        elif kind == "left":
            x0 = min(pos) - rng.uniform(0.0, 1.5) * rx
        else:
            x0 = max(pos) + rng.uniform(0.0, 1.5) * rx
        out.append(TestFunction(x0, t0, rx, rt, order))
    return out


def residual_suite(
    solution: WaveSolution,
    setup: RiemannSetup | None = None,
    n: int = 10,
    rng_seed: int = 0,
    quad_level: int = 24,
    frame: Frame = Frame.FIXED,
    include_delta_source: bool = True,
) -> tuple[float, list[ResidualReport]]:
    """Worst normalized residual over ``n`` drawn test functions, plus the reports."""
    psis = draw_test_functions(solution, n, rng_seed)
    reports = [residual(solution, setup, p, quad_level, frame, include_delta_source) for p in psis]
    return max(r.normalized for r in reports), reports


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple[int, ...]
    residuals: tuple[float, ...]
    order: float | None
    at_floor: bool


ROUNDOFF_FLOOR = 1e-13


def convergence_order(
    solution: WaveSolution,
    setup: RiemannSetup | None,
    psi: TestFunction,
    levels,
    frame: Frame = Frame.FIXED,
) -> ConvergenceReport:
    """Log-log slope of the normalized residual against quadrature level.

    Levels whose residual is already at roundoff are excluded from the fit;
    with fewer than two levels above the floor no order is estimated.
    """
    levels = tuple(int(v) for v in levels)
    if len(levels) < 3:
        raise ValueError("need at least 3 quadrature levels")
    res = tuple(residual(solution, setup, psi, lv, frame).normalized for lv in levels)
    above = [(lv, r) for lv, r in zip(levels, res) if r > ROUNDOFF_FLOOR]
    at_floor = len(above) < len(levels)
    if len(above) < 2:
        return ConvergenceReport(levels, res, None, True)
    lx = np.log([a for a, _ in above])
    ly = np.log([b for _, b in above])
    slope = float(np.polyfit(lx, ly, 1)[0])
    return ConvergenceReport(levels, res, -slope, at_floor)


def corrupt_delta(solution, dv: float = 0.1):
    """Copy of a delta solution with its velocity shifted by ``dv``."""
    if solution.delta is None:
        raise ValueError("solution carries no delta shock")
    if hasattr(solution, "v_delta"):
        return replace(solution, v_delta=solution.v_delta + dv)
    return replace(solution, sigma=solution.sigma + dv)


def write_residual_table(path, reports: list[ResidualReport]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["psi_id", "level", "R1", "R2", "scale"])
        for i, r in enumerate(reports):
            wr.writerow([i, r.quad_level, f"{r.R1:.17g}", f"{r.R2:.17g}", f"{r.scale:.17g}"])


__all__ = [
    "TestFunction",
    "ResidualReport",
    "ConvergenceReport",
    "residual",
    "residual_suite",
    "convergence_order",
    "draw_test_functions",
    "corrupt_delta",
    "write_residual_table",
]
