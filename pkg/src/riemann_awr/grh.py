"""Fixed-step RK4 integration of the generalized Rankine-Hugoniot system.

Fixed frame, along the delta path x(t) with weight w(t) and velocity u_d(t):

    x'        = u_d
    w'        = u_d [rho] - [rho u]
    (w u_d)'  = u_d [rho u - A] - [rho u (u - A/rho)] + beta w

Jumps are right minus left with u = u(+/-) + beta t. The moving-frame variant
uses v = u - beta t, has no source and integrates (x, w, w v_d).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import DeltaShock, delta_strength, delta_velocity
from .model import DomainError, Frame, NotApplicableError, RiemannSetup
from .phase_plane import classify


class IntegrationFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class GrhTrajectory:
    times: np.ndarray
    x: np.ndarray
    w: np.ndarray
    wu: np.ndarray
    u_delta: np.ndarray
    dt: float
    frame: Frame = Frame.FIXED

    def as_fixed(self, beta: float) -> "GrhTrajectory":
        """Map a moving-frame trajectory to fixed-frame velocities."""
        if self.frame is Frame.FIXED:
            return self
        shift = beta * self.times
        u = self.u_delta + shift
        return GrhTrajectory(self.times, self.x, self.w, self.w * u, u, self.dt, Frame.FIXED)


def _rhs_fixed(setup: RiemannSetup):
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    A, beta = setup.params.A, setup.params.beta
    jump_rho = rr - rl

    def f(t, w, u_d):
        uL = ul + beta * t
        uR = ur + beta * t
        jump_m = rr * uR - rl * uL
        jump_f = rr * uR * (uR - A / rr) - rl * uL * (uL - A / rl)
        return u_d, u_d * jump_rho - jump_m, u_d * jump_m - jump_f + beta * w

    return f


def _rhs_moving(setup: RiemannSetup):
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    A, beta = setup.params.A, setup.params.beta
    jump_rho = rr - rl
    jump_q = (rr * ur - A) - (rl * ul - A)

    def f(t, w, v_d):
        sigma = v_d + beta * t
        jump_m = rr * (ur + beta * t) - rl * (ul + beta * t)
        jump_g = (rr * ur - A) * (ur + beta * t) - (rl * ul - A) * (ul + beta * t)
        return sigma, sigma * jump_rho - jump_m, sigma * jump_q - jump_g

    return f


def integrate_grh(
    setup: RiemannSetup,
    t_end: float,
    dt: float,
    frame: Frame = Frame.FIXED,
    tol: float = 0.0,
) -> GrhTrajectory:
    """Integrate the delta-shock ODE system from x = w = w u_d = 0 at t = 0.

    While w is below ``1e-12 * (1 + w0 t_end)`` the velocity is taken from
    the entropy-selected algebraic root instead of the quotient (w u_d)/w.
    """
    if not (t_end > 0 and dt > 0):
        raise DomainError("t_end and dt must be positive")
    if setup.params.A == 0.0 or not classify(setup, tol).is_delta:
        raise NotApplicableError("GRH integration needs data on S or in region III with A > 0")
    frame = Frame(frame)
    beta = setup.params.beta
    v_seed = delta_velocity(setup)
    w_floor = 1e-12 * (1.0 + delta_strength(setup) * t_end)
    if frame is Frame.FIXED:
        f = _rhs_fixed(setup)

        def seed(t):
            return v_seed + beta * t

    else:
        f = _rhs_moving(setup)

        def seed(t):
            return v_seed

    def vel(t, w, wu):
        return seed(t) if w < w_floor else wu / w

    def stage(t, y):
        x, w, wu = y
        return np.array(f(t, w, vel(t, w, wu)))

    n = int(round(t_end / dt))
    if n < 1 or abs(n * dt - t_end) > 1e-9 * t_end:
        raise DomainError("t_end must be an integer multiple of dt")
    times = np.arange(n + 1) * dt
    Y = np.zeros((n + 1, 3))
    U = np.empty(n + 1)
    U[0] = seed(0.0)
    y = np.zeros(3)
    for k in range(n):
        t = times[k]
        k1 = stage(t, y)
        k2 = stage(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = stage(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = stage(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not y[1] > 0:
            raise IntegrationFailure(f"weight became non-positive ({y[1]!r}) at t={times[k + 1]!r}")
        Y[k + 1] = y
        U[k + 1] = vel(times[k + 1], y[1], y[2])
    return GrhTrajectory(times, Y[:, 0], Y[:, 1], Y[:, 2], U, dt, frame)


def closed_form(solution: DeltaShock, times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    beta = solution.params.beta
    x = solution.v_delta * times + 0.5 * beta * times * times
    w = solution.w0 * times
    u = solution.v_delta + beta * times
    return x, w, u


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), np.finfo(float).tiny))


def compare_to_closed_form(trajectory: GrhTrajectory, solution: DeltaShock) -> float:
    """Worst deviation of (x, w, u_d) from the closed-form delta solution.

    Each deviation is the sup-norm error over the grid divided by the sup norm
    of the exact values (x(t) may pass through zero). u_d is skipped for
    t < 10 dt.
    """
    traj = trajectory.as_fixed(solution.params.beta)
    t = traj.times
    if t.ndim != 1 or len(t) != len(traj.x) or not np.allclose(np.diff(t), traj.dt, rtol=1e-9, atol=0):
        raise ValueError("trajectory time grid is inconsistent with its step")
    x, w, u = closed_form(solution, t)
    late = t >= 10 * traj.dt
    errs = [_rel(traj.x, x), _rel(traj.w, w)]
    if late.any():
        errs.append(_rel(traj.u_delta[late], u[late]))
    return float(max(errs))


def check_entropy_band(trajectory: GrhTrajectory, setup: RiemannSetup, skip: int = 1) -> bool:
    """u+ + beta t < u_d(t) < u- - A/rho- + beta t at every step after ``skip``."""
    traj = trajectory.as_fixed(setup.params.beta)
    t = traj.times[skip:]
    u = traj.u_delta[skip:]
    bt = setup.params.beta * t
    lo = setup.u_r + bt
    hi = setup.u_l - setup.params.A / setup.rho_l + bt
    return bool(np.all((lo < u) & (u < hi)))


def trajectory_rows(trajectory: GrhTrajectory):
    for t, x, w, u in zip(trajectory.times, trajectory.x, trajectory.w, trajectory.u_delta):
        yield float(t), float(x), float(w), float(u)
