"""Exact Riemann solutions: two contacts, delta shocks and the A = 0 patterns.

Every wave path has the form x(t) = c t + beta t^2 / 2 for a constant ``c``
(the speed at t = 0), so each pattern is described by a sorted list of path
coefficients, the moving-frame states between them and an optional delta
carried by one of the paths.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .model import (
    DomainError,
    Frame,
    InconsistencyError,
    ModelParams,
    NotApplicableError,
    RiemannSetup,
    State,
    eigenvalues,
    frame_convert,
)
from .phase_plane import Region, classify, s_velocity

DELTA_REL = 1e-9
SQRT_CLAMP = 1e-12


def path_position(c: float, t: float, beta: float) -> float:
    """Position of a wave path with initial speed ``c`` at time ``t``."""
    return c * t + 0.5 * beta * t * t


@dataclass(frozen=True)
class TwoContacts:
    left: State
    right: State
    intermediate: State
    j1_speed0: float
    j2_speed0: float
    params: ModelParams
    region: Region
    flags: tuple[str, ...] = ()

    kind = "two_contacts"

    def path_coefficients(self) -> list[float]:
        return [self.j1_speed0, self.j2_speed0]

    def region_states(self) -> list[State | None]:
        return [self.left, self.intermediate, self.right]

    @property
    def delta(self) -> None:
        return None


@dataclass(frozen=True)
class DeltaShock:
    left: State
    right: State
    v_delta: float
    w0: float
    params: ModelParams
    region: Region
    flags: tuple[str, ...] = ()

    kind = "delta_shock"

    def path_coefficients(self) -> list[float]:
        return [self.v_delta]

    def region_states(self) -> list[State | None]:
        return [self.left, self.right]

    @property
    def delta(self) -> tuple[float, float]:
        return self.v_delta, self.w0

    @property
    def entropy_margins(self) -> tuple[float, float]:
        s = self.left.vel - self.params.A / self.left.rho
        return self.v_delta - self.right.vel, s - self.v_delta


class TransportKind(str, enum.Enum):
    VACUUM = "vacuum"
    SINGLE_CONTACT = "single_contact"
    TRANSPORT_DELTA = "transport_delta"


@dataclass(frozen=True)
class TransportPattern:
    """Riemann solution of the pressureless (A = 0) system with friction.

    ``sigma`` and ``w_slope`` are meaningful only for TRANSPORT_DELTA.
    """

    tag: TransportKind
    left: State
    right: State
    params: ModelParams
    sigma: float = math.nan
    w_slope: float = math.nan
    flags: tuple[str, ...] = ()

    kind = "transport"

    def path_coefficients(self) -> list[float]:
        if self.tag is TransportKind.VACUUM:
            return [self.left.vel, self.right.vel]
        if self.tag is TransportKind.SINGLE_CONTACT:
            return [self.left.vel]
        return [self.sigma]

    def region_states(self) -> list[State | None]:
        if self.tag is TransportKind.VACUUM:
            return [self.left, None, self.right]
        return [self.left, self.right]

    @property
    def delta(self) -> tuple[float, float] | None:
        if self.tag is TransportKind.TRANSPORT_DELTA:
            return self.sigma, self.w_slope
        return None


WaveSolution = Union[TwoContacts, DeltaShock, TransportPattern]


class SampleKind(str, enum.Enum):
    SMOOTH = "smooth"
    ON_DELTA = "on_delta"
    VACUUM = "vacuum"


@dataclass(frozen=True)
class SamplePoint:
    kind: SampleKind
    state: State | None = None
    weight: float = 0.0
    u_delta: float = math.nan


class DeltaPath(NamedTuple):
    x: float
    sigma: float
    w: float
    u_delta: float


# -- construction -----------------------------------------------------------


def delta_strength(setup: RiemannSetup) -> float:
    """Slope w0 of the delta weight w(t) = w0 t.

    The radicand rho+ rho- (u+ - u-)((u+ - u-) - (A/rho+ - A/rho-)) is at
    least A^2 on S and in region III; tiny negative values from rounding are
    clamped to zero.
    """
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    A = setup.params.A
    du = ur - ul
    arg = rr * rl * du * (du - (A / rr - A / rl))
    if arg < 0:
        scale = rr * rl * abs(du) * (abs(du) + A / rr + A / rl)
        if arg < -SQRT_CLAMP * scale:
            raise InconsistencyError(f"negative delta-strength radicand {arg!r}")
        arg = 0.0
    return math.sqrt(arg)


def delta_velocity(setup: RiemannSetup, w0: float | None = None) -> float:
    """Moving-frame delta velocity: the entropy-admissible root of

    (rho+ - rho-) v^2 - 2 (rho+ u+ - rho- u-) v + rho+ u+^2 - rho- u-^2 - A (u+ - u-) = 0.
    """
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    A = setup.params.A
    if abs(rr - rl) <= DELTA_REL * max(rr, rl):
        return 0.5 * (ur + ul - A / rl)
    if w0 is None:
        w0 = delta_strength(setup)
    a = rr - rl
    b = rr * ur - rl * ul
    if b < 0:
        # (b + w0)/a rationalised; avoids cancellation when rho+ ~ rho-
        c = rr * ur * ur - rl * ul * ul - A * (ur - ul)
        return c / (b - w0)
    return (b + w0) / a


def quadratic_residual(setup: RiemannSetup, v: float) -> tuple[float, float]:
    """Residual of the delta-velocity quadratic at ``v`` and its term scale."""
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    A = setup.params.A
    a = rr - rl
    b = rr * ur - rl * ul
    c = rr * ur * ur - rl * ul * ul - A * (ur - ul)
    res = a * v * v - 2.0 * b * v + c
    scale = abs(a) * v * v + 2.0 * abs(b * v) + rr * ur * ur + rl * ul * ul + A * abs(ur - ul)
    return res, scale


def solve_transport(setup: RiemannSetup) -> TransportPattern:
    """Riemann solution of the pressureless system (A = 0) with the same friction."""
    if setup.params.A != 0.0:
        raise NotApplicableError("solve_transport requires A = 0")
    left, right, p = setup.left, setup.right, setup.params
    flags = setup.diagnostics
    if setup.u_l < setup.u_r:
        return TransportPattern(TransportKind.VACUUM, left, right, p, flags=flags)
    if setup.u_l == setup.u_r:
        return TransportPattern(TransportKind.SINGLE_CONTACT, left, right, p, flags=flags)
    rl, ul, rr, ur = setup.rho_l, setup.u_l, setup.rho_r, setup.u_r
    if rl == rr:
        sigma = 0.5 * (ur + ul)
        w_slope = rr * (ul - ur)
    else:
        sl, sr = math.sqrt(rl), math.sqrt(rr)
        sigma = (sl * ul + sr * ur) / (sl + sr)
        w_slope = math.sqrt(rr * rl) * (ul - ur)
    return TransportPattern(TransportKind.TRANSPORT_DELTA, left, right, p, sigma, w_slope, flags)


def solve(setup: RiemannSetup, tol: float = 0.0) -> WaveSolution:
    """Exact Riemann solution for the given data.

    Parameters
    ----------
    setup : RiemannSetup
        Left/right states at t = 0 and model parameters.
    tol : float
        Relative tolerance for detecting the boundaries J2 and S; see
        :func:`classify`.

    Returns
    -------
    TwoContacts, DeltaShock or TransportPattern
    """
    if setup.params.A == 0.0:
        return solve_transport(setup)
    A = setup.params.A
    region = classify(setup, tol)
    flags = setup.diagnostics
    if region.is_delta:
        w0 = delta_strength(setup)
        v = delta_velocity(setup, w0)
        sol = DeltaShock(setup.left, setup.right, v, w0, setup.params, region, flags)
        report = entropy_check(sol, setup)
        if not report.consistent:
            raise InconsistencyError(f"entropy margins violated: {report.margins}")
        return sol
    s = s_velocity(setup)
    if region is Region.ON_J2:
        rho_star = setup.rho_l
    else:
        gap = setup.u_r - s
        if not gap > 0:
            raise InconsistencyError(f"non-positive intermediate gap {gap!r} in region {region.value}")
        rho_star = A / gap
    inter = State(rho_star, setup.u_r, Frame.MOVING)
    return TwoContacts(setup.left, setup.right, inter, s, setup.u_r, setup.params, region, flags)


# -- evaluation -------------------------------------------------------------


def sample(solution: WaveSolution, x: float, t: float, frame: Frame = Frame.FIXED) -> SamplePoint:
    """Evaluate the solution at (x, t), t > 0.

    A point exactly on a contact gets the state to its right; a point exactly
    on a delta path returns its weight and assigned velocity.
    """
    if not t > 0:
        raise DomainError(f"sample needs t > 0, got {t!r}")
    beta = solution.params.beta
    coeffs = solution.path_coefficients()
    states = solution.region_states()
    delta = solution.delta
    idx = len(coeffs)
    for i, c in enumerate(coeffs):
        pos = path_position(c, t, beta)
        if delta is not None and x == pos:
            v_d, w0 = delta
            u_d = v_d + beta * t if frame is Frame.FIXED else v_d
            return SamplePoint(SampleKind.ON_DELTA, weight=w0 * t, u_delta=u_d)
        if x < pos:
            idx = i
            break
    st = states[idx]
    if st is None:
        return SamplePoint(SampleKind.VACUUM)
    if frame is Frame.FIXED:
        st = frame_convert(st, t, solution.params, Frame.FIXED)
    return SamplePoint(SampleKind.SMOOTH, st)


def delta_path(solution: DeltaShock | TransportPattern, t: float) -> DeltaPath:
    """Position, speed, weight and fixed-frame velocity of the delta at time t."""
    if solution.delta is None:
        raise NotApplicableError("solution carries no delta shock")
    if t < 0:
        raise DomainError("delta_path needs t >= 0")
    v_d, w0 = solution.delta
    beta = solution.params.beta
    sigma = v_d + beta * t
    return DeltaPath(path_position(v_d, t, beta), sigma, w0 * t, sigma)


def arclength_weight(solution: DeltaShock | TransportPattern, t: float) -> float:
    """Weight p(t) per unit arclength, w(t) / sqrt(1 + x'(t)^2)."""
    dp = delta_path(solution, t)
    return dp.w / math.sqrt(1.0 + dp.sigma * dp.sigma)


def turning_point(solution: WaveSolution) -> tuple[float, float] | None:
    """(t, x) where a delta path reverses direction, if it does so for t > 0."""
    if solution.delta is None:
        return None
    v_d, _ = solution.delta
    beta = solution.params.beta
    if beta == 0.0 or not -v_d / beta > 0:
        return None
    t = -v_d / beta
    return t, -v_d * v_d / (2.0 * beta)


def delta_time_of_position(solution: WaveSolution, x: float) -> list[float]:
    """Times t >= 0 at which the delta path passes through ``x``.

    Zero, one or two values; two only for beta < 0, on either side of the
    turning point.
    """
    if solution.delta is None:
        raise NotApplicableError("solution carries no delta shock")
    v_d, _ = solution.delta
    return _path_times(v_d, solution.params.beta, x)


def _path_times(c: float, beta: float, x: float) -> list[float]:
    if beta == 0.0:
        if c == 0.0:
            return []
        t = x / c
        return [t] if t >= 0 else []
    disc = c * c / (beta * beta) + 2.0 * x / beta
    if disc < 0:
        return []
    r = math.sqrt(disc)
    out = sorted({-c / beta - r, -c / beta + r})
    return [t for t in out if t >= 0]


@dataclass(frozen=True)
class EntropyReport:
    margins: tuple[float, float]
    speeds: tuple[float, float, float, float, float] = field(default=())
    ordering_ok: bool = True
    strict: bool = True

    @property
    def consistent(self) -> bool:
        return self.margins[0] >= 0 and self.margins[1] >= 0 and self.ordering_ok


def characteristic_speeds(solution: DeltaShock, t: float = 0.0) -> tuple[float, float, float, float, float]:
    """(lambda1(+), lambda2(+), sigma(t), lambda1(-), lambda2(-)) at time t."""
    p = solution.params
    l1r, l2r = eigenvalues(solution.right, t, p)
    l1l, l2l = eigenvalues(solution.left, t, p)
    sigma = solution.v_delta + p.beta * t
    return l1r, l2r, sigma, l1l, l2l


def entropy_check(solution: DeltaShock, setup: RiemannSetup | None = None, t: float = 0.0) -> EntropyReport:
    """Over-compressivity margins (v_delta - u+, u- - A/rho- - v_delta).

    Also checks lambda1(+) < lambda2(+) <= sigma <= lambda1(-) < lambda2(-);
    the inner inequalities are strict in the interior of region III.
    """
    if setup is not None and (setup.left != solution.left or setup.right != solution.right):
        raise NotApplicableError("setup does not match solution")
    margins = solution.entropy_margins
    speeds = characteristic_speeds(solution, t)
    l1r, l2r, sg, l1l, l2l = speeds
    ordering = l1r <= l2r <= sg <= l1l <= l2l
    strict = l1r < l2r < sg < l1l < l2l
    return EntropyReport(margins, speeds, ordering, strict)


# -- serialisation ----------------------------------------------------------


def _state_dict(s: State) -> dict:
    return {"rho": s.rho, "vel": s.vel}


def _state_from(d: dict) -> State:
    return State(float(d["rho"]), float(d["vel"]), Frame.MOVING)


def solution_to_dict(solution: WaveSolution) -> dict:
    """Plain-dict descriptor of a solution; inverse of :func:`solution_from_dict`."""
    p = solution.params
    out = {
        "kind": solution.kind,
        "A": p.A,
        "beta": p.beta,
        "left": _state_dict(solution.left),
        "right": _state_dict(solution.right),
        "flags": list(solution.flags),
    }
    if isinstance(solution, TwoContacts):
        out.update(
            region=solution.region.value,
            rho_star=solution.intermediate.rho,
            v_star=solution.intermediate.vel,
            j1_speed0=solution.j1_speed0,
            j2_speed0=solution.j2_speed0,
            path_coefficients={"x1": [solution.j1_speed0, 0.5 * p.beta], "x2": [solution.j2_speed0, 0.5 * p.beta]},
        )
    elif isinstance(solution, DeltaShock):
        out.update(
            region=solution.region.value,
            v_delta=solution.v_delta,
            w0=solution.w0,
            entropy_margins=list(solution.entropy_margins),
            path_coefficients={"x_delta": [solution.v_delta, 0.5 * p.beta]},
        )
    else:
        out.update(region="transport", tag=solution.tag.value)
        if solution.tag is TransportKind.TRANSPORT_DELTA:
            out.update(sigma=solution.sigma, w_slope=solution.w_slope)
        out["path_coefficients"] = {
            f"x{i + 1}": [c, 0.5 * p.beta] for i, c in enumerate(solution.path_coefficients())
        }
    return out


def solution_from_dict(d: dict) -> WaveSolution:
    params = ModelParams(float(d["A"]), float(d["beta"]))
    left, right = _state_from(d["left"]), _state_from(d["right"])
    flags = tuple(d.get("flags", ()))
    kind = d["kind"]
    if kind == TwoContacts.kind:
        inter = State(float(d["rho_star"]), float(d["v_star"]), Frame.MOVING)
        return TwoContacts(
            left, right, inter, float(d["j1_speed0"]), float(d["j2_speed0"]), params, Region(d["region"]), flags
        )
    if kind == DeltaShock.kind:
        return DeltaShock(left, right, float(d["v_delta"]), float(d["w0"]), params, Region(d["region"]), flags)
    if kind == TransportPattern.kind:
        tag = TransportKind(d["tag"])
        return TransportPattern(
            tag, left, right, params, float(d.get("sigma", math.nan)), float(d.get("w_slope", math.nan)), flags
        )
    raise ValueError(f"unknown solution kind {kind!r}")
