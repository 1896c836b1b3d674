"""Domain types for the Chaplygin-pressure Aw-Rascle system with friction.

The system in the fixed frame is

    rho_t + (rho u)_x = 0
    (rho (u + P))_t + (rho u (u + P))_x = beta rho,    P = -A / rho

and the substitution v = u - beta t removes the source. All functions here are
pure; the dataclasses are frozen.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

RHO_FLOOR = 1e-300


class DomainError(ValueError):
    """Input outside the domain of an operation (non-positive density, t <= 0, ...)."""


class NotApplicableError(ValueError):
    """Operation requested for data in the wrong wave regime."""


class InconsistencyError(RuntimeError):
    """An internal invariant failed; indicates a solver bug, not bad input."""


class Frame(str, enum.Enum):
    FIXED = "fixed"
    MOVING = "moving"


@dataclass(frozen=True)
class ModelParams:
    A: float
    beta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.beta)):
            raise DomainError("A and beta must be finite")
        if self.A < 0:
            raise DomainError(f"pressure coefficient A must be >= 0, got {self.A}")

    @property
    def transport(self) -> bool:
        return self.A == 0.0


@dataclass(frozen=True)
class State:
    rho: float
    vel: float
    frame: Frame = Frame.MOVING


def _check_rho(rho: float, name: str = "rho") -> None:
    if not rho > RHO_FLOOR or not math.isfinite(rho):
        raise DomainError(f"{name} must be a finite density > {RHO_FLOOR:g}, got {rho!r}")


@dataclass(frozen=True)
class RiemannSetup:
    """Riemann data at t = 0, where u and v coincide.

    ``left`` and ``right`` hold (rho-, u-) and (rho+, u+).
    """

    left: State
    right: State
    params: ModelParams

    def __post_init__(self):
        _check_rho(self.left.rho, "rho_l")
        _check_rho(self.right.rho, "rho_r")
        for name, val in (("u_l", self.left.vel), ("u_r", self.right.vel)):
            if not math.isfinite(val):
                raise DomainError(f"{name} must be finite, got {val!r}")

    @classmethod
    def from_values(cls, rho_l, u_l, rho_r, u_r, A, beta=0.0) -> "RiemannSetup":
        return cls(
            State(float(rho_l), float(u_l)),
            State(float(rho_r), float(u_r)),
            ModelParams(float(A), float(beta)),
        )

    def with_params(self, A: float | None = None, beta: float | None = None) -> "RiemannSetup":
        p = self.params
        return RiemannSetup(
            self.left,
            self.right,
            ModelParams(p.A if A is None else A, p.beta if beta is None else beta),
        )

    @property
    def rho_l(self) -> float:
        return self.left.rho

    @property
    def u_l(self) -> float:
        return self.left.vel

    @property
    def rho_r(self) -> float:
        return self.right.rho

    @property
    def u_r(self) -> float:
        return self.right.vel

    @property
    def diagnostics(self) -> tuple[str, ...]:
        # traffic interpretation assumes nonnegative speeds; formulas do not
        flags = []
        if self.u_r < 0:
            flags.append("negative_right_velocity")
        if self.u_l < 0:
            flags.append("negative_left_velocity")
        return tuple(flags)


def pressure(rho: float, params: ModelParams) -> float:
    """Chaplygin pressure -A/rho."""
    _check_rho(rho)
    if params.A == 0.0:
        return 0.0
    return -params.A / rho


def eigenvalues(state: State, t: float, params: ModelParams) -> tuple[float, float]:
    """Characteristic speeds (lambda1, lambda2) of a moving-frame state at time t.

    lambda1 = v + beta t - A/rho and lambda2 = v + beta t. For a fixed-frame
    state the velocity already contains beta t.
    """
    _check_rho(state.rho)
    if state.frame is Frame.MOVING:
        lam2 = state.vel + params.beta * t
    else:
        lam2 = state.vel
    return lam2 - params.A / state.rho, lam2


def eigenvectors(state: State, params: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Right eigenvectors r1, r2 in (rho, v) coordinates."""
    _check_rho(state.rho)
    return (state.rho, -params.A / state.rho), (1.0, 0.0)


def frame_convert(state: State, t: float, params: ModelParams, target: Frame) -> State:
    """Map between u (fixed frame) and v = u - beta t (moving frame)."""
    target = Frame(target)
    if state.frame is target:
        return state
    shift = params.beta * t
    if target is Frame.FIXED:
        return State(state.rho, state.vel + shift, Frame.FIXED)
    return State(state.rho, state.vel - shift, Frame.MOVING)
