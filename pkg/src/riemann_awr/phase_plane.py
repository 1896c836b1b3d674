"""Phase-plane classification of Riemann data and the pressure thresholds."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import DomainError, NotApplicableError, RiemannSetup, State, ModelParams, _check_rho


class Region(str, enum.Enum):
    REGION_I = "I"
    REGION_II = "II"
    REGION_III = "III"
    BOUNDARY_S = "S"
    ON_J2 = "J2"

    @property
    def is_delta(self) -> bool:
        return self in (Region.REGION_III, Region.BOUNDARY_S)

    @property
    def is_two_contact(self) -> bool:
        return not self.is_delta


def s_velocity(setup: RiemannSetup) -> float:
    """Velocity of the asymptote S: u- - A/rho-; also the J1 speed at t = 0."""
    return setup.u_l - setup.params.A / setup.rho_l


def classify(setup: RiemannSetup, tol: float = 0.0) -> Region:
    """Locate the right state relative to J2 (v = u-) and S (v = u- - A/rho-).

    ``tol`` is a relative tolerance for boundary detection, scaled by the
    largest of |u-|, |u+| and A/rho-. The default 0 means exact comparison.
    """
    u_l, u_r = setup.u_l, setup.u_r
    s = s_velocity(setup)
    eps = tol * max(abs(u_l), abs(u_r), setup.params.A / setup.rho_l) if tol else 0.0

    if abs(u_r - u_l) <= eps:
        return Region.ON_J2
    if u_r > u_l:
        return Region.REGION_I
    if abs(u_r - s) <= eps:
        return Region.BOUNDARY_S
    if u_r > s:
        return Region.REGION_II
    return Region.REGION_III


def j1_curve(rho: float, left: State, params: ModelParams) -> float:
    """Velocity on the 1-contact curve through ``left`` at density ``rho``.

    Solves v - A/rho = u- - A/rho-; the curve is asymptotic to S as rho grows.
    """
    _check_rho(rho)
    _check_rho(left.rho, "rho_l")
    if params.A == 0.0:
        raise NotApplicableError("J1 curve is undefined when A = 0")
    return left.vel - params.A / left.rho + params.A / rho


@dataclass(frozen=True)
class Thresholds:
    A0: float
    A1: float

    @property
    def degenerate(self) -> bool:
        # u+ <= 0 collapses the window (A0, A1)
        return not self.A0 < self.A1


def thresholds(setup: RiemannSetup) -> Thresholds:
    """Pressure thresholds A0 = rho-(u- - u+) and A1 = rho- u-.

    For A0 < A < A1 the right state sits in region II with a nonnegative J1
    speed; for A <= A0 it lies on S or in region III.
    """
    if not setup.u_r < setup.u_l:
        raise NotApplicableError("thresholds need u+ < u-")
    if not setup.u_l > 0:
        raise NotApplicableError("thresholds need u- > 0")
    return Thresholds(setup.rho_l * (setup.u_l - setup.u_r), setup.rho_l * setup.u_l)


__all__ = [
    "Region",
    "classify",
    "j1_curve",
    "s_velocity",
    "thresholds",
    "Thresholds",
    "DomainError",
]
