import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from riemann_awr.exact import (
    DeltaShock,
    SampleKind,
    TransportKind,
    TransportPattern,
    TwoContacts,
    arclength_weight,
    delta_path,
    delta_strength,
    delta_time_of_position,
    delta_velocity,
    entropy_check,
    path_position,
    quadratic_residual,
    sample,
    solution_from_dict,
    solution_to_dict,
    solve,
    solve_transport,
    turning_point,
)
from riemann_awr.model import DomainError, Frame, InconsistencyError, NotApplicableError, RiemannSetup, frame_convert
from riemann_awr.phase_plane import Region, classify


def mk(rl, ul, rr, ur, A, beta=0.0):
    return RiemannSetup.from_values(rl, ul, rr, ur, A, beta)


def oracle_v_delta(s):
    """Independent oracle: numpy root of the quadratic inside the entropy band."""
    rl, ul, rr, ur, A = s.rho_l, s.u_l, s.rho_r, s.u_r, s.params.A
    coeffs = [rr - rl, -2 * (rr * ur - rl * ul), rr * ur**2 - rl * ul**2 - A * (ur - ul)]
    if coeffs[0] == 0:
        roots = [-coeffs[2] / coeffs[1]]
    else:
        roots = [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-9]
    lo, hi = ur, ul - A / rl
    band = [r for r in roots if lo - 1e-9 * (1 + abs(lo)) <= r <= hi + 1e-9 * (1 + abs(hi))]
    assert len(band) == 1, (roots, lo, hi)
    return band[0]


# strategies ---------------------------------------------------------------

dens = st.floats(0.05, 20)
vel = st.floats(-10, 10)
amp = st.floats(0.01, 10)
betas = st.floats(-3, 3)


@st.composite
def region_iii(draw):
    rl, rr, A, ur = draw(dens), draw(dens), draw(amp), draw(vel)
    gap = draw(st.floats(1e-3, 10))
    ul = ur + A / rl + gap
    return mk(rl, ul, rr, ur, A, draw(betas))


@st.composite
def two_contact(draw):
    rl, rr, A, ul = draw(dens), draw(dens), draw(amp), draw(vel)
    ur = ul - A / rl + draw(st.floats(1e-3, 15))
    return mk(rl, ul, rr, ur, A, draw(betas))


@st.composite
def any_setup(draw):
    return draw(st.one_of(region_iii(), two_contact()))


# examples -----------------------------------------------------------------


@pytest.mark.parametrize("beta", [0.0, 2.0, -1.5])
def test_two_contact_example(beta):
    sol = solve(mk(1, 2, 1, 3, 1, beta))
    assert isinstance(sol, TwoContacts) and sol.region is Region.REGION_I
    assert sol.intermediate.rho == 0.5 and sol.intermediate.vel == 3.0
    assert (sol.j1_speed0, sol.j2_speed0) == (1.0, 3.0)


def test_delta_example():
    s = mk(2, 4, 1, 0, 1)
    sol = solve(s)
    assert isinstance(sol, DeltaShock) and sol.region is Region.REGION_III
    assert sol.w0 == 6.0 and sol.v_delta == 2.0
    assert sol.entropy_margins == (2.0, 1.5)
    res, scale = quadratic_residual(s, sol.v_delta)
    assert abs(res) <= 1e-12 * scale


def test_equal_density_example():
    sol = solve(mk(1, 3, 1, 0, 1))
    assert sol.v_delta == 1.0 and sol.w0 == 3.0
    assert entropy_check(sol).margins == (1.0, 1.0)
    assert delta_path(sol, 2.0).w == 6.0


def test_boundary_s_example():
    s = mk(2, 4, 1, 3.5, 1)
    sol = solve(s)
    assert sol.region is Region.BOUNDARY_S
    assert sol.w0 == 1.0 and sol.v_delta == 3.5
    rep = entropy_check(sol, s)
    assert rep.margins[1] == 0.0 and rep.consistent and not rep.strict


def test_on_j2_gives_zero_strength_contacts():
    sol = solve(mk(2, 4, 1, 4, 1))
    assert isinstance(sol, TwoContacts) and sol.region is Region.ON_J2
    assert sol.intermediate.rho == 2.0


@pytest.mark.parametrize(
    "data,tag,sigma,w",
    [
        ((1, 1, 1, 2), TransportKind.VACUUM, None, None),
        ((4, 3, 1, 1), TransportKind.TRANSPORT_DELTA, 7 / 3, 4.0),
        ((1, 3, 1, 1), TransportKind.TRANSPORT_DELTA, 2.0, 2.0),
        ((1, 2, 3, 2), TransportKind.SINGLE_CONTACT, None, None),
    ],
)
def test_transport_examples(data, tag, sigma, w):
    sol = solve(mk(*data, 0.0))
    assert isinstance(sol, TransportPattern) and sol.tag is tag
    if sigma is not None:
        assert math.isclose(sol.sigma, sigma, rel_tol=1e-15) and sol.w_slope == w
    with pytest.raises(NotApplicableError):
        solve_transport(mk(*data, 1.0))


def test_vacuum_sampling():
    sol = solve(mk(1, 1, 1, 2, 0.0))
    assert sample(sol, 1.5, 1.0).kind is SampleKind.VACUUM
    assert sample(sol, 0.5, 1.0).state.rho == 1.0


def test_sample_examples():
    sol = solve(mk(1, 2, 1, 3, 1))
    p = sample(sol, 2.5, 1.0)
    assert p.kind is SampleKind.SMOOTH and (p.state.rho, p.state.vel) == (0.5, 3.0)
    d = solve(mk(2, 4, 1, 0, 1, 2))
    p = sample(d, 3.0, 1.0)
    assert p.kind is SampleKind.ON_DELTA and p.weight == 6.0 and p.u_delta == 4.0
    far = sample(d, -100.0, 1.0)
    assert (far.state.rho, far.state.vel) == (2.0, 6.0)
    # exactly on a contact: the right state
    assert sample(sol, 3.0, 1.0).state.rho == 1.0
    with pytest.raises(DomainError):
        sample(sol, 0.0, 0.0)


def test_delta_path_examples():
    d = solve(mk(2, 4, 1, 0, 1, 2))
    assert delta_path(d, 0.0) == (0.0, 2.0, 0.0, 2.0)
    assert delta_path(d, 1.0) == (3.0, 4.0, 6.0, 4.0)
    neg = solve(mk(2, 4, 1, 0, 1, -2))
    assert delta_path(neg, 1.0).sigma == 0.0
    assert turning_point(neg) == (1.0, 1.0)
    assert turning_point(d) is None
    assert delta_time_of_position(neg, 1.0) == [1.0]
    assert delta_time_of_position(neg, 0.0) == [0.0, 2.0]
    assert delta_time_of_position(neg, 2.0) == []
    assert math.isclose(arclength_weight(d, 1.0), 6 / math.sqrt(17), rel_tol=1e-15)
    with pytest.raises(DomainError):
        delta_path(d, -1.0)
    with pytest.raises(NotApplicableError):
        delta_path(solve(mk(1, 2, 1, 3, 1)), 1.0)


def test_invalid_density_rejected():
    with pytest.raises(DomainError, match="rho_l"):
        mk(-1, 0, 1, 0, 1)


def test_strength_inconsistency_raised():
    # region II data forced through the delta formula: radicand 2*(-0.2)*(0.3) < 0
    with pytest.raises(InconsistencyError):
        delta_strength(mk(1, 4, 2, 3.8, 1))


def test_flags_for_negative_right_velocity():
    assert "negative_right_velocity" in solve(mk(2, 4, 1, -1, 1)).flags


# properties ---------------------------------------------------------------


@given(region_iii())
def test_delta_velocity_matches_root_oracle(s):
    sol = solve(s)
    v = oracle_v_delta(s)
    assert abs(sol.v_delta - v) <= 1e-8 * (1 + abs(v))


@given(st.one_of(region_iii(), st.builds(lambda s: s, st.just(mk(2, 4, 1, 3.5, 1)))))
def test_quadratic_residual_and_entropy(s):
    sol = solve(s, tol=1e-12)
    res, scale = quadratic_residual(s, sol.v_delta)
    assert abs(res) <= 1e-12 * scale
    rep = entropy_check(sol, s)
    assert rep.consistent
    assert min(rep.margins) >= 0


@given(region_iii(), st.floats(0, 20))
@settings(max_examples=100)
def test_over_compressive_ordering_in_time(s, t):
    sol = solve(s)
    rep = entropy_check(sol, s, t)
    assert rep.ordering_ok


@given(two_contact())
def test_j1_relation(s):
    sol = solve(s)
    assert isinstance(sol, TwoContacts)
    lhs = sol.intermediate.vel - s.params.A / sol.intermediate.rho
    rhs = s.u_l - s.params.A / s.rho_l
    assert abs(lhs - rhs) <= 1e-13 * max(abs(sol.intermediate.vel), s.params.A / sol.intermediate.rho, abs(rhs), 1e-300) + 1e-300


@given(two_contact(), st.floats(0.01, 50))
def test_mass_between_contacts(s, t):
    sol = solve(s)
    gap = path_position(sol.j2_speed0, t, s.params.beta) - path_position(sol.j1_speed0, t, s.params.beta)
    mass = sol.intermediate.rho * gap
    # the beta t^2/2 shifts cancel up to rounding of the positions
    scale = abs(path_position(sol.j2_speed0, t, s.params.beta)) + abs(path_position(sol.j1_speed0, t, s.params.beta))
    assert abs(mass - s.params.A * t) <= 1e-13 * (s.params.A * t + sol.intermediate.rho * scale)
    assert abs(sol.intermediate.rho * (sol.j2_speed0 - sol.j1_speed0) * t - s.params.A * t) <= 1e-12 * s.params.A * t


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_equal_density_continuity(sign):
    ul, ur, A, rl = 3.0, 0.0, 1.0, 1.0
    v_eq = solve(mk(rl, ul, rl, ur, A)).v_delta
    errs = [abs(solve(mk(rl, ul, rl * (1 + sign * e), ur, A)).v_delta - v_eq) for e in (1e-4, 1e-6, 1e-8)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-7


@given(any_setup(), st.lists(st.tuples(st.floats(-30, 30), st.floats(0.01, 5)), min_size=1, max_size=20))
def test_frame_consistency(s, probes):
    sol = solve(s)
    for x, t in probes:
        fixed = sample(sol, x, t, Frame.FIXED)
        moving = sample(sol, x, t, Frame.MOVING)
        assert fixed.kind is moving.kind
        if fixed.kind is SampleKind.SMOOTH:
            conv = frame_convert(moving.state, t, s.params, Frame.FIXED)
            assert conv.rho == fixed.state.rho
            assert abs(conv.vel - fixed.state.vel) <= 1e-13 * (1 + abs(fixed.state.vel))


@given(any_setup(), st.integers(-8, 8), st.lists(st.tuples(st.floats(-30, 30), st.floats(0.01, 5)), min_size=1, max_size=20))
def test_self_similarity_beta_zero(s, j, probes):
    sol = solve(s.with_params(beta=0.0))
    k = 2.0**j  # exact scaling keeps wave-path comparisons bitwise
    for x, t in probes:
        a, b = sample(sol, x, t), sample(sol, k * x, k * t)
        assert a.kind is b.kind
        if a.kind is SampleKind.SMOOTH:
            assert a.state == b.state


@given(any_setup(), st.integers(-6, 6))
def test_rescaling_density_and_A(s, j):
    k = 2.0**j
    a = solve(s)
    b = solve(mk(k * s.rho_l, s.u_l, k * s.rho_r, s.u_r, k * s.params.A, s.params.beta))
    assert a.kind == b.kind
    assert a.path_coefficients() == pytest.approx(b.path_coefficients(), rel=1e-12, abs=1e-12)


@given(any_setup())
def test_dict_roundtrip(s):
    sol = solve(s)
    d = json.loads(json.dumps(solution_to_dict(sol)))
    assert solution_from_dict(d) == sol


@given(st.floats(0.05, 20), vel, st.floats(0.05, 20), vel)
def test_transport_delta_properties(rl, ul, rr, ur):
    assume(ul > ur)
    sol = solve(mk(rl, ul, rr, ur, 0.0))
    assert ur <= sol.sigma <= ul
    # generalized Rankine-Hugoniot: w0 = sigma [rho] - [rho u], sigma w0 = sigma [rho u] - [rho u^2]
    jr = rr - rl
    jm = rr * ur - rl * ul
    je = rr * ur * ur - rl * ul * ul
    sc = (rr + rl) * (abs(ul) + abs(ur) + 1) ** 2
    assert abs(sol.w_slope - (sol.sigma * jr - jm)) <= 1e-12 * sc
    assert abs(sol.sigma * sol.w_slope - (sol.sigma * jm - je)) <= 1e-12 * sc * (1 + abs(sol.sigma))


def test_rationalised_root_keeps_precision_near_equal_densities():
    s = mk(1.0, 3.0, 1.0 + 1e-8, 0.0, 1.0)
    assert abs(delta_velocity(s) - 1.0) < 1e-7
    assert abs(oracle_v_delta(s) - delta_velocity(s)) < 1e-6
