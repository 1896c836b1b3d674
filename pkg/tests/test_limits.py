import csv
import json
import math
import random

import pytest

from riemann_awr.exact import TwoContacts, path_position, solve
from riemann_awr.limits import (
    contact_gap,
    default_a0_sequence,
    eventually_decreasing,
    loglog_slope,
    mass_between_contacts,
    sweep_to_A0,
    sweep_to_zero,
    vacuum_limit,
)
from riemann_awr.model import DomainError, NotApplicableError, RiemannSetup


def mk(rl, ul, rr, ur, A=1.0, beta=0.0):
    return RiemannSetup.from_values(rl, ul, rr, ur, A, beta)


def test_blowup_examples():
    s = mk(2, 4, 1, 1)
    assert solve(s.with_params(A=7)).intermediate.rho == 14.0
    assert math.isclose(solve(s.with_params(A=6.1)).intermediate.rho, 122.0, rel_tol=1e-12)
    rep = sweep_to_A0(s)
    assert abs(rep.records[-1]["blowup_ratio"] - 2.0) < 1e-9


@pytest.mark.parametrize("beta", [-2.0, 0.0, 2.0])
def test_sweep_to_A0(beta):
    rep = sweep_to_A0(mk(2, 4, 1, 1, beta=beta))
    assert rep.passed, rep.checks
    assert rep.targets["delta_at_A0"] == {"v_delta": 1.0, "w0": 6.0, "region": "S"}
    assert max(rep.errors["identity"]) <= 1e-12
    assert rep.errors["mass"][-1] < 1e-5
    assert abs(rep.records[-1]["momentum"] - (1 + beta) * 6) < 1e-4


def test_concentration_identity_random():
    rng = random.Random(7)
    s = mk(2, 4, 1, 1)
    for _ in range(20):
        A = rng.uniform(6, 8)
        t = rng.uniform(0.01, 10)
        beta = rng.uniform(-2, 2)
        sol = solve(s.with_params(A=A, beta=beta))
        assert abs(mass_between_contacts(sol, t) - A * t) <= 1e-12 * A * t
        diff = path_position(sol.j2_speed0, t, beta) - path_position(sol.j1_speed0, t, beta)
        assert abs(diff - contact_gap(sol, t)) <= 1e-12 * (1 + abs(path_position(sol.j2_speed0, t, beta)))


def test_sweep_to_A0_errors():
    with pytest.raises(DomainError):
        sweep_to_A0(mk(2, 4, 1, 1), [5.0])
    with pytest.raises(NotApplicableError):
        sweep_to_A0(mk(1, 1, 1, 0))
    with pytest.raises(NotApplicableError):
        sweep_to_A0(mk(1, 1, 1, 2))


def test_sweep_to_zero_rates():
    s = mk(4, 3, 1, 1)
    rep = sweep_to_zero(s, [10.0**-k for k in range(2, 9)])
    assert rep.passed
    assert math.isclose(rep.targets["sigma"], 7 / 3, rel_tol=1e-15) and rep.targets["w_slope"] == 4.0
    for k in ("v_delta", "w0"):
        assert 0.9 <= rep.slopes[k] <= 1.1
    assert rep.errors["v_delta"][-1] < 1e-7


def test_sweep_to_zero_equal_density():
    rep = sweep_to_zero(mk(1, 3, 1, 1), [0.5, 0.25, 0.125])
    for rec in rep.records:
        assert rec["v_delta"] == (4 - rec["A"]) / 2
    assert rep.targets["sigma"] == 2.0
    with pytest.raises(DomainError):
        sweep_to_zero(mk(1, 3, 1, 1), [5.0])
    with pytest.raises(NotApplicableError):
        sweep_to_zero(mk(1, 1, 1, 2))


def test_vacuum_limit():
    rep = vacuum_limit(mk(1, 2, 1, 3))
    assert rep.passed and rep.targets["tag"] == "vacuum"
    for rec in rep.records:
        A = rec["A"]
        assert math.isclose(rec["rho_star"], A / (1 + A), rel_tol=1e-14)
        assert rec["sigma1_0"] == 2 - A
    single = vacuum_limit(mk(1, 2, 3, 2))
    assert single.targets["tag"] == "single_contact"
    assert all(isinstance(solve(mk(1, 2, 3, 2, A)), TwoContacts) for A in single.A_values)
    with pytest.raises(NotApplicableError):
        vacuum_limit(mk(1, 3, 1, 2))


def test_helpers():
    assert abs(loglog_slope([1, 2, 4], [3, 6, 12]) - 1) < 1e-12
    assert math.isnan(loglog_slope([1, 2], [0, 1]))
    assert eventually_decreasing([5, 1, 3, 2, 1])
    assert not eventually_decreasing([1, 2, 3, 4])
    seq = default_a0_sequence(6, 8, 3)
    assert seq == [7.0, 6.5, 6.25]


def test_report_exports(tmp_path):
    rep = sweep_to_zero(mk(4, 3, 1, 1))
    rep.write_csv(tmp_path / "s.csv")
    rep.write_json(tmp_path / "s.json")
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0][:5] == ["A", "region", "rho_star", "v_delta", "w0"]
    assert rows[0][5:] == ["err_v_delta", "err_w0", "err_x"]
    assert len(rows) == 21
    data = json.load(open(tmp_path / "s.json"))
    assert data["pass"] is True and set(data) == {"kind", "targets", "slopes", "checks", "pass"}
