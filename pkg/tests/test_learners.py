import math

import numpy as np
import pytest

from oco_lab.geometry import BallSpec, dual_exponent
from oco_lab.learners import (
    ContractError,
    FTRLAdaptive,
    FTRLCoordwise,
    FTRLPower,
    OMDAdaptive,
    OMDPower,
    adaptive_regret_bound,
    adaptive_switch_round,
    ftrl_regret_bound,
    ftrl_step_size,
    lower_bound_value,
    omd_adaptive_switch_round,
    omd_regret_bound,
    omd_step_size,
)
from oco_lab.regularizers import RegSpec, phi_eval


def grid_argmin(objective, p, res=1e-3):
    """Dense d=2 search over the lp-ball."""
    g = np.arange(-1.0, 1.0 + res, res)
    X1, X2 = np.meshgrid(g, g, indexing="ij")
    mask = np.abs(X1) ** p + np.abs(X2) ** p <= 1.0
    vals = np.where(mask, objective(X1, X2), np.inf)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    return np.array([X1[i, j], X2[i, j]])


# ---------------------------------------------------------------------------
# schedules and closed-form bounds


@pytest.mark.parametrize("d,p,t", [(10, 10.0, 1), (100, 3.0, 7), (4096, 10.0, 40)])
def test_leader_step_size_closed_forms(d, p, t):
    ps = dual_exponent(p)
    eta2 = ftrl_step_size(2.0, 1.0, d ** (1.0 - 2.0 / p) / 2.0, 1.0, t)
    assert eta2 == pytest.approx(math.sqrt(d ** (1.0 - 2.0 / p) / (2.0 * t)), rel=1e-12)
    etap = ftrl_step_size(p, 2.0 ** (1.0 - p), 1.0 / p, 1.0, t)
    assert etap == pytest.approx(1.0 / (2.0 * ps * t) ** (1.0 / ps), rel=1e-12)


def test_leader_step_size_power_law():
    eta1 = ftrl_step_size(4.0, 0.125, 0.3, 2.0, 5)
    eta2 = ftrl_step_size(4.0, 0.125, 0.3, 2.0, 10)
    rs = dual_exponent(4.0)
    assert eta2 / eta1 == pytest.approx(2.0 ** (-1.0 / rs), rel=1e-12)


def test_leader_bound_closed_forms():
    d, p, L, T = 64, 10.0, 1.5, 33
    ps = dual_exponent(p)
    b2 = ftrl_regret_bound(2.0, 1.0, d ** (1.0 - 2.0 / p) / 2.0, L, T)
    assert b2 == pytest.approx(L * math.sqrt(2.0 * d ** (1.0 - 2.0 / p) * T), rel=1e-12)
    bp = ftrl_regret_bound(p, 2.0 ** (1.0 - p), 1.0 / p, L, T)
    assert bp == pytest.approx(L * (2.0 * ps * T) ** (1.0 / ps), rel=1e-12)
    assert ftrl_regret_bound(2.0, 1.0, 1.0, L, 0) == 0.0


@pytest.mark.parametrize("d,p,t", [(10, 10.0, 1), (100, 3.0, 9)])
def test_mirror_step_size_closed_forms(d, p, t):
    L = 2.0
    eta2 = omd_step_size(2.0, 1.0, 2.0 * d ** (1.0 - 2.0 / p), L, t)
    assert eta2 == pytest.approx(math.sqrt(2.0 * d ** (1.0 - 2.0 / p) / t) / L, rel=1e-12)
    etap = omd_step_size(p, 2.0 ** (1.0 - p), 2.0, L, t)
    assert etap == pytest.approx(((p - 1.0) / t) ** (1.0 - 1.0 / p) / L, rel=1e-12)
    assert omd_step_size(2.0, 1.0, 2.0, L, 4 * t) == pytest.approx(omd_step_size(2.0, 1.0, 2.0, L, t) / 2.0, rel=1e-12)


@pytest.mark.parametrize(
    "make",
    [
        lambda spec: FTRLPower(spec, 2.0),
        lambda spec: FTRLPower(spec, spec.p),
        lambda spec: OMDPower(spec, 2.0),
        lambda spec: FTRLCoordwise.default_scales(spec),
    ],
)
def test_schedules_positive_and_non_increasing(make):
    spec = BallSpec(d=5, p=10.0)
    learner = make(spec)
    etas = np.array([learner.eta_vector_at(k) for k in range(1, 60)])
    assert (etas > 0).all()
    assert (np.diff(etas, axis=0) <= 1e-15).all()


def test_adaptive_schedule_non_increasing_per_segment():
    spec = BallSpec(d=100, p=10.0)
    learner = FTRLAdaptive(spec)
    t0 = learner.threshold
    pre = [learner.eta_at(k) for k in range(0, int(t0))]
    post = [learner.eta_at(k) for k in range(int(t0) + 1, int(t0) + 40)]
    assert all(b <= a for a, b in zip(pre, pre[1:]))
    assert all(b <= a for a, b in zip(post, post[1:]))


# ---------------------------------------------------------------------------
# leader steps


def test_leader_step_at_zero_sum():
    spec = BallSpec(d=4, p=10.0)
    for learner in (FTRLPower(spec, 2.0), FTRLPower(spec, 10.0), FTRLCoordwise.default_scales(spec)):
        assert not learner.act().any()


def test_leader_step_spike_closed_form():
    # cumulative gradient -L e1 yields min(1, L eta) e1 in the quadratic geometry
    spec = BallSpec(d=6, p=10.0, L=2.0)
    learner = FTRLPower(spec, 2.0)
    g = np.zeros(6)
    g[0] = -spec.L
    learner.observe(g)
    x = learner.act()
    eta = learner.current_eta
    assert x[0] == pytest.approx(min(1.0, spec.L * eta), rel=1e-12)
    assert not x[1:].any()


@pytest.mark.parametrize("r", [2.0, 4.0, 10.0])
def test_leader_step_corner_pull_closed_form(r):
    # cumulative gradient -L*beta*v: compare against the analytic rescaled
    # corner expression min(1, d^(1-r*/p*) (L eta beta)^(r*-1)) v/||v||_p
    d, p, L, beta = 8, 10.0, 1.0, 11
    spec = BallSpec(d=d, p=p, L=L)
    ps, rs = dual_exponent(p), dual_exponent(r)
    v = np.full(d, d ** (-1.0 / ps))
    learner = FTRLPower(spec, r)
    learner.S = -L * beta * v
    learner.t = beta + 1
    x = learner.act()
    eta = learner.current_eta
    scale = min(1.0, d ** (1.0 - rs / ps) * (L * eta * beta) ** (rs - 1.0))
    np.testing.assert_allclose(x, scale * d ** (-1.0 / p) * np.ones(d), rtol=1e-9)


def test_leader_step_matches_grid_oracle_d2():
    p = 4.0
    spec = BallSpec(d=2, p=p)
    rng = np.random.default_rng(37)
    for r in (2.0, 3.0, 4.0):
        learner = FTRLPower(spec, r)
        S = rng.standard_normal(2) * 3.0
        learner.S = S
        learner.t = 5
        x = learner.act()
        eta = learner.current_eta
        objective = lambda a, b: (np.abs(a) ** r + np.abs(b) ** r) / r + eta * (S[0] * a + S[1] * b)
        x_grid = grid_argmin(objective, p)
        # at least as good as the exhaustive search, and nearby (the grid
        # argmin wanders a few cells along flat boundary arcs)
        assert objective(x[0], x[1]) <= objective(x_grid[0], x_grid[1]) + 1e-10
        assert np.abs(x - x_grid).max() <= 5e-3


def test_coordwise_reduces_to_scalar_and_matches_grid():
    spec = BallSpec(d=2, p=4.0)
    plain = FTRLPower(spec, 2.0)
    coord = FTRLCoordwise(spec, 2.0, lambda k: np.full(2, plain.eta_at(k)))
    g = np.array([0.7, -0.4])
    for learner in (plain, coord):
        learner.observe(g)
    np.testing.assert_array_equal(plain.act(), coord.act())

    rng = np.random.default_rng(41)
    S = rng.standard_normal(2) * 1.2
    etas = np.array([0.5, 0.2])
    coord2 = FTRLCoordwise(spec, 3.0, lambda k: etas)
    coord2.S = S
    x = coord2.act()
    x_grid = grid_argmin(
        lambda a, b: (np.abs(a) ** 3 + np.abs(b) ** 3) / 3 + etas[0] * S[0] * a + etas[1] * S[1] * b, 4.0
    )
    assert np.abs(x - x_grid).max() <= 1e-3 + 1e-9


# ---------------------------------------------------------------------------
# adaptive switching


def test_adaptive_switch_round_value():
    assert adaptive_switch_round(10.0, 1000) == pytest.approx(3.0 ** -2.5 * 1000)
    assert adaptive_switch_round(10.0, 1000) == pytest.approx(64.15, abs=0.01)
    learner = FTRLAdaptive(BallSpec(d=1000, p=10.0))
    assert learner.r_at(64) == 10.0
    assert learner.r_at(65) == 2.0


def test_adaptive_degenerates_to_quadratic_in_1d():
    learner = FTRLAdaptive(BallSpec(d=1, p=10.0))
    assert learner.threshold < 1.0
    assert learner.r_at(1) == 2.0


def test_adaptive_identical_to_fixed_before_switch():
    # bitwise equality while the threshold is never crossed
    spec = BallSpec(d=4096, p=10.0)
    adaptive, fixed = FTRLAdaptive(spec), FTRLPower(spec, 10.0)
    rng = np.random.default_rng(43)
    for _ in range(30):
        xa, xf = adaptive.act(), fixed.act()
        np.testing.assert_array_equal(xa, xf)
        assert adaptive.current_eta == fixed.current_eta
        g = rng.standard_normal(4096)
        g *= spec.L / np.sum(np.abs(g) ** spec.pstar) ** (1.0 / spec.pstar)
        adaptive.observe(g)
        fixed.observe(g)


def test_adaptive_bound_branches():
    p, d, L = 10.0, 1000, 1.0
    ps = dual_exponent(p)
    t0 = adaptive_switch_round(p, d)
    T_lo, T_hi = int(t0) - 1, int(t0) + 10
    assert adaptive_regret_bound(p, d, L, T_lo) == pytest.approx(L * (2 * ps * T_lo) ** (1 / ps))
    assert adaptive_regret_bound(p, d, L, T_hi) == pytest.approx(L * math.sqrt(2 * T_hi * d ** 0.8))


# ---------------------------------------------------------------------------
# mirror steps


def test_mirror_step_basics():
    spec = BallSpec(d=3, p=4.0)
    learner = OMDPower(spec, 2.0)
    x0 = learner.act()
    learner.observe(np.zeros(3))
    np.testing.assert_array_equal(learner.act(), x0)


def test_mirror_step_small_quadratic_move():
    spec = BallSpec(d=3, p=4.0, L=20.0)  # large budget => tiny eta
    learner = OMDPower(spec, 2.0)
    learner.act()
    g = np.array([0.3, -0.2, 0.1])
    eta = learner.eta_at(1)
    learner.observe(g)
    np.testing.assert_allclose(learner.act(), -eta * g, rtol=1e-12)


def test_mirror_step_matches_grid_oracle_d2():
    p = 5.0
    spec = BallSpec(d=2, p=p)
    rng = np.random.default_rng(47)
    for r in (2.0, 3.0):
        learner = OMDPower(spec, r)
        x_t = np.array([0.4, -0.3])
        learner.x = x_t.copy()
        learner.t = 6
        g = rng.standard_normal(2) * 0.6
        eta = learner.eta_at(6)
        learner.observe(g)
        x = learner.act()

        def objective(a, b):
            phi_x = (np.abs(a) ** r + np.abs(b) ** r) / r
            gy = np.sign(x_t) * np.abs(x_t) ** (r - 1.0)
            breg = phi_x - phi_eval(r, x_t) - (gy[0] * (a - x_t[0]) + gy[1] * (b - x_t[1]))
            return eta * (g[0] * a + g[1] * b) + breg

        x_grid = grid_argmin(objective, p)
        assert np.abs(x - x_grid).max() <= 1e-3 + 1e-9


def test_mirror_adaptive_switch_round_value():
    p, d = 10.0, 100
    ps = dual_exponent(p)
    expected = (math.sqrt(2.0) * p ** (1 / p) * ps ** (1 / ps)) ** (-2 * p / (p - 2)) * d
    assert omd_adaptive_switch_round(p, d) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(18.65, abs=0.01)


def test_mirror_adaptive_keeps_iterate_at_switch():
    spec = BallSpec(d=100, p=10.0)
    learner = OMDAdaptive(spec)
    t0 = int(learner.threshold)
    assert t0 >= 2
    rng = np.random.default_rng(53)
    for _ in range(t0):
        learner.act()
        learner.observe(rng.standard_normal(100) * 0.01)
    carried = learner.x.copy()
    assert learner.r_at(t0) == 10.0 and learner.r_at(t0 + 1) == 2.0
    # the first degree-2 round plays exactly the last degree-p iterate
    np.testing.assert_array_equal(learner.act(), carried)


def test_mirror_bound_closed_form():
    d, p, L, T = 64, 10.0, 1.0, 20
    b2 = omd_regret_bound(2.0, 1.0, 2.0 * d ** 0.8, L, T)
    assert b2 == pytest.approx(2.0 * L * math.sqrt(2.0 * T * d ** 0.8), rel=1e-12)


# ---------------------------------------------------------------------------
# regret floors


def test_lower_bound_value_branches():
    p, L, T = 10.0, 1.0, 40
    assert lower_bound_value("phi2", p, 10**12, L, T) == pytest.approx(T / 16.0)
    assert lower_bound_value("phi2", p, 4, L, T) == pytest.approx(math.sqrt(T * 4 ** 0.8) / 8.0)
    assert lower_bound_value("phir", p, 50, L, T, r=2.0) == pytest.approx(lower_bound_value("phi2", p, 50, L, T))
    assert lower_bound_value("phir", p, 50, L, T, r=p) == pytest.approx(lower_bound_value("phip", p, 50, L, T))
    with pytest.raises(ContractError):
        lower_bound_value("phir", p, 50, L, T)
    with pytest.raises(ContractError) as err:
        lower_bound_value("strongly-convex", p, 10, L, T)
    assert f"{(4.0 * T) ** (p / (p - 2.0)):.6g}" in str(err.value)
    d_ok = math.ceil((4.0 * T) ** (p / (p - 2.0)))
    assert lower_bound_value("strongly-convex", p, d_ok, L, T) == pytest.approx(L * T / 8.0)


def test_learner_degree_capped_by_ball_exponent():
    with pytest.raises(ContractError):
        FTRLPower(BallSpec(d=4, p=3.0), 5.0)
    with pytest.raises(ContractError):
        OMDPower(BallSpec(d=4, p=3.0), 5.0)
