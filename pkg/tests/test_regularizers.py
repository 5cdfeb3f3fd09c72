import numpy as np
import pytest

from oco_lab.geometry import BallSpec, DomainError, sample_ball
from oco_lab.regularizers import RegSpec, bregman, conjugate_grad, convexity_constant, phi_eval, phi_grad


def test_phi_eval_values():
    assert phi_eval(3.0, np.zeros(5)) == 0.0
    e1 = np.zeros(4)
    e1[0] = 1.0
    assert phi_eval(10.0, e1) == pytest.approx(0.1)
    assert phi_eval(2.0, np.ones(8)) == pytest.approx(4.0)


def test_phi_grad_values():
    e1 = np.array([1.0, 0.0])
    np.testing.assert_allclose(phi_grad(3.0, e1), e1)
    x = np.array([-0.5, 0.5])
    np.testing.assert_allclose(phi_grad(2.0, x), x)


@pytest.mark.parametrize("r", [2.0, 3.0, 10.0])
def test_phi_grad_matches_finite_differences(r):
    rng = np.random.default_rng(2)
    h = 1e-6
    for _ in range(20):
        x = rng.uniform(-1.0, 1.0, size=6)
        x[np.abs(x) < 1e-3] = 0.1  # keep away from the kink region
        g = phi_grad(r, x)
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            fd = (phi_eval(r, x + e) - phi_eval(r, x - e)) / (2 * h)
            assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-9)


def test_conjugate_grad_values():
    e1 = np.array([1.0, 0.0, 0.0])
    for r in (2.0, 3.0, 10.0):
        np.testing.assert_allclose(conjugate_grad(r, e1), e1)
    r = 7.0
    theta = 2.0 ** (r - 1.0) * e1
    np.testing.assert_allclose(conjugate_grad(r, theta), 2.0 * e1, rtol=1e-12)


@pytest.mark.parametrize("r", [2.0, 3.5, 10.0])
def test_conjugate_grad_round_trip(r):
    rng = np.random.default_rng(4)
    for _ in range(25):
        x = rng.uniform(-2.0, 2.0, size=5)
        np.testing.assert_allclose(conjugate_grad(r, phi_grad(r, x)), x, atol=1e-10)


def test_bregman_basics():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(4)
    assert bregman(5.0, x, x) == pytest.approx(0.0, abs=1e-15)
    y = rng.standard_normal(4)
    assert bregman(2.0, x, y) == pytest.approx(0.5 * np.sum((x - y) ** 2), rel=1e-12)


def test_bregman_nonnegative_sampled():
    p = 10.0
    spec = BallSpec(d=6, p=p)
    rng = np.random.default_rng(8)
    X = sample_ball(spec, 10**5, rng)
    Y = sample_ball(spec, 10**5, rng)
    div = phi_eval(p, X) - phi_eval(p, Y) - (phi_grad(p, Y) * (X - Y)).sum(axis=1)
    assert div.min() >= -1e-12
    # the mirror-role diameter: sup of the divergence over the ball is 2
    assert div.max() <= 2.0 + 1e-9


def test_phi_diameters_on_ball():
    p = 10.0
    for d in (4, 32):
        spec = BallSpec(d=d, p=p)
        X = sample_ball(spec, 10**5, np.random.default_rng(9))
        assert phi_eval(2.0, X).max() <= d ** (1.0 - 2.0 / p) / 2.0 + 1e-9
        assert phi_eval(p, X).max() <= 1.0 / p + 1e-9


def test_degree_validation():
    with pytest.raises(DomainError):
        phi_eval(1.5, np.ones(2))
    with pytest.raises(DomainError):
        phi_grad(1.0, np.ones(2))


def test_regspec_constants():
    spec = BallSpec(d=100, p=10.0)
    leader2 = RegSpec.for_ftrl(2.0, spec)
    assert leader2.mu == 1.0
    assert leader2.D == pytest.approx(100 ** 0.8 / 2.0, rel=1e-12)
    leaderp = RegSpec.for_ftrl(10.0, spec)
    assert leaderp.mu == pytest.approx(2.0 ** -9.0)
    assert leaderp.D == pytest.approx(0.1, rel=1e-12)
    mirror2 = RegSpec.for_omd(2.0, spec)
    assert mirror2.D == pytest.approx(2.0 * 100 ** 0.8, rel=1e-12)
    mirrorp = RegSpec.for_omd(10.0, spec)
    assert mirrorp.D == pytest.approx(2.0, rel=1e-12)
    assert convexity_constant(4.0) == pytest.approx(2.0 ** -3.0)
