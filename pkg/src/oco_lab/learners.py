"""Learner update rules and their regret-bound calculators.

Two families, both driven by the power-norm regularizers:

* leader-style (FTRL): play the minimizer of phi_r(x)/eta + <S, x> where S
  is the running subgradient sum; computed in closed form as a Bregman
  projection of the conjugate-gradient image of -eta*S.
* mirror-style (OMD): proximal step through the phi_r geometry,
  x_{t+1} = argmin eta_t <g_t, x> + D_{phi_r}(x, x_t).

Each family comes in fixed-degree, regime-adaptive (degree p early, degree
2 after a dimension-scaled switch round), and, for the leader family,
coordinate-wise step-size variants. Bound calculators return the anytime
upper bounds the harness checks against measured regret, and
lower_bound_value gives the floor each adversarial construction is
guaranteed to force.
"""

import math

import numpy as np

from .geometry import BallSpec, DomainError, dual_exponent, lp_norm
from .projection import bregman_project
from .regularizers import RegSpec, conjugate_grad, convexity_constant, phi_eval, phi_grad

__all__ = [
    "ftrl_step_size",
    "omd_step_size",
    "ftrl_regret_bound",
    "omd_regret_bound",
    "adaptive_switch_round",
    "adaptive_regret_bound",
    "omd_adaptive_switch_round",
    "omd_adaptive_regret_bound",
    "trajectory_regret_bound",
    "lower_bound_value",
    "FTRLPower",
    "FTRLAdaptive",
    "FTRLCoordwise",
    "OMDPower",
    "OMDAdaptive",
    "ScheduleView",
]


class ContractError(ValueError):
    """An operation was invoked outside its declared contract."""


# ---------------------------------------------------------------------------
# step-size schedules and closed-form bounds


def ftrl_step_size(r: float, mu: float, D: float, L: float, t: int) -> float:
    """Leader step size eta_{t-1} = D^(1/r*) mu^(1/r) / (L (r*-1)^(1/r*) t^(1/r*))."""
    if t < 1:
        raise ContractError("round index must be >= 1")
    rs = dual_exponent(r)
    return D ** (1.0 / rs) * mu ** (1.0 / r) / (L * (rs - 1.0) ** (1.0 / rs) * t ** (1.0 / rs))


def omd_step_size(r: float, mu: float, D_max: float, L: float, t: int) -> float:
    """Mirror step size eta_t = D_max^(1/r*) (r-1)^(1/r*) mu^(1/r) / (L t^(1/r*))."""
    if t < 1:
        raise ContractError("round index must be >= 1")
    rs = dual_exponent(r)
    return D_max ** (1.0 / rs) * (r - 1.0) ** (1.0 / rs) * mu ** (1.0 / r) / (L * t ** (1.0 / rs))


def ftrl_regret_bound(r: float, mu: float, D: float, L: float, T: int) -> float:
    """Anytime regret bound r^(1/r) r*^(1/r*) mu^(-1/r) L D^(1/r) T^(1/r*)."""
    if T == 0:
        return 0.0
    rs = dual_exponent(r)
    return r ** (1.0 / r) * rs ** (1.0 / rs) * mu ** (-1.0 / r) * L * D ** (1.0 / r) * T ** (1.0 / rs)


def omd_regret_bound(r: float, mu: float, D_max: float, L: float, T: int) -> float:
    """Anytime mirror-descent bound L D_max^(1/r) r^(1/r) r*^(1/r*) mu^(-1/r) T^(1/r*)."""
    if T == 0:
        return 0.0
    rs = dual_exponent(r)
    return L * D_max ** (1.0 / r) * r ** (1.0 / r) * rs ** (1.0 / rs) * mu ** (-1.0 / r) * T ** (1.0 / rs)


def adaptive_switch_round(p: float, d: int) -> float:
    """Round threshold 3^(-2p/(p-2)) d below which degree-p regularization runs."""
    return 3.0 ** (-2.0 * p / (p - 2.0)) * d


def adaptive_regret_bound(p: float, d: int, L: float, T: int) -> float:
    """Anytime bound of the switching leader: the degree-p bound up to the
    switch round, the strongly-convex bound beyond it."""
    if T == 0:
        return 0.0
    ps = dual_exponent(p)
    if T <= adaptive_switch_round(p, d):
        return L * (2.0 * ps * T) ** (1.0 / ps)
    return L * math.sqrt(2.0 * T * d ** (1.0 - 2.0 / p))


def omd_adaptive_switch_round(p: float, d: int) -> float:
    """Mirror-family switch round (sqrt(2) p^(1/p) p*^(1/p*))^(-2p/(p-2)) d,
    the largest threshold for which the degree-2 phase bound absorbs the
    degree-p phase (the exponent must be negative for that to happen,
    mirroring the leader family's 3^(-2p/(p-2)) d)."""
    ps = dual_exponent(p)
    return (math.sqrt(2.0) * p ** (1.0 / p) * ps ** (1.0 / ps)) ** (-2.0 * p / (p - 2.0)) * d


def omd_adaptive_regret_bound(p: float, d: int, L: float, T: int) -> float:
    if T == 0:
        return 0.0
    ps = dual_exponent(p)
    if T <= omd_adaptive_switch_round(p, d):
        return 2.0 * p ** (1.0 / p) * ps ** (1.0 / ps) * L * T ** (1.0 / ps)
    return 2.0 * L * math.sqrt(2.0 * T * d ** (1.0 - 2.0 / p))


def lower_bound_value(kind: str, p: float, d: int, L: float, T: int, r: float | None = None) -> float:
    """Regret floor forced by the corner-style constructions.

    kind selects the targeted regularizer family: "phi2" (degree 2),
    "phip" (degree p), "phir" (degree r, reduces to the other two at
    r = 2 and r = p), or "strongly-convex" (linear-regret floor, valid
    only once d >= (4T)^(p/(p-2)) for a 1-strongly-convex regularizer).
    """
    ps = dual_exponent(p)
    if kind == "phi2":
        return L * min(T / 16.0, math.sqrt(T * d ** (1.0 - 2.0 / p)) / 8.0)
    if kind == "phip":
        return L * min(T / (8.0 * p), T ** (1.0 / ps) / 8.0)
    if kind == "phir":
        if r is None:
            raise ContractError("kind 'phir' needs the degree r")
        rs = dual_exponent(r)
        return L * min(T / (8.0 * r), d ** ((rs - ps) / (rs * ps)) * T ** (1.0 / rs) / 8.0)
    if kind == "strongly-convex":
        d_required = (4.0 * T) ** (p / (p - 2.0))
        if d < d_required:
            raise ContractError(f"linear-regret floor needs d >= {d_required:.6g}, got {d}")
        return L * T / 8.0
    raise ContractError(f"unknown lower bound kind {kind!r}")


# ---------------------------------------------------------------------------
# learners


class ScheduleView:
    """Read-only view of a learner's declared step sizes.

    Adversaries that are allowed to read the schedule get this view at game
    setup; index k is the subscript of the eta sequence (eta_k is the step
    that produces the point of round k+1 for leader-style learners, and the
    step that processes g_k for mirror-style learners).
    """

    def __init__(self, learner):
        self._learner = learner

    def scalar(self, k: int) -> float:
        return self._learner.eta_at(k)

    def vector(self, k: int) -> np.ndarray:
        return self._learner.eta_vector_at(k)


class _LearnerBase:
    learner_id = "base"

    def __init__(self, spec: BallSpec):
        self.spec = spec
        self.t = 1
        self.current_r = math.nan
        self.current_eta = math.nan

    def schedule_view(self) -> ScheduleView:
        return ScheduleView(self)

    def r_at(self, t: int) -> float:
        raise NotImplementedError

    def eta_at(self, k: int) -> float:
        raise NotImplementedError

    def eta_vector_at(self, k: int) -> np.ndarray:
        return np.full(self.spec.d, self.eta_at(k))

    def bound(self, T: int) -> float:
        return math.nan


class FTRLPower(_LearnerBase):
    """Leader updates with the fixed regularizer phi_r and tuned steps."""

    def __init__(self, spec: BallSpec, r: float, tol: float = 1e-10):
        super().__init__(spec)
        if r > spec.p:
            raise ContractError(f"degree r={r} exceeds ball exponent p={spec.p}")
        self.reg = RegSpec.for_ftrl(r, spec)
        self.r = r
        self.tol = tol
        self.S = np.zeros(spec.d)
        self.learner_id = "ftrl-phi2" if r == 2.0 else ("ftrl-phip" if r == spec.p else f"ftrl-phir-{r:g}")

    def r_at(self, t: int) -> float:
        return self.r

    def eta_at(self, k: int) -> float:
        return ftrl_step_size(self.r, self.reg.mu, self.reg.D, self.spec.L, k + 1)

    def act(self) -> np.ndarray:
        self.current_r = self.r
        self.current_eta = self.eta_at(self.t - 1)
        z = conjugate_grad(self.r, -self.current_eta * self.S)
        return bregman_project(self.r, z, self.spec, tol=self.tol)

    def observe(self, g: np.ndarray):
        self.S = self.S + g
        self.t += 1

    def bound(self, T: int) -> float:
        return ftrl_regret_bound(self.r, self.reg.mu, self.reg.D, self.spec.L, T)


class FTRLAdaptive(_LearnerBase):
    """Leader updates switching from degree p to degree 2 at the switch
    round; both phases reuse the fixed-regularizer schedule, so a run that
    never crosses the threshold is bitwise identical to FTRLPower(r=p)."""

    def __init__(self, spec: BallSpec, threshold: float | None = None, tol: float = 1e-10):
        super().__init__(spec)
        if spec.p <= 2.0:
            raise ContractError("adaptive regularization needs p > 2")
        self.tuned = threshold is None
        self.threshold = adaptive_switch_round(spec.p, spec.d) if threshold is None else float(threshold)
        self.reg_p = RegSpec.for_ftrl(spec.p, spec)
        self.reg_2 = RegSpec.for_ftrl(2.0, spec)
        self.tol = tol
        self.S = np.zeros(spec.d)
        self.learner_id = "ftrl-adaptive" if self.tuned else f"ftrl-adaptive-t0-{self.threshold:g}"

    def r_at(self, t: int) -> float:
        return self.spec.p if t <= self.threshold else 2.0

    def _reg(self, t: int) -> RegSpec:
        return self.reg_p if t <= self.threshold else self.reg_2

    def eta_at(self, k: int) -> float:
        reg = self._reg(k + 1)
        return ftrl_step_size(reg.r, reg.mu, reg.D, self.spec.L, k + 1)

    def act(self) -> np.ndarray:
        reg = self._reg(self.t)
        self.current_r = reg.r
        self.current_eta = self.eta_at(self.t - 1)
        z = conjugate_grad(reg.r, -self.current_eta * self.S)
        return bregman_project(reg.r, z, self.spec, tol=self.tol)

    def observe(self, g: np.ndarray):
        self.S = self.S + g
        self.t += 1

    def bound(self, T: int) -> float:
        if not self.tuned:
            return math.nan
        return adaptive_regret_bound(self.spec.p, self.spec.d, self.spec.L, T)


class FTRLCoordwise(_LearnerBase):
    """Leader updates with one decreasing step size per coordinate:
    x_t minimizes phi_r(x) + sum_i eta_{t-1,i} x_i S_i."""

    def __init__(self, spec: BallSpec, r: float, eta_fn, tol: float = 1e-10):
        super().__init__(spec)
        self.r = r
        self.eta_fn = eta_fn  # k -> (d,) vector eta_k
        self.tol = tol
        self.S = np.zeros(spec.d)
        self.learner_id = "ftrl-coordwise"

    @classmethod
    def default_scales(cls, spec: BallSpec, r: float = 2.0) -> "FTRLCoordwise":
        # per-coordinate multiples of the tuned scalar schedule, spread
        # geometrically over [1/2, 1]
        reg = RegSpec.for_ftrl(r, spec)
        scales = 2.0 ** (-np.arange(spec.d) / max(spec.d - 1, 1))

        def eta_fn(k: int) -> np.ndarray:
            return scales * ftrl_step_size(r, reg.mu, reg.D, spec.L, k + 1)

        return cls(spec, r, eta_fn)

    def r_at(self, t: int) -> float:
        return self.r

    def eta_at(self, k: int) -> float:
        return float(self.eta_fn(k).max())

    def eta_vector_at(self, k: int) -> np.ndarray:
        return np.asarray(self.eta_fn(k), dtype=float)

    def act(self) -> np.ndarray:
        eta = self.eta_vector_at(self.t - 1)
        self.current_r = self.r
        self.current_eta = float(eta.max())
        z = conjugate_grad(self.r, -eta * self.S)
        return bregman_project(self.r, z, self.spec, tol=self.tol)

    def observe(self, g: np.ndarray):
        self.S = self.S + g
        self.t += 1


class OMDPower(_LearnerBase):
    """Mirror steps through the fixed phi_r geometry with anytime steps."""

    def __init__(self, spec: BallSpec, r: float, tol: float = 1e-10):
        super().__init__(spec)
        if r > spec.p:
            raise ContractError(f"degree r={r} exceeds ball exponent p={spec.p}")
        self.reg = RegSpec.for_omd(r, spec)
        self.r = r
        self.tol = tol
        self.x = np.zeros(spec.d)
        self.learner_id = "omd-phi2" if r == 2.0 else ("omd-phip" if r == spec.p else f"omd-phir-{r:g}")

    def r_at(self, t: int) -> float:
        return self.r

    def eta_at(self, k: int) -> float:
        return omd_step_size(self.r, self.reg.mu, self.reg.D, self.spec.L, max(k, 1))

    def act(self) -> np.ndarray:
        self.current_r = self.r
        self.current_eta = self.eta_at(self.t)
        return self.x.copy()

    def observe(self, g: np.ndarray):
        eta = self.eta_at(self.t)
        theta = phi_grad(self.r, self.x) - eta * g
        self.x = bregman_project(self.r, conjugate_grad(self.r, theta), self.spec, tol=self.tol)
        self.t += 1

    def bound(self, T: int) -> float:
        return omd_regret_bound(self.r, self.reg.mu, self.reg.D, self.spec.L, T)


class OMDAdaptive(_LearnerBase):
    """Mirror steps that switch geometry from degree p to degree 2; the
    iterate is carried across the switch unchanged, only (r, eta) change."""

    def __init__(self, spec: BallSpec, threshold: float | None = None, tol: float = 1e-10):
        super().__init__(spec)
        if spec.p <= 2.0:
            raise ContractError("adaptive regularization needs p > 2")
        self.threshold = omd_adaptive_switch_round(spec.p, spec.d) if threshold is None else float(threshold)
        self.tuned = threshold is None
        self.reg_p = RegSpec.for_omd(spec.p, spec)
        self.reg_2 = RegSpec.for_omd(2.0, spec)
        self.tol = tol
        self.x = np.zeros(spec.d)
        self.learner_id = "omd-adaptive"

    def r_at(self, t: int) -> float:
        return self.spec.p if t <= self.threshold else 2.0

    def _reg(self, t: int) -> RegSpec:
        return self.reg_p if t <= self.threshold else self.reg_2

    def eta_at(self, k: int) -> float:
        k = max(k, 1)
        reg = self._reg(k)
        return omd_step_size(reg.r, reg.mu, reg.D, self.spec.L, k)

    def act(self) -> np.ndarray:
        self.current_r = self.r_at(self.t)
        self.current_eta = self.eta_at(self.t)
        return self.x.copy()

    def observe(self, g: np.ndarray):
        r = self.r_at(self.t)
        eta = self.eta_at(self.t)
        theta = phi_grad(r, self.x) - eta * g
        self.x = bregman_project(r, conjugate_grad(r, theta), self.spec, tol=self.tol)
        self.t += 1

    def bound(self, T: int) -> float:
        if not self.tuned:
            return math.nan
        return omd_adaptive_regret_bound(self.spec.p, self.spec.d, self.spec.L, T)


# ---------------------------------------------------------------------------
# trajectory certificate


def trajectory_regret_bound(trace) -> float:
    """Evaluate the leader family's regret certificate along a realized
    trajectory: the final regularizer at the exact competitor, plus the
    per-round stability terms (r-1)/(r mu^(1/(r-1))) ||g||_*^(r/(r-1)) and
    the regularizer-change terms psi_t(x_{t+1}) - psi_{t+1}(x_{t+1}).

    Measured regret never exceeds this value; the harness checks the
    inequality on every leader run.
    """
    rows = trace.rows
    if not rows:
        return 0.0
    T = len(rows)
    last = rows[-1]
    u = trace.competitor
    rhs = phi_eval(last.r, u) / last.eta
    for i, row in enumerate(rows):
        mu_t = convexity_constant(row.r) / row.eta
        stability = (row.r - 1.0) / (row.r * mu_t ** (1.0 / (row.r - 1.0))) * row.gdual ** (row.r / (row.r - 1.0))
        if i + 1 < T:
            # psi_t(x_{t+1}) - psi_{t+1}(x_{t+1}); the closing round reuses
            # its own regularizer, so its difference term vanishes
            delta = row.phi_next_own / row.eta - row.phi_next_new / rows[i + 1].eta
        else:
            delta = 0.0
        rhs += stability + delta
    return float(rhs)
