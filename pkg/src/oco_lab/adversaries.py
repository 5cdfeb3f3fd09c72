"""Adversarial loss generators, full-information and bandit.

Full-information constructions emit a subgradient per round with
||g_t||_{p*} <= L exactly; horizons are silently reduced to the largest
multiple of 4 where the construction needs it, with zero losses padding the
tail and the adjustment recorded on the instance. The two
schedule-reading constructions receive a read-only view of the learner's
declared step sizes at setup and never see the played point before
emitting.

Bandit environments release only the scalar <x_t, g_t> per round; the full
gradient stays inside the environment for accounting. Gaussian draws come
from counter-based per-trial streams so trials replay independently.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BallSpec, lp_norm
from .learners import ContractError, ScheduleView
from .rng import normals, rademacher, stream

__all__ = [
    "effective_horizon",
    "CornerAlternation",
    "RademacherLowdim",
    "RademacherHighdim",
    "StrongconvexKiller",
    "OMDCornerVariant",
    "QuadGrowth1D",
    "ZeroLosses",
    "BanditBigP",
    "BanditSmallP",
    "BanditP1",
    "make_adversary",
    "FULL_INFO_KINDS",
    "BANDIT_KINDS",
]


def effective_horizon(T: int) -> int:
    """Largest multiple of 4 not exceeding T."""
    return 4 * (T // 4)


@dataclass
class _AdversaryBase:
    spec: BallSpec
    T: int
    kind: str = field(init=False, default="")
    T_effective: int = field(init=False, default=0)
    warnings: list = field(init=False, default_factory=list)

    def _adjust_horizon(self):
        self.T_effective = effective_horizon(self.T)
        if self.T_effective != self.T:
            self.warnings.append(f"horizon reduced from {self.T} to {self.T_effective} (multiple of 4); tail rounds emit zero losses")

    def _zeros(self) -> np.ndarray:
        return np.zeros(self.spec.d)

    def _unit_corner(self) -> np.ndarray:
        # equal-entry vector with unit dual norm
        return np.full(self.spec.d, self.spec.d ** (-1.0 / self.spec.pstar))

    def gradient(self, t: int) -> np.ndarray:
        raise NotImplementedError


class CornerAlternation(_AdversaryBase):
    """Sign-alternating spike on the first coordinate for the first half,
    then a constant pull toward the equal-entry corner. The first-half
    gradients cancel pairwise, so the competitor is set entirely by the
    second half and its optimal value is -L T/2."""

    def __init__(self, spec: BallSpec, T: int):
        super().__init__(spec, T)
        self.kind = "corner-alternation"
        self._adjust_horizon()
        self.v = self._unit_corner()

    def gradient(self, t: int) -> np.ndarray:
        L = self.spec.L
        if t > self.T_effective:
            return self._zeros()
        if t <= self.T_effective // 2:
            g = self._zeros()
            g[0] = L * (-1.0) ** t
            return g
        return -L * self.v


class RademacherLowdim(_AdversaryBase):
    """Per-coordinate blocks of i.i.d. sign losses: k = floor(T/d) rounds on
    each coordinate in turn, zero losses afterwards. Requires d <= T."""

    def __init__(self, spec: BallSpec, T: int, seed: int):
        super().__init__(spec, T)
        self.kind = "rademacher-lowdim"
        if spec.d > T:
            raise ContractError(f"low-dimensional construction needs d <= T, got d={spec.d}, T={T}")
        self.T_effective = T
        self.k = T // spec.d
        self.signs = rademacher(stream(seed, 0), (spec.d, self.k))

    def gradient(self, t: int) -> np.ndarray:
        if t > self.spec.d * self.k:
            return self._zeros()
        i, j = divmod(t - 1, self.k)
        g = self._zeros()
        g[i] = self.spec.L * self.signs[i, j]
        return g


class RademacherHighdim(_AdversaryBase):
    """A fresh coordinate each round carrying an i.i.d. sign loss; needs
    d > T. The competitor value is -L T^(1/p*) regardless of the draw."""

    def __init__(self, spec: BallSpec, T: int, seed: int):
        super().__init__(spec, T)
        self.kind = "rademacher-highdim"
        if spec.d <= T:
            raise ContractError(f"high-dimensional construction needs d > T, got d={spec.d}, T={T}")
        self.T_effective = T
        self.signs = rademacher(stream(seed, 0), T)

    def gradient(self, t: int) -> np.ndarray:
        g = self._zeros()
        g[t - 1] = self.spec.L * self.signs[t - 1]
        return g


class StrongconvexKiller(_AdversaryBase):
    """Corner construction that steers its first-half spikes onto the
    coordinate with the currently largest declared step size; defeats any
    strongly-convex regularizer once d is large enough."""

    def __init__(self, spec: BallSpec, T: int, schedule_view: ScheduleView):
        super().__init__(spec, T)
        self.kind = "strongconvex-killer"
        if schedule_view is None:
            raise ContractError("strongconvex-killer needs the learner's schedule view")
        self._adjust_horizon()
        self.view = schedule_view
        self.v = self._unit_corner()

    def gradient(self, t: int) -> np.ndarray:
        L = self.spec.L
        if t > self.T_effective:
            return self._zeros()
        if t <= 2:
            return L * (-1.0) ** t * self.v
        if t <= self.T_effective // 2:
            etas = self.view.vector(2 * ((t - 1) // 2))
            i = int(np.argmax(etas))  # lowest index wins ties
            g = self._zeros()
            g[i] = L * (-1.0) ** t
            return g
        return -L * self.v


class OMDCornerVariant(_AdversaryBase):
    """Corner construction for mirror-style learners: the odd first-half
    spikes are shrunk by the step ratio eta_{t+1}/eta_t so the weighted
    gradient sums telescope exactly; even rounds push back at full budget."""

    def __init__(self, spec: BallSpec, T: int, schedule_view: ScheduleView):
        super().__init__(spec, T)
        self.kind = "omd-corner-variant"
        if schedule_view is None:
            raise ContractError("omd-corner-variant needs the learner's schedule view")
        self._adjust_horizon()
        self.view = schedule_view
        self.v = self._unit_corner()

    def gradient(self, t: int) -> np.ndarray:
        L = self.spec.L
        if t > self.T_effective:
            return self._zeros()
        if t <= self.T_effective // 2:
            g = self._zeros()
            if t % 2 == 1:
                g[0] = -L * self.view.scalar(t + 1) / self.view.scalar(t)
            else:
                g[0] = L
            return g
        return -L * self.v


class QuadGrowth1D(_AdversaryBase):
    """One-dimensional probe: alternating +/-L then constant -L. A learner
    whose regularizer lacks quadratic growth cannot hold c sqrt(T) regret."""

    def __init__(self, spec: BallSpec, T: int):
        super().__init__(spec, T)
        self.kind = "quad-growth-1d"
        if spec.d != 1:
            raise ContractError(f"quad-growth probe is one-dimensional, got d={spec.d}")
        self._adjust_horizon()

    def gradient(self, t: int) -> np.ndarray:
        L = self.spec.L
        if t > self.T_effective:
            return np.zeros(1)
        if t <= self.T_effective // 2:
            return np.array([L * (-1.0) ** t])
        return np.array([-L])


class ZeroLosses(_AdversaryBase):
    """Emits zero gradients; any learner has zero regret against it."""

    def __init__(self, spec: BallSpec, T: int):
        super().__init__(spec, T)
        self.kind = "zero"
        self.T_effective = T

    def gradient(self, t: int) -> np.ndarray:
        return self._zeros()


# ---------------------------------------------------------------------------
# bandit environments


class _BanditBase:
    """Common bandit plumbing: per-trial spawning, scalar feedback, and a
    running check of the subgradient budget."""

    kind = "bandit"

    def __init__(self, spec: BallSpec, T: int, seed: int):
        self.spec = spec
        self.T = T
        self.T_effective = T
        self.seed = seed
        self.warnings: list[str] = []
        self.t = 0
        self.max_gnorm = 0.0
        self.gradients: list[np.ndarray] = []  # retained internally only
        self.competitor_x: np.ndarray | None = None
        self.expected_round_loss = 0.0

    def spawn(self, trial: int):
        env = self.__class__(self.spec, self.T, self.seed, **self._params())
        env._start(stream(self.seed, 1, trial))
        return env

    def _params(self) -> dict:
        return {}

    def _start(self, gen: np.random.Generator):
        raise NotImplementedError

    def _draw_gradient(self, gen) -> np.ndarray:
        raise NotImplementedError

    def step(self, x: np.ndarray) -> float:
        """Consume the played point, return only the incurred scalar loss."""
        self.t += 1
        g = self._draw_gradient(self._gen)
        self.gradients.append(g)
        self.max_gnorm = max(self.max_gnorm, lp_norm(g, self.spec.pstar))
        return float(x @ g)

    def _warn_if(self, condition: bool, message: str):
        if condition:
            self.warnings.append(message)


class BanditBigP(_BanditBase):
    """Gaussian losses with a hidden sign pattern: per trial a uniform
    corner sign vector xi is fixed, gradients are N(eps xi, d^(-2/p*) I)
    scaled by L/5 so the dual-norm budget holds with probability >= 1-delta.
    eps = d^(-1/p*), so eps^{p*} d = 1; the competitor is -d^(-1/p) xi with
    mean loss -L/5 per round."""

    kind = "bandit-bigp"

    def __init__(self, spec: BallSpec, T: int, seed: int, delta: float = 0.01, c1: float = 1.0, C1: float = 1.0):
        super().__init__(spec, T, seed)
        self.delta = delta
        self.c1 = c1
        self.C1 = C1
        d, p, ps = spec.d, spec.p, spec.pstar
        self.eps = d ** (-1.0 / ps)
        self._warn_if(p <= 4.0 / 3.0, f"construction is calibrated for p > 4/3, got p={p}")
        self._warn_if(d <= 16 * T, f"regime wants d > 16T = {16 * T}, got d={d}")
        log_term = math.log(max(C1 * T / delta, 1.0 + 1e-12))
        self._warn_if(d <= log_term / c1, f"regime wants d > {log_term / c1:.3g} (concentration, c1={c1}, C1={C1})")
        self._warn_if(d <= (log_term / (c1 * ps)) ** (ps / 2.0), "regime wants larger d (dual-norm concentration)")
        self._warn_if(d <= math.e**2, "regime wants d > e^2")

    def _params(self):
        return {"delta": self.delta, "c1": self.c1, "C1": self.C1}

    def _start(self, gen):
        self._gen = gen
        d = self.spec.d
        self.xi = rademacher(gen, d)
        self.competitor_x = -self.spec.d ** (-1.0 / self.spec.p) * self.xi
        self.expected_round_loss = -self.spec.L / 5.0

    def _draw_gradient(self, gen):
        d, ps = self.spec.d, self.spec.pstar
        noise = normals(gen, d) * d ** (-1.0 / ps)
        return (self.spec.L / 5.0) * (self.eps * self.xi + noise)


class BanditSmallP(_BanditBase):
    """Gaussian losses with one hidden lifted coordinate Y: mean 1/2 on Y,
    zero elsewhere, noise scale sigma = 1/(8 sqrt(p*) d^(1/p*)). The
    competitor is -e_Y with mean loss -L/2 per round."""

    kind = "bandit-smallp"

    def __init__(self, spec: BallSpec, T: int, seed: int, delta: float = 0.01, c1: float = 1.0, C1: float = 1.0):
        super().__init__(spec, T, seed)
        self.delta = delta
        self.c1 = c1
        self.C1 = C1
        d, p, ps = spec.d, spec.p, spec.pstar
        self.sigma = 1.0 / (8.0 * math.sqrt(ps) * d ** (1.0 / ps))
        self._warn_if(not (1.0 < p <= 4.0 / 3.0), f"construction is calibrated for p in (1, 4/3], got p={p}")
        self._warn_if(d <= (128.0 * ps * T) ** 2, f"regime wants d > (128 p* T)^2 = {(128.0 * ps * T) ** 2:.3g}")
        log_term = math.log(max(C1 * T / delta, 1.0 + 1e-12))
        self._warn_if(d <= (log_term / (c1 * ps)) ** (ps / 2.0), "regime wants larger d (dual-norm concentration)")
        self._warn_if(d <= math.e**2, "regime wants d > e^2")

    def _params(self):
        return {"delta": self.delta, "c1": self.c1, "C1": self.C1}

    def _start(self, gen):
        self._gen = gen
        d = self.spec.d
        self.Y = int(gen.integers(0, d))
        self.competitor_x = np.zeros(d)
        self.competitor_x[self.Y] = -1.0
        self.expected_round_loss = -self.spec.L / 2.0

    def _draw_gradient(self, gen):
        d = self.spec.d
        g = self.sigma * normals(gen, d)
        g[self.Y] += 0.5
        return self.spec.L * g


class BanditP1(BanditSmallP):
    """Hidden-coordinate environment tuned for p at (or near) 1:
    sigma = 1/(4 sqrt(2) e sqrt(log d))."""

    kind = "bandit-p1"

    def __init__(self, spec: BallSpec, T: int, seed: int, delta: float = 0.01, c1: float = 1.0, C1: float = 1.0):
        _BanditBase.__init__(self, spec, T, seed)
        self.delta = delta
        self.c1 = c1
        self.C1 = C1
        d, p = spec.d, spec.p
        self.sigma = 1.0 / (4.0 * math.sqrt(2.0) * math.e * math.sqrt(math.log(d)))
        self._warn_if(d <= 8, "regime wants d > 8")
        self._warn_if(not (1.0 <= p <= 1.0 + 1.0 / math.log(max(d, 2))), f"construction is calibrated for p in [1, 1 + 1/log d], got p={p}")
        self._warn_if(d <= T / delta, f"regime wants d > T/delta = {T / delta:.3g}")
        self._warn_if(d <= 8**4 * math.e**4 * T**2, f"regime wants d > 8^4 e^4 T^2 = {8 ** 4 * math.e ** 4 * T ** 2:.3g}")


FULL_INFO_KINDS = (
    "corner-alternation",
    "rademacher-lowdim",
    "rademacher-highdim",
    "strongconvex-killer",
    "omd-corner-variant",
    "quad-growth-1d",
    "zero",
)

BANDIT_KINDS = ("bandit-bigp", "bandit-smallp", "bandit-p1")


def make_adversary(kind: str, spec: BallSpec, T: int, seed: int = 0, schedule_view=None, **kwargs):
    """Instantiate an adversary or bandit environment by its registry id."""
    if kind == "corner-alternation":
        return CornerAlternation(spec, T)
    if kind == "rademacher-lowdim":
        return RademacherLowdim(spec, T, seed)
    if kind == "rademacher-highdim":
        return RademacherHighdim(spec, T, seed)
    if kind == "strongconvex-killer":
        return StrongconvexKiller(spec, T, schedule_view)
    if kind == "omd-corner-variant":
        return OMDCornerVariant(spec, T, schedule_view)
    if kind == "quad-growth-1d":
        return QuadGrowth1D(spec, T)
    if kind == "zero":
        return ZeroLosses(spec, T)
    if kind == "bandit-bigp":
        return BanditBigP(spec, T, seed, **kwargs)
    if kind == "bandit-smallp":
        return BanditSmallP(spec, T, seed, **kwargs)
    if kind == "bandit-p1":
        return BanditP1(spec, T, seed, **kwargs)
    raise ContractError(f"unknown adversary kind {kind!r}")
