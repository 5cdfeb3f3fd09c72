"""lp-ball geometry: dual exponents, norms, exact linear competitors, and
a sampled certifier for uniform convexity of candidate regularizers.

All vector arithmetic is float64 numpy. Functions here are pure and safe to
call from concurrent workers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BallSpec",
    "ConvexityReport",
    "dual_exponent",
    "lp_norm",
    "linear_minimizer_on_ball",
    "sample_ball",
    "check_uniform_convexity",
]


class DomainError(ValueError):
    """Raised when an argument lies outside a function's domain."""


def dual_exponent(r: float) -> float:
    """Dual exponent r* with 1/r + 1/r* = 1. Returns inf for r = 1."""
    if not math.isfinite(r):
        if r == math.inf:
            return 1.0
        raise DomainError(f"exponent must be >= 1, got {r}")
    if r < 1.0:
        raise DomainError(f"exponent must be >= 1, got {r}")
    if r == 1.0:
        return math.inf
    return r / (r - 1.0)


def lp_norm(x: np.ndarray, r: float) -> float:
    """(sum |x_i|^r)^(1/r); max-abs for r = inf. Rejects NaN input."""
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any():
        raise DomainError("lp_norm: NaN input")
    if r != math.inf and r < 1.0:
        raise DomainError(f"lp_norm: exponent must be >= 1, got {r}")
    a = np.abs(x)
    m = float(a.max(initial=0.0))
    if m == 0.0:
        return 0.0
    if r == math.inf:
        return m
    # scale by the max to keep the powers in range for large r
    return m * float(np.sum((a / m) ** r)) ** (1.0 / r)


@dataclass(frozen=True)
class BallSpec:
    """Problem geometry: ambient dimension d, ball exponent p, and the
    Lipschitz budget L for subgradients measured in the dual norm."""

    d: int
    p: float
    L: float = 1.0
    pstar: float = field(init=False)

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise DomainError(f"d must be a positive integer, got {self.d}")
        if self.p < 1.0:
            raise DomainError(f"p must be >= 1, got {self.p}")
        if not self.L > 0.0:
            raise DomainError(f"L must be positive, got {self.L}")
        ps = dual_exponent(self.p)
        if math.isfinite(ps):
            assert abs(1.0 / self.p + 1.0 / ps - 1.0) <= 1e-12
        object.__setattr__(self, "pstar", ps)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return lp_norm(x, self.p) <= 1.0 + tol


def linear_minimizer_on_ball(G: np.ndarray, spec: BallSpec):
    """Exact minimizer of <G, x> over the unit lp-ball.

    Returns (x, value) with value = -||G||_{p*}. For p > 1 the minimizer is
    the (negated, normalized) dual-power image of G; for p = 1 ties between
    maximal |G_i| are broken toward the lowest index so traces replay
    deterministically.
    """
    G = np.asarray(G, dtype=float)
    if np.isnan(G).any():
        raise DomainError("linear_minimizer_on_ball: NaN input")
    if not np.any(G):
        return np.zeros_like(G), 0.0
    if spec.p == 1.0:
        i = int(np.argmax(np.abs(G)))
        x = np.zeros_like(G)
        x[i] = -np.sign(G[i])
        return x, -float(np.abs(G).max())
    q = spec.pstar
    gnorm = lp_norm(G, q)
    x = -np.sign(G) * (np.abs(G) / gnorm) ** (q - 1.0)
    return x, -gnorm


def sample_ball(spec: BallSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly from the unit lp-ball, one per row.

    Coordinates come from the density proportional to exp(-|u|^p) (two-sided
    Gamma(1/p) transform, rejection-sampled internally), then each row is
    rescaled by U^(1/d)/||u||_p, which gives the exact uniform law on the
    ball.
    """
    d, p = spec.d, spec.p
    g = rng.gamma(1.0 / p, 1.0, size=(n, d))
    u = g ** (1.0 / p) * rng.choice([-1.0, 1.0], size=(n, d))
    norms = np.maximum((np.abs(u) ** p).sum(axis=1) ** (1.0 / p), 1e-300)
    radii = rng.random(n) ** (1.0 / d)
    return u * (radii / norms)[:, None]


@dataclass
class ConvexityReport:
    samples: int
    violations: int
    worst_margin: float  # most negative slack seen (0.0 if none negative)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_uniform_convexity(
    f,
    grad,
    spec: BallSpec,
    mu: float,
    r: float,
    samples: int,
    seed: int,
    slack: float = 1e-9,
) -> ConvexityReport:
    """Sampled certificate that f is mu-uniformly-convex of degree r on the
    lp-ball: f(y) >= f(x) + <grad f(x), y - x> + (mu/r) ||y - x||_p^r.

    Draws `samples` (x, y) pairs uniformly from the ball and counts pairs
    whose margin falls below -slack. f and grad must accept row-stacked
    points ((n, d) arrays).
    """
    if not mu > 0.0:
        raise DomainError("mu must be positive")
    if r < 2.0:
        raise DomainError("degree r must be >= 2")
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    X = sample_ball(spec, samples, rng)
    Y = sample_ball(spec, samples, rng)
    fx, fy, gx = f(X), f(Y), grad(X)
    if not (np.isfinite(fx).all() and np.isfinite(fy).all() and np.isfinite(gx).all()):
        raise DomainError("check_uniform_convexity: non-finite f or gradient")
    diff = Y - X
    dist = (np.abs(diff) ** spec.p).sum(axis=1) ** (1.0 / spec.p)
    margin = fy - fx - (gx * diff).sum(axis=1) - (mu / r) * dist**r
    bad = margin < -slack
    worst = float(margin.min()) if bad.any() else 0.0
    return ConvexityReport(samples=samples, violations=int(bad.sum()), worst_margin=min(worst, 0.0))
