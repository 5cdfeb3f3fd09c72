"""Power-norm regularizers phi_r(x) = (1/r) ||x||_r^r.

Provides evaluation, gradients, the conjugate gradient map (the inverse of
the gradient), Bregman divergences, and the (mu, D) constants each learner
role needs. On the unit lp-ball, phi_r is uniformly convex of degree r with
constant 2^(1-r) in the lr-norm; for r = 2 the sharp strong-convexity
constant 1 (in l2) is used instead. A slightly sharper degree-p constant
1/(2^(p-1) - 1) exists but is not used anywhere here.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import BallSpec, DomainError, dual_exponent

__all__ = ["RegSpec", "phi_eval", "phi_grad", "conjugate_grad", "bregman", "convexity_constant"]


def _check_degree(r: float):
    if r < 2.0:
        raise DomainError(f"regularizer degree must be >= 2, got {r}")


def phi_eval(r: float, x: np.ndarray):
    """(1/r) sum |x_i|^r. Accepts a vector or row-stacked points."""
    _check_degree(r)
    x = np.asarray(x, dtype=float)
    return (np.abs(x) ** r).sum(axis=-1) / r


def phi_grad(r: float, x: np.ndarray) -> np.ndarray:
    """Coordinate-wise sign(x_i) |x_i|^(r-1)."""
    _check_degree(r)
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** (r - 1.0)


def conjugate_grad(r: float, theta: np.ndarray) -> np.ndarray:
    """Gradient of the Fenchel conjugate of phi_r: sign(t) |t|^(r*-1).

    Inverts phi_grad: conjugate_grad(r, phi_grad(r, x)) == x.
    """
    _check_degree(r)
    theta = np.asarray(theta, dtype=float)
    return np.sign(theta) * np.abs(theta) ** (dual_exponent(r) - 1.0)


def bregman(r: float, x: np.ndarray, y: np.ndarray) -> float:
    """Bregman divergence phi_r(x) - phi_r(y) - <grad phi_r(y), x - y>."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(phi_eval(r, x) - phi_eval(r, y) - phi_grad(r, y) @ (x - y))


def convexity_constant(r: float) -> float:
    """Uniform-convexity constant of phi_r of degree r (1 when r = 2)."""
    _check_degree(r)
    return 1.0 if r == 2.0 else 2.0 ** (1.0 - r)


@dataclass(frozen=True)
class RegSpec:
    """A regularizer descriptor: degree r, convexity constant mu, and the
    diameter-type constant D for the role it serves.

    D differs by role and silently reusing one for the other is a bug
    source, so the constructors pin it: the leader update uses
    sup phi_r over the ball (d^(1-r/p)/r) while the mirror update uses the
    sup of the Bregman divergence (2 d^(1-r/p)).
    """

    r: float
    mu: float
    D: float
    norm_exponent: float
    role: str  # "ftrl" | "omd"

    def __post_init__(self):
        _check_degree(self.r)
        if not (0.0 < self.mu <= 1.0):
            raise DomainError(f"mu must be in (0, 1], got {self.mu}")
        if not self.D > 0.0:
            raise DomainError(f"D must be positive, got {self.D}")

    @classmethod
    def for_ftrl(cls, r: float, spec: BallSpec) -> "RegSpec":
        D = spec.d ** (1.0 - r / spec.p) / r
        return cls(r=r, mu=convexity_constant(r), D=D, norm_exponent=r, role="ftrl")

    @classmethod
    def for_omd(cls, r: float, spec: BallSpec) -> "RegSpec":
        D = 2.0 * spec.d ** (1.0 - r / spec.p)
        return cls(r=r, mu=convexity_constant(r), D=D, norm_exponent=r, role="omd")
