"""Bregman projection onto the unit lp-ball in the phi_r geometry.

argmin_{||x||_p <= 1} D_{phi_r}(x, z) is solved through the KKT system with
a single scalar multiplier: per coordinate, sign(x_i)|x_i|^(r-1) +
lam sign(x_i)|x_i|^(p-1) = sign(z_i)|z_i|^(r-1) (the left side is strictly
increasing in |x_i|), with lam >= 0 fixed by ||x(lam)||_p = 1 via an outer
bisection on the strictly decreasing h(lam) = ||x(lam)||_p^p - 1.

Two structured inputs have analytic answers and are served by fast paths:
a constant vector c*w projects to sign(c) d^(-1/p) w, and a single-spike
c*e_i with |c| > 1 projects to sign(c) e_i.

The kernel is compiled (Cython) when available; set OCO_LAB_PURE_PYTHON=1
to force the numpy fallback. Both engines share the same algorithm.
"""

import os

import numpy as np

from .geometry import BallSpec, DomainError

if os.environ.get("OCO_LAB_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

ENGINE: str = _impl.ENGINE

__all__ = ["bregman_project", "ProjectionError", "ENGINE"]


class ProjectionError(RuntimeError):
    """Outer bisection failed to converge; carries the final bracket width."""

    def __init__(self, bracket: float, iters: int):
        super().__init__(f"projection multiplier bisection did not converge (bracket={bracket:.3e} after {iters} iterations)")
        self.bracket = bracket
        self.iters = iters


def _norm_p(z: np.ndarray, p: float) -> float:
    a = np.abs(z)
    m = float(a.max(initial=0.0))
    if m == 0.0:
        return 0.0
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def bregman_project(
    r: float,
    z: np.ndarray,
    spec: BallSpec,
    tol: float = 1e-10,
    use_fast_paths: bool = True,
    max_outer: int = 200,
) -> np.ndarray:
    """Project z onto the unit lp-ball in Bregman divergence of phi_r.

    Interior points return unchanged. The result x satisfies
    ||x||_p <= 1 + tol and the first-order optimality certificate
    <grad_x D_{phi_r}(x, z), y - x> >= -10 tol for y in the ball.
    """
    if r < 2.0:
        raise DomainError(f"projection degree must be >= 2, got {r}")
    if spec.p <= 1.0:
        raise DomainError("projection requires p > 1")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    z = np.ascontiguousarray(z, dtype=float)
    if not np.isfinite(z).all():
        raise DomainError("bregman_project: non-finite input")
    p, d = spec.p, z.shape[0]

    # grace band of a few ulps: a just-projected point must re-project to
    # itself even when this norm evaluation rounds the other way
    if _norm_p(z, p) <= 1.0 + 1e-12:
        return z.copy()

    if use_fast_paths:
        if np.all(z == z[0]):
            # constant vector outside the ball: rescale onto the boundary
            return np.full(d, np.sign(z[0]) * d ** (-1.0 / p))
        nz = np.flatnonzero(z)
        if nz.size == 1:
            # single spike with |c| > 1 (implied by ||z||_p > 1)
            x = np.zeros(d)
            x[nz[0]] = np.sign(z[nz[0]])
            return x

    u, _lam, iters, bracket, converged = _impl.project_kkt(np.abs(z), p, r, tol, max_outer)
    if not converged:
        raise ProjectionError(bracket, iters)
    return np.sign(z) * u
