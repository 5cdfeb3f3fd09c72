"""Pure-numpy fallback for the Bregman projection kernel.

Same two-level bisection as the compiled extension in _kernels.pyx: an
inner monotone bisection per coordinate (in the substituted variable
y = u^(p-1), so each evaluation costs a single power) nested in an outer
bisection on the KKT multiplier. The inner loop runs a fixed 64 halvings,
which lands on the float64 ulp; the outer bracket shrinks to a relative
width of `tol`. Sums run over the coordinates sorted by decreasing |z| so
that the result is exactly invariant to coordinate permutations.
"""

import numpy as np

ENGINE = "python"


def _u_of(a, rhs, lam, p, r):
    """Per-coordinate root u of u^(r-1) + lam u^(p-1) = rhs on [0, a]."""
    if r == p:
        return a / (1.0 + lam) ** (1.0 / (p - 1.0))
    kappa = (r - 1.0) / (p - 1.0)
    lo = np.zeros_like(a)
    hi = a ** (p - 1.0)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        over = mid**kappa + lam * mid > rhs
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    return (0.5 * (lo + hi)) ** (1.0 / (p - 1.0))


def project_kkt(absz: np.ndarray, p: float, r: float, tol: float, max_outer: int):
    """Solve the scalar-multiplier KKT system for projecting |z| onto the
    unit lp-ball in the phi_r geometry. Requires ||absz||_p > 1.

    Returns (u, lam, outer_iters, bracket_width, converged); u carries no
    signs (the caller re-applies sign(z)).
    """
    a_sorted = np.sort(absz)[::-1]
    rhs_sorted = a_sorted ** (r - 1.0)

    def h(lam):
        u = _u_of(a_sorted, rhs_sorted, lam, p, r)
        return float(np.sum(u**p)) - 1.0

    lo = 0.0
    hi = float(rhs_sorted[0]) * absz.shape[0]
    expansions = 0
    while h(hi) >= 0.0:
        hi *= 2.0
        expansions += 1
        if expansions > 200:
            return absz.copy(), hi, 0, np.inf, False
    # keep halving to float exhaustion; tol is the convergence contract
    for _ in range(max_outer):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if h(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    converged = (hi - lo) <= tol * max(1.0, hi)
    # final multiplier taken on the feasible side of the bracket
    u = _u_of(absz, absz ** (r - 1.0), hi, p, r)
    return u, hi, max_outer, hi - lo, converged
