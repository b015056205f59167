"""Sample generators used by several test modules (independent of the package's own sampler)."""

import numpy as np


def l_matrices(x):
    """L1 and L2 written out entry by entry from the defining formulas (1-based names)."""
    x1, x2, x3, x4, x5, x6, x7, x8, x9 = x
    L1 = np.array([[2 * x9, x8 - x1, x6 - x2],
                   [x8 - x1, 2 * x7, x5 - x3],
                   [x6 - x2, x5 - x3, 2 * x4]])
    L2 = np.array([[2 * x9, x8 - x1, x7 - x2],
                   [x8 - x1, 2 * x6, x5 - x3],
                   [x7 - x2, x5 - x3, 2 * x4]])
    return L1, L2


def radial_root(v, margin, iters=200):
    """Largest theta in [0, 1] with margin((1-theta) u + theta v) >= 0, u uniform.

    ``margin`` takes a vector; it must be >= 0 at u.
    """
    v = np.asarray(v, dtype=float)
    u = np.full(v.size, v.sum() / v.size)
    if margin(v) >= 0:
        return v
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if margin((1 - mid) * u + mid * v) >= 0:
            lo = mid
        else:
            hi = mid
    return (1 - lo) * u + lo * v


def sorted_dirichlet(rng, n, alpha=1.0):
    return np.sort(rng.dirichlet(np.full(n, alpha)))[::-1]
