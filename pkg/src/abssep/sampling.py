"""Random spectra for scans, audits and tests.

Plain Dirichlet draws almost never land on a boundary, so there are helpers
that push a spectrum radially (away from the maximally mixed state) onto the
boundary, and ones that impose equality patterns first so that extreme points
show up with useful frequency.
"""

from __future__ import annotations

import numpy as np

from .membership import batch_min_margin
from .spectra import Spectrum, SystemDims, make_spectrum

__all__ = [
    "random_spectrum",
    "random_spectra",
    "project_to_boundary",
    "project_rows_to_boundary",
    "tied_spectrum",
    "random_majorized",
    "strictly_majorizing",
]


def _dims(d) -> SystemDims:
    return d if isinstance(d, SystemDims) else SystemDims(*d)


def random_spectra(dims, rng, count: int, concentration: float = 1.0) -> np.ndarray:
    """(count, mn) array of sorted Dirichlet spectra."""
    dims = _dims(dims)
    raw = rng.dirichlet(np.full(dims.total, concentration), size=count)
    return -np.sort(-raw, axis=1)


def random_spectrum(dims, rng, concentration: float = 1.0) -> Spectrum:
    dims = _dims(dims)
    return make_spectrum(random_spectra(dims, rng, 1, concentration)[0], dims)


def project_to_boundary(values, dims, iters: int = 200) -> np.ndarray:
    """Point where the ray from the maximally mixed state through ``values`` leaves the set.

    Equal input entries stay bitwise equal, since every entry goes through the
    same affine map.
    """
    dims = _dims(dims)
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    v = v / v.sum()
    N = v.size
    u = np.full(N, 1.0 / N)

    def at(theta):
        return (1.0 - theta) * u + theta * v

    def member(theta):
        x = at(theta)
        return x[-1] > 0 and batch_min_margin(x[None, :], dims)[0] >= 0.0

    if member(1.0):
        low = v[-1]
        hi = 1.0 / (1.0 - N * low) if low < 1.0 / N else 1e6
        lo = 1.0
    else:
        lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * max(1.0, hi):
            break
    return at(lo)


def project_rows_to_boundary(values, dims, iters: int = 64) -> np.ndarray:
    """Row-wise :func:`project_to_boundary` for a (k, mn) array, bisecting all rows at once.

    Rows that are members at theta = 1 are pushed outward until either the
    boundary or the face lambda_mn = 0 is reached.
    """
    dims = _dims(dims)
    V = -np.sort(-np.atleast_2d(np.asarray(values, dtype=float)), axis=1)
    V = V / V.sum(axis=1, keepdims=True)
    k, N = V.shape
    U = np.full((1, N), 1.0 / N)

    def member(theta):
        X = (1.0 - theta)[:, None] * U + theta[:, None] * V
        ok = X[:, -1] >= 0.0
        out = np.zeros(k, dtype=bool)
        if ok.any():
            out[ok] = batch_min_margin(X[ok], dims) >= 0.0
        return out

    inside = member(np.ones(k))
    lo = np.where(inside, 1.0, 0.0)
    gap = 1.0 - N * V[:, -1]
    hi = np.where(inside, 1.0 / np.where(gap > 0, gap, 1e-300), 1.0)
    hi = np.minimum(hi, 1e6)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = member(mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return (1.0 - lo)[:, None] * U + lo[:, None] * V


def tied_spectrum(dims, rng, distinct: int | None = None) -> np.ndarray:
    """Random sorted spectrum with a random equality pattern of ``distinct`` values."""
    dims = _dims(dims)
    N = dims.total
    if distinct is None:
        distinct = int(rng.integers(2, min(N, 8) + 1))
    cuts = np.sort(rng.choice(np.arange(1, N), size=distinct - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [N]]))
    levels = np.sort(rng.uniform(0.05, 1.0, size=distinct))[::-1]
    v = np.repeat(levels, sizes)
    return v / v.sum()


def random_majorized(s: Spectrum, rng, steps: int = 3) -> Spectrum:
    """A spectrum majorized by ``s``, built from random T-transforms."""
    x = np.array(s.values, dtype=float)
    N = x.size
    for _ in range(steps):
        i, j = rng.choice(N, size=2, replace=False)
        a = float(rng.uniform(0.0, 0.5))
        xi, xj = x[i], x[j]
        x[i] = (1 - a) * xi + a * xj
        x[j] = a * xi + (1 - a) * xj
    return make_spectrum(x, s.dims)


def strictly_majorizing(s: Spectrum, rng, eps: float) -> Spectrum | None:
    """Move mass ``eps`` from a lower entry to a higher one; the result majorizes ``s``.

    Returns None if no entry has enough mass to give.
    """
    x = np.array(s.values, dtype=float)
    N = x.size
    donors = [j for j in range(1, N) if x[j] >= eps]
    if not donors:
        return None
    j = int(rng.choice(donors))
    i = int(rng.integers(0, j))
    # move to the first index of i's tie group so the result stays sorted
    i = int(np.argmax(x == x[i]))
    # take from the last index of j's tie group for the same reason
    j = int(N - 1 - np.argmax(x[::-1] == x[j]))
    x[i] += eps
    x[j] -= eps
    return make_spectrum(x, s.dims)
