"""Brute-force cross-checks that do not rely on the spectral criteria.

* :func:`mc_ap_check` conjugates diag(lambda) by Haar-random unitaries and
  watches the smallest eigenvalue of the partial transpose.  A negative value is
  a genuine proof of non-membership.  The best samples are then pushed downhill
  by a Riemannian gradient flow on the unitary group, which is what gives the
  check teeth on states that are only slightly outside.
* :func:`uhlmann_decompose` writes a majorized vector as a convex mix of
  permutations of the majorizing one (T-transforms plus Caratheodory pruning).
* :func:`nonextreme_witness_search` hunts for an explicit midpoint split.

Randomness: sample ``i`` of a run with seed ``s`` always draws from
``SeedSequence(s, spawn_key=(i,))``, so results do not depend on batching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotMajorized, WrongDims
from .membership import batch_min_margin, check_membership, l_pattern, build_L
from .spectra import (
    DEFAULT_TOL,
    Spectrum,
    SystemDims,
    Tolerance,
    equality_groups,
    majorizes,
)

__all__ = [
    "DensityMatrix",
    "haar_unitary",
    "sample_rng",
    "partial_transpose",
    "MCResult",
    "mc_ap_check",
    "uhlmann_decompose",
    "nonextreme_witness_search",
    "VIOLATION_THRESHOLD",
]

VIOLATION_THRESHOLD = -1e-9
MAX_ORDER = 16


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _haar_from_gaussian(Z: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    phase = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return Q * phase[..., None, :]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary (QR of a complex Ginibre matrix, phases fixed)."""
    if not 1 <= d <= MAX_ORDER:
        raise ValueError(f"order must lie in [1, {MAX_ORDER}], got {d}")
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    return _haar_from_gaussian(Z)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    dims: SystemDims

    def __post_init__(self):
        M = np.asarray(self.entries, dtype=complex)
        d = self.dims.total
        if M.shape != (d, d):
            raise DimensionMismatch(f"matrix shape {M.shape} does not match dims {self.dims}")
        if d > MAX_ORDER:
            raise ValueError(f"order {d} exceeds {MAX_ORDER}")
        if np.max(np.abs(M - M.conj().T)) > 1e-12:
            raise NotHermitian("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(M).real - 1.0) > 1e-10:
            raise ValueError(f"trace {np.trace(M).real!r} is not 1")
        if np.linalg.eigvalsh(M)[0] < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        M = 0.5 * (M + M.conj().T)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @property
    def order(self) -> int:
        return self.dims.total

    @classmethod
    def from_spectrum(cls, values, dims, unitary=None) -> "DensityMatrix":
        dims = dims if isinstance(dims, SystemDims) else SystemDims(*dims)
        D = np.diag(np.asarray(values, dtype=float)).astype(complex)
        if unitary is not None:
            D = unitary @ D @ unitary.conj().T
        return cls(D, dims)


def _pt(M: np.ndarray, m: int, n: int) -> np.ndarray:
    """Partial transpose on the second factor; works on stacked (..., mn, mn) arrays."""
    lead = M.shape[:-2]
    T = M.reshape(lead + (m, n, m, n))
    T = np.swapaxes(T, -3, -1)
    return T.reshape(lead + (m * n, m * n))


def partial_transpose(rho, dims=None) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        M, dims = rho.entries, rho.dims
    else:
        M = np.asarray(rho)
        if dims is None:
            raise DimensionMismatch("dims are required for a raw matrix")
        dims = dims if isinstance(dims, SystemDims) else SystemDims(*dims)
        if M.shape[-2:] != (dims.total, dims.total):
            raise DimensionMismatch(f"matrix shape {M.shape} does not match dims {dims}")
    return _pt(M, dims.m, dims.n)


# ---------------------------------------------------------------------------
# Monte-Carlo absolutely-PPT check

@dataclass(frozen=True)
class MCResult:
    min_over_samples: float
    violated: bool
    samples: int
    sampled_min: float
    refined_min: float


def _pt_min(U, lam, m, n):
    X = (U * lam) @ np.swapaxes(U.conj(), -1, -2)
    return np.linalg.eigvalsh(_pt(X, m, n))[..., 0]


def _refine(U, lam, m, n, iters):
    """Riemannian descent of lambda_min(PT(U diag(lam) U^dag)) over unitaries."""
    N = lam.size

    def value_and_parts(U):
        X = (U * lam) @ U.conj().T
        w, V = np.linalg.eigh(_pt(X, m, n))
        return w[0], X, V[:, 0]

    f, X, phi = value_and_parts(U)
    step = 0.5
    for _ in range(iters):
        W = _pt(np.outer(phi, phi.conj()), m, n)
        G = 1j * (X @ W - W @ X)
        gnorm = np.linalg.norm(G)
        if gnorm < 1e-13:
            break
        g, Vg = np.linalg.eigh(G)
        improved = False
        for _ in range(30):
            E = (Vg * np.exp(-1j * step * g)) @ Vg.conj().T
            U_new = E @ U
            f_new, X_new, phi_new = value_and_parts(U_new)
            if f_new < f - 1e-4 * step * gnorm ** 2:
                U, f, X, phi = U_new, f_new, X_new, phi_new
                improved = True
                step *= 2.0
                break
            step *= 0.5
        if not improved:
            break
        if f < -1e-6 * max(1.0, abs(lam[0])) * N:
            break  # clearly violated already
    return f


def mc_ap_check(s: Spectrum, samples: int = 10_000, seed: int = 0, refine: bool = True,
                refine_starts: int = 4, refine_iters: int = 150,
                batch: int = 2048) -> MCResult:
    """Sample global unitaries and report the smallest partial-transpose eigenvalue."""
    dims = s.dims
    if dims.total > MAX_ORDER:
        raise WrongDims(f"oracle supports m*n <= {MAX_ORDER}, got {dims}")
    lam = np.asarray(s.values, dtype=float)
    if not s.normalized:
        lam = lam / lam.sum()
    N = dims.total
    best_vals = np.full(0, np.inf)
    best_U = np.zeros((0, N, N), dtype=complex)
    overall = np.inf
    for start in range(0, samples, batch):
        idx = range(start, min(samples, start + batch))
        Z = np.empty((len(idx), N, N), dtype=complex)
        for row, i in enumerate(idx):
            g = sample_rng(seed, i).standard_normal((2, N, N))
            Z[row] = (g[0] + 1j * g[1]) / np.sqrt(2.0)
        U = _haar_from_gaussian(Z)
        vals = _pt_min(U, lam, dims.m, dims.n)
        overall = min(overall, float(vals.min()))
        keep = np.argsort(vals)[:refine_starts]
        best_vals = np.concatenate([best_vals, vals[keep]])
        best_U = np.concatenate([best_U, U[keep]])
        order = np.argsort(best_vals)[:refine_starts]
        best_vals, best_U = best_vals[order], best_U[order]
    refined = overall
    if refine and samples > 0:
        for U0 in best_U:
            refined = min(refined, float(_refine(U0, lam, dims.m, dims.n, refine_iters)))
    total_min = min(overall, refined)
    return MCResult(total_min, bool(total_min < VIOLATION_THRESHOLD), samples, overall, refined)


# ---------------------------------------------------------------------------
# Uhlmann / T-transform decomposition

def _caratheodory(points: np.ndarray, weights: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Prune to at most ``cap`` terms without changing sum w_i p_i.

    Returns the indices of surviving terms and their new weights.
    """
    keep = np.arange(len(weights))
    while len(weights) > cap:
        A = np.vstack([points[keep].T, np.ones(len(keep))])
        _, sv, Vt = np.linalg.svd(A)
        rank = int(np.sum(sv > 1e-12 * sv[0]))
        if rank >= len(keep):
            break
        c = Vt[-1]
        if not np.any(c > 1e-15):
            c = -c
        pos = c > 1e-15
        ratios = np.where(pos, weights / np.where(pos, c, 1.0), np.inf)
        drop = int(np.argmin(ratios))
        weights = weights - ratios[drop] * c
        weights[drop] = 0.0
        alive = weights > 1e-15
        keep, weights = keep[alive], weights[alive]
    return keep, weights


def uhlmann_decompose(sigma, rho, tol: Tolerance = DEFAULT_TOL) -> list[tuple[tuple, float]]:
    """Weights p_j and permutations P_j with sum_j p_j sigma[P_j] = rho.

    Both vectors are taken in non-increasing order; permutation P maps the
    sorted sigma to the vector ``sigma_sorted[list(P)]``.
    """
    s = np.sort(np.asarray(getattr(sigma, "values", sigma), dtype=float))[::-1]
    r = np.sort(np.asarray(getattr(rho, "values", rho), dtype=float))[::-1]
    if s.size != r.size:
        raise DimensionMismatch(f"length {s.size} vs {r.size}")
    if not majorizes(s, r, tol):
        raise NotMajorized("sigma does not majorize rho")
    N = s.size
    perms = [tuple(range(N))]
    weights = np.array([1.0])
    x = s.copy()
    scale = max(float(np.max(np.abs(s))), 1e-300)
    for _ in range(4 * N):
        diff = x - r
        if np.max(np.abs(diff)) <= 1e-15 * scale * N:
            break
        above = np.nonzero(diff > 1e-15 * scale)[0]
        if above.size == 0:
            break
        j = int(above.max())
        below = [k for k in range(j + 1, N) if diff[k] < -1e-15 * scale]
        if not below:
            break
        k = below[0]
        delta = min(diff[j], -diff[k])
        alpha = delta / (x[j] - x[k])
        new_perms, new_w = [], []
        for p, w in zip(perms, weights):
            q = list(p)
            q[j], q[k] = q[k], q[j]
            new_perms += [p, tuple(q)]
            new_w += [(1.0 - alpha) * w, alpha * w]
        xj, xk = x[j], x[k]
        x[j] = (1.0 - alpha) * xj + alpha * xk
        x[k] = alpha * xj + (1.0 - alpha) * xk
        perms, weights = _merge(new_perms, np.array(new_w))
        pts = np.array([s[list(p)] for p in perms])
        keep, weights = _caratheodory(pts, weights, N)
        perms = [perms[i] for i in keep]
    return list(zip(perms, (float(w) for w in weights)))


def _merge(perms, weights):
    acc: dict = {}
    for p, w in zip(perms, weights):
        if w > 0:
            acc[p] = acc.get(p, 0.0) + float(w)
    return list(acc), np.array(list(acc.values()))


# ---------------------------------------------------------------------------
# non-extremality witness search

def _tangent_rows(v, dims, groups_G, tol):
    """Linear constraints (in group variables) that keep the active criterion saturated."""
    N = v.size
    rows = [np.ones((1, N)) @ groups_G]
    if dims.small == 2:
        x2, x4 = v[N - 3], v[N - 1]
        if x2 > 0 and x4 > 0:
            g = np.zeros(N)
            g[0], g[N - 3], g[N - 2], g[N - 1] = -1.0, np.sqrt(x4 / x2), 1.0, np.sqrt(x2 / x4)
            h = np.zeros(N)
            h[N - 3], h[N - 1] = x4, -x2
            rows += [g[None, :] @ groups_G, h[None, :] @ groups_G]
        return np.vstack(rows)
    idx = list(range(3)) + list(range(N - 6, N))
    x = v[idx]
    lp = build_L(x, tol)
    thresh = tol.det_eps * (2.0 * x[0]) ** 3
    for which, L, l in ((1, lp.L1, lp.l1), (2, lp.L2, lp.l2)):
        if l <= thresh:
            w, V = np.linalg.eigh(L)
            u = V[:, 0]
            block = np.einsum("ijk,j->ik", l_pattern(which), u)
            full = np.zeros((3, N))
            full[:, idx] = block
            rows.append(full @ groups_G)
    return np.vstack(rows)


def nonextreme_witness_search(x, dims=None, tries: int = 10_000, seed: int = 0,
                              tol: Tolerance = DEFAULT_TOL):
    """Look for alpha != beta, both sorted members, with (alpha + beta)/2 = x.

    Returns ``(alpha, beta)`` or None.  Not finding one is only evidence of
    extremality.
    """
    if isinstance(x, Spectrum):
        v, dims = np.asarray(x.values, dtype=float), x.dims
    else:
        v = np.asarray(x, dtype=float)
        dims = dims if isinstance(dims, SystemDims) else SystemDims(*dims)
    if dims.small not in (2, 3):
        raise WrongDims("witness search needs min(m, n) in (2, 3)")
    total = float(v.sum())
    v = v / total
    N = v.size
    scale = float(v[0])
    groups = equality_groups(v, tol.eq_eps)
    G = np.zeros((N, len(groups)))
    for gi, idx in enumerate(groups):
        G[idx, gi] = 1.0
    A = _tangent_rows(v, dims, G, tol)
    _, sv, Vt = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    tangent = Vt[rank:].T  # columns span the tangent subspace in group space
    ones = G.T @ np.ones(N)
    ones /= np.linalg.norm(ones)

    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0,)))
    R = rng.standard_normal((tries, len(groups)))
    half = tries // 2
    if tangent.shape[1] > 0:
        R[:half] = (R[:half] @ tangent) @ tangent.T
    R -= np.outer(R @ ones, ones)  # sum zero
    T = R @ G.T
    norms = np.max(np.abs(T), axis=1)
    live = norms > 1e-14
    T, norms = T[live], norms[live]
    if T.shape[0] == 0:
        return None
    T /= norms[:, None]
    strict = -1e-12 * scale
    delta = 1e-2 * scale
    for _ in range(20):
        ok = np.ones(T.shape[0], dtype=bool)
        for sign in (1.0, -1.0):
            W = v[None, :] + sign * delta * T
            ok &= np.all(np.diff(W, axis=1) <= 0.0, axis=1) & (W[:, -1] >= 0.0)
            m = np.full(W.shape[0], -np.inf)
            if ok.any():
                m[ok] = batch_min_margin(W[ok], dims)
            ok &= m >= strict
        hits = np.nonzero(ok)[0]
        for h in hits:
            alpha, beta = v + delta * T[h], v - delta * T[h]
            if (check_membership(Spectrum(alpha, dims, True), tol).member
                    and check_membership(Spectrum(beta, dims, True), tol).member):
                return alpha * total, beta * total
        delta *= 0.5
    return None
