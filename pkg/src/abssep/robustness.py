"""Robustness of nonabsolute separability.

AR(rho) is the least t >= 0 for which (rho + t sigma)/(1 + t) is absolutely
separable for some state sigma.  Closed forms cover pure states and a few
mixed families; :func:`ar_estimate` handles any 2 x n or 3 x n spectrum.

Why the estimator may restrict sigma to be diagonal in rho's eigenbasis: if
sigma works, so does its diagonal part D.  The eigenvalues of rho + t sigma
majorize its diagonal, which is the spectrum of rho + t D, and membership is
inherited downward under majorization.  So the restriction costs nothing, and
the search becomes a convex program in (w, d):

    minimize sum(w)  s.t.  w >= 0,  d sorted,  d satisfies the membership LMI,
                           d majorizes lambda + w.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, WrongDims
from .membership import batch_min_margin
from .spectra import DEFAULT_TOL, Spectrum, SystemDims, Tolerance, make_spectrum

__all__ = [
    "Method",
    "RobustnessResult",
    "ar_pure",
    "ar_uniform_rank_k",
    "ar_uniform_rank_2n_minus_2",
    "ar_rank2_2x2",
    "ar_estimate",
    "ar_properties_check",
]


class Method(str, enum.Enum):
    ClosedForm = "ClosedForm"
    Estimator = "Estimator"


@dataclass(frozen=True, eq=False)
class RobustnessResult:
    value: float
    optimal_sigma: np.ndarray | None  # aligned with rho's non-increasing eigenvalues
    resulting_state: Spectrum
    method: Method
    upper_bound_only: bool
    bisection_width: float
    reference_set: str = "AS"

    @property
    def sigma_spectrum(self) -> np.ndarray | None:
        if self.optimal_sigma is None:
            return None
        return np.sort(self.optimal_sigma)[::-1]


def _dims(d) -> SystemDims:
    if isinstance(d, SystemDims):
        return d
    if isinstance(d, str):
        return SystemDims.parse(d)
    return SystemDims(*d)


def _closed(rho, sigma, t, dims, ref="AS") -> RobustnessResult:
    rho = np.asarray(rho, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    state = make_spectrum((rho + t * sigma) / (1.0 + t), dims)
    return RobustnessResult(float(t), sigma, state, Method.ClosedForm, False, 0.0, ref)


def ar_pure(dims) -> RobustnessResult:
    """Pure state: AR = (mn - 1)/3, reached by mixing in the orthogonal uniform state."""
    dims = _dims(dims)
    N = dims.total
    rho = np.zeros(N)
    rho[0] = 1.0
    sigma = np.full(N, 1.0 / (N - 1))
    sigma[0] = 0.0
    return _closed(rho, sigma, (N - 1) / 3.0, dims)


def ar_uniform_rank_k(dims, k: int) -> RobustnessResult:
    """Uniform rank-k state of a 2 x n system, 1 <= k <= 2n - 3."""
    dims = _dims(dims)
    if dims.small != 2:
        raise WrongDims(f"uniform rank-k closed form is for 2 x n systems, got {dims}")
    N = dims.total
    if not 1 <= k <= N - 3:
        raise ValueError(f"k must lie in [1, {N - 3}] for {dims}, got {k}")
    rho = np.zeros(N)
    rho[:k] = 1.0 / k
    sigma = np.zeros(N)
    sigma[k:] = 1.0 / (N - k)
    return _closed(rho, sigma, (N - k) / (3.0 * k), dims)


def ar_uniform_rank_2n_minus_2(dims) -> RobustnessResult:
    dims = _dims(dims)
    if dims.small != 2:
        raise WrongDims(f"this closed form is for 2 x n systems, got {dims}")
    N = dims.total
    n = N // 2
    rho = np.zeros(N)
    rho[: N - 2] = 1.0 / (N - 2)
    sigma = np.zeros(N)
    sigma[-2:] = 0.5
    return _closed(rho, sigma, (3.0 - 2.0 * math.sqrt(2.0)) / (n - 1), dims)


def ar_rank2_2x2(a: float) -> RobustnessResult:
    """Two-qubit spectrum (a, 1 - a, 0, 0) with 1/2 <= a <= 1."""
    if not (0.5 <= a <= 1.0):
        raise ValueError(f"a must lie in [1/2, 1], got {a!r}")
    rho = np.array([a, 1.0 - a, 0.0, 0.0])
    if a <= 0.75:
        t = 4.0 - 4.0 * math.sqrt(1.0 - a) - 2.0 * a
        sigma = np.array([0.0, 0.0, 0.5, 0.5])
    else:
        t = 2.0 * a - 1.0
        den = 6.0 * a - 3.0
        sigma = np.array([0.0, (4.0 * a - 3.0) / den, a / den, a / den])
    return _closed(rho, sigma, t, (2, 2))


# ---------------------------------------------------------------------------
# estimator

_PROBLEMS: dict = {}


def _problem(N: int, small: int):
    key = (N, small)
    if key in _PROBLEMS:
        return _PROBLEMS[key]
    import cvxpy as cp

    lam = cp.Parameter(N, nonneg=True)
    w = cp.Variable(N, nonneg=True)
    d = cp.Variable(N, nonneg=True)
    z = lam + w
    cons = [cp.sum(d) == cp.sum(z), d[:-1] >= d[1:]]
    csum = cp.cumsum(d)
    for k in range(1, N):
        cons.append(cp.sum_largest(z, k) <= csum[k - 1])
    if small == 2:
        drt = cp.bmat([[2 * d[N - 1], d[N - 2] - d[0]], [d[N - 2] - d[0], 2 * d[N - 3]]])
        cons.append(drt >> 0)
    else:
        from .membership import l_pattern

        x = cp.hstack([d[:3], d[N - 6:]])
        for which in (1, 2):
            P = l_pattern(which)
            L = cp.bmat([[P[i, j] @ x for j in range(3)] for i in range(3)])
            cons.append(L >> 0)
    prob = cp.Problem(cp.Minimize(cp.sum(w)), cons)
    _PROBLEMS[key] = (prob, lam, w)
    return _PROBLEMS[key]


def _margin(vec, dims) -> float:
    v = np.sort(np.asarray(vec, dtype=float))[::-1]
    v = v / v.sum()
    if v[-1] <= 0.0:
        return -math.inf
    return float(batch_min_margin(v[None, :], dims)[0])


def _snap(lam, sigma, t_guess, dims, width):
    """Bisect along lam + s*sigma for the first exactly-member s."""
    def member(s):
        return _margin(lam + s * sigma, dims) >= 0.0

    cap = dims.total / 2.0
    lo, hi = 0.0, max(t_guess, 1e-12)
    grow = 0
    while not member(hi):
        lo = hi
        hi = hi * (1.0 + 1e-6 * 2.0 ** grow) + 1e-12
        grow += 1
        if grow > 60 or hi > 4 * cap:
            return None
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return hi, hi - lo


def ar_estimate(s: Spectrum, tol: Tolerance = DEFAULT_TOL, width: float = 1e-12,
                solver: str | None = None) -> RobustnessResult:
    """Numerical AR for 2 x n and 3 x n spectra.

    For 3 x n the target set is AP (absolutely PPT), so the value is exact for
    AP and a lower bound for AS; ``reference_set`` records which.
    """
    import cvxpy as cp

    dims = s.dims
    if dims.small > 3:
        raise WrongDims(f"the estimator needs min(m, n) <= 3, got {dims}")
    ref = "AS" if dims.small == 2 else "AP"
    ns = s if s.normalized else s.normalize()
    lam = np.asarray(ns.values, dtype=float)
    N = dims.total
    if _member_exact(ns, tol):
        return RobustnessResult(0.0, None, ns, Method.Estimator, False, 0.0, ref)

    prob, p_lam, w = _problem(N, dims.small)
    p_lam.value = lam
    try:
        prob.solve(solver=solver or "CLARABEL")
    except cp.error.SolverError as exc:  # pragma: no cover - solver failure path
        raise NoConvergence(f"convex solver failed: {exc}", bracket=(0.0, N / 2.0)) from exc
    if prob.status not in ("optimal", "optimal_inaccurate") or w.value is None:
        raise NoConvergence(f"convex solver status {prob.status}", bracket=(0.0, N / 2.0))
    wv = np.clip(np.asarray(w.value, dtype=float), 0.0, None)
    t_guess = float(wv.sum())
    if t_guess <= 0:
        sigma = np.full(N, 1.0 / N)
    else:
        sigma = wv / t_guess
    snapped = _snap(lam, sigma, t_guess, dims, width)
    theta = 1e-9
    while snapped is None and theta < 1.0:
        # repair: tilt sigma toward the maximally mixed state until the ray enters
        mixed = (1.0 - theta) * sigma + theta / N
        snapped = _snap(lam, mixed, t_guess, dims, width)
        if snapped is not None:
            sigma = mixed
        theta *= 10.0
    if snapped is None:
        raise NoConvergence("could not reach a member along the optimizer's ray",
                            bracket=(t_guess, N / 2.0))
    t, w_final = snapped
    state = make_spectrum((lam + t * sigma) / (1.0 + t), dims)
    return RobustnessResult(float(t), sigma, state, Method.Estimator, False, float(w_final), ref)


def _member_exact(s: Spectrum, tol: Tolerance) -> bool:
    from .membership import check_membership

    return check_membership(s, tol).member


# ---------------------------------------------------------------------------
# property audit

def ar_properties_check(samples: int = 20, seed: int = 0, slack: float = 1e-5) -> dict:
    """Randomized audit of the basic properties of AR on small systems.

    Returns a dict mapping property name to a list of counterexample records
    (empty lists mean no violation was found).
    """
    from .membership import BoundaryClass, check_membership, classify_boundary
    from .sampling import random_majorized, random_spectrum

    rng = np.random.default_rng(seed)
    dims_cycle = [SystemDims(2, 2), SystemDims(2, 3), SystemDims(3, 3)]
    report = {"zero_iff_member": [], "convexity": [], "majorization_monotone": [],
              "boundary_result": []}
    for i in range(samples):
        dims = dims_cycle[i % len(dims_cycle)]
        a = random_spectrum(dims, rng, concentration=0.3)
        b = random_spectrum(dims, rng, concentration=0.3)
        ra, rb = ar_estimate(a), ar_estimate(b)
        member = check_membership(a).member
        if (ra.value <= slack) != member:
            report["zero_iff_member"].append((a.tolist(), ra.value, member))
        p = float(rng.uniform(0.1, 0.9))
        mix = make_spectrum(p * a.values + (1 - p) * b.values, dims)
        rm = ar_estimate(mix)
        if rm.value > p * ra.value + (1 - p) * rb.value + slack:
            report["convexity"].append((a.tolist(), b.tolist(), p, rm.value))
        c = random_majorized(a, rng)
        rc = ar_estimate(c)
        if rc.value > ra.value + slack:
            report["majorization_monotone"].append((a.tolist(), c.tolist(), ra.value, rc.value))
        if ra.value > 0:
            cls = classify_boundary(ra.resulting_state)
            if cls is not BoundaryClass.Boundary:
                report["boundary_result"].append((a.tolist(), cls.value))
    return report
