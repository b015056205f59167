"""Extreme-point decisions for AS_{2,n} and AP_{3,n}.

Every non-extreme verdict carries a direction ``t`` (same length as the
spectrum, summing to zero) such that ``lambda +/- delta * t`` are both sorted
members for small ``delta``; :func:`verify_certificate` replays that split.
Extreme verdicts list the conditions that held.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import smalllin
from .errors import NotBoundary, NotNormalized, RankAnomaly, WrongDims
from .membership import (
    SHRINK_EPS,
    BoundaryClass,
    as2n_margin,
    boundary_ap9,
    build_L,
    check_membership,
    l_pattern,
)
from .spectra import (
    DEFAULT_TOL,
    Spectrum,
    SystemDims,
    Tolerance,
    compress_3n,
    distinct_count,
    equality_groups,
)

__all__ = [
    "ExtStatus",
    "CaseTag",
    "ExtremalityVerdict",
    "JudgeSystem",
    "extreme_as22",
    "extreme_as2n",
    "build_judge_system",
    "extreme_ap33",
    "extreme_ap3n",
    "classify_extremality",
    "lambda_k_sup",
    "verify_certificate",
]

DEGENERACY_FACTOR = 100.0


class ExtStatus(str, enum.Enum):
    NotMember = "NotMember"
    Interior = "Interior"
    BoundaryNonExtreme = "BoundaryNonExtreme"
    Extreme = "Extreme"


class CaseTag(str, enum.Enum):
    L1singular = "L1singular"
    L2singular = "L2singular"
    BothSingular = "BothSingular"


@dataclass(frozen=True, eq=False)
class ExtremalityVerdict:
    status: ExtStatus
    certificate: object  # tuple of condition tags, or an ndarray direction
    distinct_eigenvalue_count: int
    warnings: tuple = ()
    judge: "JudgeSystem | None" = None

    @property
    def extreme(self) -> bool:
        return self.status is ExtStatus.Extreme


@dataclass(frozen=True, eq=False)
class JudgeSystem:
    grouped_variables: list  # 0-based index groups
    constraint_matrix: np.ndarray  # rows x groups
    case_tag: CaseTag
    null_vectors: dict = field(default_factory=dict)

    @property
    def indicator(self) -> np.ndarray:
        G = np.zeros((9, len(self.grouped_variables)))
        for g, idx in enumerate(self.grouped_variables):
            G[idx, g] = 1.0
        return G


# ---------------------------------------------------------------------------
# helpers

def _values_and_scale(x, expected_len, allow_unnormalized, tol):
    if isinstance(x, Spectrum):
        return np.asarray(x.values, dtype=float), x.scale
    v = np.asarray(x, dtype=float).ravel()
    if v.size != expected_len:
        raise ValueError(f"expected {expected_len} values, got {v.size}")
    if np.any(np.diff(v) > tol.eq_eps * max(v[0], 1e-300)):
        raise ValueError("values must be sorted non-increasing")
    if np.any(v < -tol.eq_eps * max(v[0], 1.0)):
        raise ValueError("values must be nonnegative")
    v = np.clip(v, 0.0, None)
    normalized = abs(v.sum() - 1.0) <= tol.norm_eps
    if not normalized and not allow_unnormalized:
        raise NotNormalized("values do not sum to 1; pass allow_unnormalized=True")
    return v, (1.0 if normalized else (float(v[0]) if v[0] > 0 else 1.0))


def _near_degenerate(values, eps) -> bool:
    v = np.asarray(values, dtype=float)
    if v.size < 2 or v[0] <= 0:
        return False
    gaps = np.abs(np.diff(v)) / v[0]
    return bool(np.any((gaps > eps) & (gaps <= DEGENERACY_FACTOR * eps)))


def _group_direction(v, group) -> np.ndarray:
    """t = 1_G - |G| v / sum(v): moves group G, rescales the rest, sums to zero."""
    t = -len(group) * v / v.sum()
    t[group] += 1.0
    return t


def _deficient_shape(v, eps_abs) -> bool:
    return float(v[0] - v[-2]) <= eps_abs


# ---------------------------------------------------------------------------
# 2 x n

def _extreme_2n_values(v, scale, tol) -> ExtremalityVerdict:
    eps = tol.eq_eps * scale
    N = v.size
    dc = distinct_count(v, tol.eq_eps * scale / max(v[0], 1e-300))
    warn = ("DegeneracyWarning",) if _near_degenerate(v, tol.eq_eps) else ()
    c4 = np.array([v[0], v[-3], v[-2], v[-1]])
    margin = as2n_margin(c4)
    if margin < -eps:
        return ExtremalityVerdict(ExtStatus.NotMember, None, dc, warn)
    if v[-1] <= eps:
        if _deficient_shape(v, eps):
            return ExtremalityVerdict(ExtStatus.Extreme, ("deficient_rank_shape",), dc, warn)
        return ExtremalityVerdict(ExtStatus.NotMember, None, dc, warn)
    if margin > eps:
        return ExtremalityVerdict(ExtStatus.Interior, None, dc, warn)
    # (II): middle entries must equal lambda_1 or lambda_{2n-2}
    groups = equality_groups(v, eps / max(v[0], 1e-300))
    first, anchor = groups[0], next(g for g in groups if N - 3 in g)
    for g in groups:
        if g is first or g is anchor:
            continue
        if all(1 <= i <= N - 4 for i in g):
            return ExtremalityVerdict(ExtStatus.BoundaryNonExtreme, _group_direction(v, g), dc, warn)
    # (III): at least two of the four compressed values coincide
    cg = equality_groups(c4, eps / max(v[0], 1e-300))
    if len(cg) < 4:
        return ExtremalityVerdict(ExtStatus.Extreme,
                                  ("boundary", "middle_values_tied", "two_of_four_equal"), dc, warn)
    return ExtremalityVerdict(ExtStatus.BoundaryNonExtreme, _split_four_distinct(v, groups), dc, warn)


def _split_four_distinct(v, groups) -> np.ndarray:
    """Direction keeping the saturated inequality exact when l1 > l_{2n-2} > l_{2n-1} > l_{2n}."""
    N = v.size
    owner = {}
    for gi, g in enumerate(groups):
        for i in g:
            owner[i] = gi
    slots = [owner[0], owner[N - 3], owner[N - 2], owner[N - 1]]
    sizes = [len(groups[s]) for s in slots]
    x2, x4 = v[N - 3], v[N - 1]
    r = math.sqrt(x4 / x2)
    A = np.array([
        sizes,
        [0.0, x4, 0.0, -x2],
        [-1.0, r, 1.0, 1.0 / r],
    ], dtype=float)
    _, basis = smalllin.solve_homogeneous(A)
    tau = basis[:, 0]
    t = np.zeros(N)
    for s, val in zip(slots, tau):
        t[groups[s]] = val
    return t


def extreme_as22(x, allow_unnormalized: bool = False,
                 tol: Tolerance = DEFAULT_TOL) -> ExtremalityVerdict:
    """Extremality in AS_{2,2}: saturated inequality plus a repeated eigenvalue."""
    v, scale = _values_and_scale(x, 4, allow_unnormalized, tol)
    return _extreme_2n_values(v, scale, tol)


def extreme_as2n(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> ExtremalityVerdict:
    if s.dims.small != 2:
        raise WrongDims(f"extreme_as2n needs a 2 x n spectrum, got {s.dims}")
    return _extreme_2n_values(np.asarray(s.values, dtype=float), s.scale, tol)


# ---------------------------------------------------------------------------
# 3 x 3 judge system

def _singular_null_vector(L, name, tol) -> np.ndarray:
    eig = smalllin.eig_sym(L)
    top = max(abs(eig.values[0]), 1e-300)
    rank = int(np.sum(np.abs(eig.values) > tol.rank_eps * top))
    if rank <= 1:
        raise RankAnomaly(f"{name} is singular with rank {rank}; expected rank two")
    return smalllin.sign_normalize(eig.vectors[:, -1])


def build_judge_system(x, tol: Tolerance = DEFAULT_TOL) -> JudgeSystem:
    """Linear system in t whose only-trivial solvability decides extremality."""
    x = np.asarray(x, dtype=float)
    if x.size != 9:
        raise ValueError("the judge system needs a 9-vector")
    lp = build_L(x, tol)
    thresh = tol.det_eps * (2.0 * float(x[0])) ** 3
    s1, s2 = lp.l1 <= thresh, lp.l2 <= thresh
    if not (s1 or s2):
        raise NotBoundary(f"l1 = {lp.l1:g} and l2 = {lp.l2:g} are both positive")
    groups = equality_groups(x, tol.eq_eps)
    G = np.zeros((9, len(groups)))
    for g, idx in enumerate(groups):
        G[idx, g] = 1.0
    rows = [np.ones((1, 9)) @ G]
    nulls = {}
    for active, which, L in ((s1, 1, lp.L1), (s2, 2, lp.L2)):
        if not active:
            continue
        u = _singular_null_vector(L, f"L{which}", tol)
        nulls[f"L{which}"] = u
        # (L(t) u)_i = sum_{j,k} P[i, j, k] u_j t_k
        rows.append(np.einsum("ijk,j->ik", l_pattern(which), u) @ G)
    tag = CaseTag.BothSingular if (s1 and s2) else (CaseTag.L1singular if s1 else CaseTag.L2singular)
    return JudgeSystem(groups, np.vstack(rows), tag, nulls)


def _extreme_9(x, scale, tol, shift=None, cross_check=True):
    """Shared 3 x 3 routine; returns (status, certificate, judge)."""
    eps = tol.eq_eps * scale
    cls = boundary_ap9(x, scale, tol, shift, cross_check)
    if cls is BoundaryClass.NotMember:
        return ExtStatus.NotMember, None, None
    if x[8] <= eps:
        # membership already forced the (1, ..., 1, 0) shape
        return ExtStatus.Extreme, ("deficient_rank_shape",), None
    if cls is BoundaryClass.Interior:
        return ExtStatus.Interior, None, None
    js = build_judge_system(x, tol)
    trivial, basis = smalllin.solve_homogeneous(js.constraint_matrix, tol.rank_eps)
    if trivial:
        tags = ["boundary", js.case_tag.value, "judge_only_trivial"]
        return ExtStatus.Extreme, tuple(tags), js
    t = js.indicator @ basis[:, 0]
    return ExtStatus.BoundaryNonExtreme, t, js


def extreme_ap33(x, allow_unnormalized: bool = False, tol: Tolerance = DEFAULT_TOL,
                 cross_check: bool = True) -> ExtremalityVerdict:
    if isinstance(x, Spectrum) and (x.dims.small != 3 or x.dims.large != 3):
        raise WrongDims(f"extreme_ap33 needs a 3 x 3 spectrum, got {x.dims}")
    v, scale = _values_and_scale(x, 9, allow_unnormalized, tol)
    status, cert, js = _extreme_9(v, scale, tol, cross_check=cross_check)
    warn = ("DegeneracyWarning",) if _near_degenerate(v, tol.eq_eps) else ()
    return ExtremalityVerdict(status, cert, distinct_count(v, tol.eq_eps), warn, js)


def extreme_ap3n(s: Spectrum, tol: Tolerance = DEFAULT_TOL,
                 cross_check: bool = True) -> ExtremalityVerdict:
    if s.dims.small != 3:
        raise WrongDims(f"extreme_ap3n needs a 3 x n spectrum, got {s.dims}")
    if s.dims.large == 3:
        return extreme_ap33(s, tol=tol, cross_check=cross_check)
    v = np.asarray(s.values, dtype=float)
    N = v.size
    x = compress_3n(s)
    shift = SHRINK_EPS * float(v.sum()) / N
    status, cert, js = _extreme_9(x, s.scale, tol, shift, cross_check)
    dc = distinct_count(v, tol.eq_eps)
    warn = ("DegeneracyWarning",) if _near_degenerate(v, tol.eq_eps) else ()
    if status in (ExtStatus.NotMember, ExtStatus.Interior):
        return ExtremalityVerdict(status, None, dc, warn, js)
    groups = equality_groups(v, tol.eq_eps)
    owner = {i: gi for gi, g in enumerate(groups) for i in g}
    # (II): lambda_4 .. lambda_{3n-6} must equal lambda_3 or lambda_{3n-5}
    lo_anchor, hi_anchor = owner[2], owner[N - 6]
    for gi, g in enumerate(groups):
        if gi in (lo_anchor, hi_anchor):
            continue
        if all(3 <= i <= N - 7 for i in g):
            return ExtremalityVerdict(ExtStatus.BoundaryNonExtreme, _group_direction(v, g),
                                      dc, warn, js)
    if status is ExtStatus.Extreme:
        tags = cert + ("middle_values_tied",) if isinstance(cert, tuple) else cert
        return ExtremalityVerdict(status, tags, dc, warn, js)
    # lift the compressed direction to all 3n entries
    t = np.zeros(N)
    t[:3] = cert[:3]
    t[N - 6:] = cert[3:]
    for i in range(3, N - 6):
        if owner[i] == lo_anchor:
            t[i] = cert[2]
        elif owner[i] == hi_anchor:
            t[i] = cert[3]
    t -= (t.sum() / v.sum()) * v
    return ExtremalityVerdict(status, t, dc, warn, js)


def classify_extremality(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> ExtremalityVerdict:
    if s.dims.small == 2:
        return extreme_as2n(s, tol)
    if s.dims.small == 3:
        return extreme_ap3n(s, tol)
    raise WrongDims(f"extremality is only decided for min(m, n) in (2, 3), got {s.dims}")


# ---------------------------------------------------------------------------

def lambda_k_sup(k: int) -> float:
    """Largest possible sum of the k largest eigenvalues over AP_{3,3}."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= 8:
        raise ValueError(f"k must be an integer in 1..8, got {k!r}")
    from . import catalog  # deferred: catalog imports this module

    zeta = catalog.get(f"zeta{k}").spectrum.values
    return float(np.sum(zeta[:k]))


def verify_certificate(values, dims, t, tol: Tolerance = DEFAULT_TOL,
                       max_halvings: int = 40) -> float | None:
    """Find delta > 0 with values +/- delta t both sorted members; None if none found."""
    v = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if not isinstance(dims, SystemDims):
        dims = SystemDims(*dims)
    if np.linalg.norm(t) == 0 or abs(t.sum()) > 1e-9 * np.abs(t).sum():
        return None
    normalized = abs(v.sum() - 1.0) <= tol.norm_eps
    delta = 1e-2 * v[0] / np.max(np.abs(t))
    for _ in range(max_halvings):
        ok = True
        for sign in (1.0, -1.0):
            w = v + sign * delta * t
            if np.any(np.diff(w) > 0) or np.any(w < 0):
                ok = False
                break
            sp = Spectrum(w, dims, normalized)
            if not check_membership(sp, tol).member:
                ok = False
                break
        if ok:
            return float(delta)
        delta *= 0.5
    return None

