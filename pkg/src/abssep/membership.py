"""Membership tests for absolutely separable / absolutely PPT spectra.

For a 2 x n system the sets AS and AP coincide and a single inequality on four
eigenvalues decides membership.  For 3 x n the AP set is cut out by two 3 x 3
linear matrix inequalities on nine eigenvalues (the three largest and the six
smallest).  Beyond that only a necessary bound and the maximal-ball sufficient
condition are available, so larger systems may come back undecided.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import smalllin
from .errors import BoundaryDisagreement, NotSorted, WrongDims
from .spectra import (
    DEFAULT_TOL,
    Spectrum,
    Tolerance,
    compress_2n,
    compress_3n,
    purity_in_maximal_ball,
)

__all__ = [
    "SetName",
    "Status",
    "BoundaryClass",
    "MembershipVerdict",
    "LPair",
    "build_L",
    "l_pattern",
    "as2n_margin",
    "check_as2n",
    "check_ap33",
    "check_ap3n",
    "check_ap9",
    "check_apmn_envelope",
    "check_membership",
    "classify_boundary",
    "boundary_ap9",
    "batch_min_margin",
    "SHRINK_EPS",
]

SHRINK_EPS = 1e-6
SHRINK_STRICT = 1e-12


class SetName(str, enum.Enum):
    AS2n = "AS2n"
    AP3n = "AP3n"
    APmn_envelope = "APmn_envelope"


class Status(str, enum.Enum):
    Member = "Member"
    NonMember = "NonMember"
    UndecidedEnvelope = "UndecidedEnvelope"


class BoundaryClass(str, enum.Enum):
    Interior = "Interior"
    Boundary = "Boundary"
    NotMember = "NotMember"


@dataclass(frozen=True)
class MembershipVerdict:
    set_name: SetName
    status: Status
    margins: dict
    criterion_trace: tuple
    info: dict = field(default_factory=dict)

    @property
    def member(self) -> bool:
        return self.status is Status.Member

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else math.inf


# ---------------------------------------------------------------------------
# L-maps.  L(x) = P @ x with P a (3, 3, 9) pattern tensor; writing them as
# tensors lets the extremality code reuse them for the linear systems in t.

def _pattern(entries) -> np.ndarray:
    P = np.zeros((3, 3, 9))
    for (i, j), terms in entries.items():
        for k, c in terms:
            P[i, j, k - 1] += c
            if i != j:
                P[j, i, k - 1] += c
    return P


_P1 = _pattern({
    (0, 0): [(9, 2)], (1, 1): [(7, 2)], (2, 2): [(4, 2)],
    (0, 1): [(8, 1), (1, -1)], (0, 2): [(6, 1), (2, -1)], (1, 2): [(5, 1), (3, -1)],
})
_P2 = _pattern({
    (0, 0): [(9, 2)], (1, 1): [(6, 2)], (2, 2): [(4, 2)],
    (0, 1): [(8, 1), (1, -1)], (0, 2): [(7, 1), (2, -1)], (1, 2): [(5, 1), (3, -1)],
})
_P1.setflags(write=False)
_P2.setflags(write=False)


def l_pattern(which: int) -> np.ndarray:
    """The (3, 3, 9) tensor P with L_which(x) = P @ x."""
    if which == 1:
        return _P1
    if which == 2:
        return _P2
    raise ValueError("which must be 1 or 2")


def _det3(M) -> float:
    return float(
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


@dataclass(frozen=True, eq=False)
class LPair:
    L1: np.ndarray
    L2: np.ndarray
    l1: float
    l2: float

    def min_eigs(self) -> tuple[float, float]:
        return (float(smalllin.eig_sym(self.L1).values[-1]),
                float(smalllin.eig_sym(self.L2).values[-1]))


def build_L(x, tol: Tolerance = DEFAULT_TOL) -> LPair:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != 9:
        raise ValueError(f"build_L needs a 9-vector, got {x.size} entries")
    scale = max(float(np.max(np.abs(x))), 1e-300)
    if np.any(np.diff(x) > tol.eq_eps * scale):
        raise NotSorted("build_L input must be non-increasing")
    L1 = _P1 @ x
    L2 = _P2 @ x
    return LPair(L1, L2, _det3(L1), _det3(L2))


# ---------------------------------------------------------------------------
# 2 x n

def as2n_margin(c4) -> float:
    """Slack l_{2n-1} + 2 sqrt(l_{2n-2} l_{2n}) - l_1 for the compressed 4-vector."""
    a, b, c, d = (float(v) for v in c4)
    return c + 2.0 * math.sqrt(max(b, 0.0) * max(d, 0.0)) - a


def _drt_matrix(c4) -> np.ndarray:
    a, b, c, d = (float(v) for v in c4)
    return np.array([[2.0 * d, c - a], [c - a, 2.0 * b]])


def check_as2n(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    if s.dims.small != 2:
        raise WrongDims(f"check_as2n needs a 2 x n spectrum, got {s.dims}")
    c4 = compress_2n(s)
    margin = as2n_margin(c4)
    drt = _drt_matrix(c4)
    rank, _ = smalllin.rank_and_nullspace(drt, tol.rank_eps)
    ok = margin >= -tol.eq_eps * s.scale
    return MembershipVerdict(
        SetName.AS2n,
        Status.Member if ok else Status.NonMember,
        {"inequality": margin},
        ("as2n_inequality",),
        {"drt_det": float(drt[0, 0] * drt[1, 1] - drt[0, 1] ** 2), "drt_rank": int(rank)},
    )


# ---------------------------------------------------------------------------
# 3 x n (absolutely PPT)

def check_ap9(x, scale: float, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    """Decide AP_{3,3} membership of a (possibly unnormalized) 9-vector.

    ``scale`` fixes the tolerance unit: 1 for pieces of a normalized spectrum,
    the largest entry otherwise.
    """
    x = np.asarray(x, dtype=float)
    lp = build_L(x, tol)
    e1, e2 = lp.min_eigs()
    eps = tol.eq_eps * scale
    info = {"l1": lp.l1, "l2": lp.l2}
    if x[8] <= eps:
        # rank deficient: only the (1, ..., 1, 0) shape survives
        spread = float(x[0] - x[7])
        margins = {"L1": e1, "L2": e2, "deficient_spread": -spread}
        ok = spread <= eps
        return MembershipVerdict(SetName.AP3n, Status.Member if ok else Status.NonMember,
                                 margins, ("deficient_rank",), info)
    ok = e1 >= -eps and e2 >= -eps
    return MembershipVerdict(SetName.AP3n, Status.Member if ok else Status.NonMember,
                             {"L1": e1, "L2": e2}, ("L1_psd", "L2_psd"), info)


def check_ap33(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    if s.dims.small != 3 or s.dims.large != 3:
        raise WrongDims(f"check_ap33 needs a 3 x 3 spectrum, got {s.dims}")
    return check_ap9(s.values, s.scale, tol)


def check_ap3n(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    if s.dims.small != 3:
        raise WrongDims(f"check_ap3n needs a 3 x n spectrum, got {s.dims}")
    return check_ap9(compress_3n(s), s.scale, tol)


# ---------------------------------------------------------------------------
# general m x n envelope

def check_apmn_envelope(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    """Necessary/sufficient bounds for AP_{m,n}; exact when min(m, n) <= 3."""
    if s.dims.small == 2:
        return check_as2n(s, tol)
    if s.dims.small == 3:
        return check_ap3n(s, tol)
    ns = s if s.normalized else s.normalize()
    v = ns.values
    N = ns.dims.total
    eps = tol.eq_eps
    hild = float(v[-2] + 2.0 * math.sqrt(v[-3] * v[-1]) - v[0])
    top = 3.0 / (2.0 + N)
    bound = top - float(v[0])
    inside, purity = purity_in_maximal_ball(ns, tol)
    sub = check_ap9(compress_3n_general(v), 1.0, tol)
    margins = {"hildebrand": hild, "lambda1_bound": bound, "purity": purity}
    margins.update({f"sub33_{k}": val for k, val in sub.margins.items()})

    def verdict(status, *trace):
        return MembershipVerdict(SetName.APmn_envelope, status, margins, trace)

    if hild < -eps or bound < -eps:
        return verdict(Status.NonMember, "necessary_bound")
    if v[-1] <= eps:
        spread = float(v[0] - v[-2])
        return verdict(Status.Member if spread <= eps else Status.NonMember, "deficient_rank")
    if not sub.member:
        return verdict(Status.NonMember, "subspectrum_3x3")
    if inside:
        return verdict(Status.Member, "maximal_ball")
    if abs(bound) <= eps:
        rest = v[1:]
        shaped = float(np.max(np.abs(rest - 1.0 / (2.0 + N)))) <= eps
        return verdict(Status.Member if shaped else Status.NonMember, "lambda1_extreme")
    return verdict(Status.UndecidedEnvelope, "envelope_gap")


def compress_3n_general(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.concatenate([v[:3], v[-6:]])


def check_membership(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> MembershipVerdict:
    """Dispatch on the smaller local dimension."""
    if s.dims.small == 2:
        return check_as2n(s, tol)
    if s.dims.small == 3:
        return check_ap3n(s, tol)
    return check_apmn_envelope(s, tol)


# ---------------------------------------------------------------------------
# boundary classification

def boundary_ap9(x, scale: float, tol: Tolerance = DEFAULT_TOL, shift: float | None = None,
                 cross_check: bool = True) -> BoundaryClass:
    """Boundary status of a 9-vector relative to AP_{3,3}.

    ``shift`` is the amount subtracted from every entry by the shrink test
    (rho - eps I / N); it defaults to ``SHRINK_EPS * sum(x) / 9``.
    """
    x = np.asarray(x, dtype=float)
    v = check_ap9(x, scale, tol)
    if not v.member:
        return BoundaryClass.NotMember
    if x[8] <= tol.eq_eps * scale:
        on_boundary = True
    else:
        on_boundary = min(v.info["l1"], v.info["l2"]) <= tol.det_eps * (2.0 * float(x[0])) ** 3
    if cross_check:
        if shift is None:
            shift = SHRINK_EPS * float(x.sum()) / 9.0
        y = x - shift
        # the shrink moves the L eigenvalues by about ``shift``, so judge y with a
        # threshold far below it, whatever eq_eps the caller chose
        strict = dataclasses.replace(tol, eq_eps=min(tol.eq_eps, SHRINK_STRICT))
        interior_by_shrink = bool(np.all(y >= 0)) and check_ap9(y, scale, strict).member
        if interior_by_shrink == on_boundary:
            raise BoundaryDisagreement(
                f"determinant test says {'boundary' if on_boundary else 'interior'} but the "
                f"shrink test says {'interior' if interior_by_shrink else 'boundary'} for {x!r}"
            )
    return BoundaryClass.Boundary if on_boundary else BoundaryClass.Interior


def classify_boundary(s: Spectrum, tol: Tolerance = DEFAULT_TOL,
                      cross_check: bool = True) -> BoundaryClass:
    small = s.dims.small
    if small == 2:
        v = check_as2n(s, tol)
        if not v.member:
            return BoundaryClass.NotMember
        # a vanishing last eigenvalue puts the state on the face of the simplex; the
        # sqrt in the margin would otherwise inflate a 1e-17 entry to ~1e-8
        if v.margins["inequality"] <= tol.eq_eps * s.scale or s.values[-1] <= tol.eq_eps * s.scale:
            return BoundaryClass.Boundary
        return BoundaryClass.Interior
    if small != 3:
        raise WrongDims(f"boundary classification needs min(m, n) in (2, 3), got {s.dims}")
    shift = SHRINK_EPS * s.total / s.dims.total
    return boundary_ap9(compress_3n(s), s.scale, tol, shift, cross_check)


# ---------------------------------------------------------------------------
# vectorized margins for bulk sample generation (numpy eigvalsh; not used by
# the verdicts themselves)

def batch_min_margin(values, dims) -> np.ndarray:
    """Smallest criterion margin for each row of a (k, mn) array of sorted spectra.

    For 2 x n this is the inequality slack, for 3 x n the smaller of the two
    minimum L eigenvalues.  Rows must already be sorted non-increasing.
    """
    V = np.atleast_2d(np.asarray(values, dtype=float))
    small = min(dims) if not hasattr(dims, "small") else dims.small
    if small == 2:
        return V[:, -2] + 2.0 * np.sqrt(np.clip(V[:, -3] * V[:, -1], 0, None)) - V[:, 0]
    if small == 3:
        X = np.concatenate([V[:, :3], V[:, -6:]], axis=1)
        L1 = np.einsum("ijk,bk->bij", _P1, X)
        L2 = np.einsum("ijk,bk->bij", _P2, X)
        return np.minimum(np.linalg.eigvalsh(L1)[:, 0], np.linalg.eigvalsh(L2)[:, 0])
    raise WrongDims("batch margins need min(m, n) in (2, 3)")
