"""Named spectra with claims that can be re-checked against the criteria.

Irrational entries are built from closed forms when the module loads (square
roots, and the largest root of x^3 - x^2 - 5x + 1 for zeta5), so every claim
is checked against the same floating-point values the criteria see.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnknownName
from .smalllin import real_cubic_roots
from .spectra import DEFAULT_TOL, Spectrum, SystemDims, Tolerance, make_spectrum, purity_in_maximal_ball

__all__ = ["NamedSpectrum", "ClaimResult", "get", "names", "entries", "verify_all",
           "as_sufficient", "CLAIMS"]

CLAIMS = (
    "member", "non_member", "boundary", "extreme", "boundary_non_extreme",
    "on_maximal_ball", "as_sufficient", "all_2x2_subspectra_member",
)


@dataclass(frozen=True, eq=False)
class NamedSpectrum:
    name: str
    spectrum: Spectrum
    claims: tuple
    source: str


@dataclass(frozen=True)
class ClaimResult:
    name: str
    claim: str
    passed: bool
    detail: str = ""


def _norm(raw, dims):
    v = np.asarray(raw, dtype=float)
    return make_spectrum(v / v.sum(), dims)


def _zeta5_root() -> float:
    return max(real_cubic_roots(1.0, -1.0, -5.0, 1.0))


def _build():
    d33 = SystemDims(3, 3)
    s2, s17 = math.sqrt(2.0), math.sqrt(17.0)
    x5 = _zeta5_root()
    zetas = [
        [3] + [1] * 8,
        [s2 + 1] * 2 + [1] * 7,
        [2] * 3 + [1] * 6,
        [(5 + s17) / 4] * 4 + [1] * 5,
        [x5] * 5 + [1] * 4,
        [3] * 6 + [1] * 3,
        [3 + 2 * s2] * 7 + [1] * 2,
        [1] * 8 + [0],
    ]
    out = []
    zeta_src = "two-distinct-eigenvalue extreme points of AP(3,3)"
    for k, raw in enumerate(zetas, start=1):
        claims = ["member", "boundary", "extreme"]
        if k in (1, 3, 8):
            claims.append("as_sufficient")
        if k == 3:
            claims.append("on_maximal_ball")
        out.append(NamedSpectrum(f"zeta{k}", _norm(raw, d33), tuple(claims), zeta_src))

    out.append(NamedSpectrum("mb22_full", _norm([3, 1, 1, 1], (2, 2)),
                             ("member", "boundary", "extreme", "on_maximal_ball"),
                             "full-rank extreme point of AS(2,2) on the maximal ball"))
    out.append(NamedSpectrum("mb22_deficient", _norm([1, 1, 1, 0], (2, 2)),
                             ("member", "boundary", "extreme", "on_maximal_ball"),
                             "rank-deficient extreme point of AS(2,2) on the maximal ball"))
    for m, n in ((2, 2), (2, 3), (3, 3), (3, 4), (4, 4)):
        N = m * n
        decidable = min(m, n) <= 3
        claims = ("member", "as_sufficient") + (("boundary", "extreme") if decidable else ())
        out.append(NamedSpectrum(f"max_eig_{m}x{n}", _norm([3] + [1] * (N - 1), (m, n)), claims,
                                 "spectrum with the largest admissible top eigenvalue 3/(2+mn)"))
        claims = ("member", "as_sufficient", "on_maximal_ball") + (
            ("boundary", "extreme") if decidable else ())
        out.append(NamedSpectrum(f"deficient_{m}x{n}", _norm([1] * (N - 1) + [0], (m, n)), claims,
                                 "the only rank-deficient absolutely PPT spectrum"))
    out.append(NamedSpectrum("remark_counterexample", _norm([15, 14, 9, 9, 9, 9, 9, 9, 1], d33),
                             ("non_member", "all_2x2_subspectra_member"),
                             "every 2x2 subspectrum is AP but the 3x3 state is not"))
    out.append(NamedSpectrum("plpl_sigma", _norm([3, 3, 1, 1, 1, 1], (2, 3)),
                             ("member", "boundary", "extreme"),
                             "majorizing boundary member of AS(2,3)"))
    out.append(NamedSpectrum("plpl_rho", _norm([3, 2, 2, 1, 1, 1], (2, 3)),
                             ("member", "boundary", "boundary_non_extreme"),
                             "majorized boundary member of AS(2,3)"))
    return {e.name: e for e in out}


_ENTRIES = _build()


def names() -> list[str]:
    return list(_ENTRIES)


def entries() -> list[NamedSpectrum]:
    return list(_ENTRIES.values())


def get(name: str) -> NamedSpectrum:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownName(f"no catalog entry named {name!r}; known: {', '.join(_ENTRIES)}") from None


def as_sufficient(s: Spectrum, eps: float = 1e-9) -> tuple[bool, str]:
    """Sufficient conditions for absolute separability (not just PPT)."""
    ns = s if s.normalized else s.normalize()
    v, N = ns.values, ns.dims.total
    if purity_in_maximal_ball(ns)[0]:
        return True, "maximal_ball"
    if abs(v[0] - 3.0 / (2 + N)) <= eps and np.all(np.abs(v[1:] - 1.0 / (2 + N)) <= eps):
        return True, "largest_top_eigenvalue_shape"
    if v[-1] <= eps and v[0] - v[-2] <= eps:
        return True, "deficient_rank_shape"
    return False, "no sufficient condition applies"


def _check(entry: NamedSpectrum, claim: str, tol: Tolerance = DEFAULT_TOL) -> ClaimResult:
    from .extremality import ExtStatus, classify_extremality
    from .membership import BoundaryClass, check_as2n, check_membership, classify_boundary

    s = entry.spectrum
    if claim == "member":
        v = check_membership(s, tol)
        return ClaimResult(entry.name, claim, v.member, v.status.value)
    if claim == "non_member":
        v = check_membership(s, tol)
        return ClaimResult(entry.name, claim, v.status.value == "NonMember", v.status.value)
    if claim == "boundary":
        b = classify_boundary(s, tol)
        return ClaimResult(entry.name, claim, b is BoundaryClass.Boundary, b.value)
    if claim in ("extreme", "boundary_non_extreme"):
        e = classify_extremality(s, tol)
        want = ExtStatus.Extreme if claim == "extreme" else ExtStatus.BoundaryNonExtreme
        return ClaimResult(entry.name, claim, e.status is want, e.status.value)
    if claim == "on_maximal_ball":
        inside, margin = purity_in_maximal_ball(s, tol)
        return ClaimResult(entry.name, claim, inside, f"margin={margin:.3g}")
    if claim == "as_sufficient":
        ok, why = as_sufficient(s, max(tol.eq_eps, 1e-9))
        return ClaimResult(entry.name, claim, ok, why)
    if claim == "all_2x2_subspectra_member":
        bad = 0
        for idx in itertools.combinations(range(len(s)), 4):
            sub = Spectrum(np.sort(s.values[list(idx)])[::-1], SystemDims(2, 2), False)
            bad += not check_as2n(sub, tol).member
        return ClaimResult(entry.name, claim, bad == 0, f"{bad} failing subsets")
    raise ValueError(f"unknown claim {claim!r}")


def verify_all(tol: Tolerance = DEFAULT_TOL) -> list[ClaimResult]:
    """Re-check every claim of every entry."""
    return [_check(e, c, tol) for e in _ENTRIES.values() for c in e.claims]
