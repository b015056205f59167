"""Eigenvalue spectra of bipartite states, majorization and spectrum surgery.

A spectrum is the non-increasing eigenvalue vector of an ``m x n`` state.
Everything downstream (membership, extremality, robustness) works on these
vectors only, because both sets studied here are unitarily invariant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NegativeEigenvalue,
    NotNormalized,
    SumMismatch,
    WrongDims,
)

__all__ = [
    "SystemDims",
    "Tolerance",
    "DEFAULT_TOL",
    "Spectrum",
    "make_spectrum",
    "majorizes",
    "purity_in_maximal_ball",
    "subspectrum",
    "compress_2n",
    "compress_3n",
    "distinct_count",
    "equality_groups",
]


@dataclass(frozen=True)
class SystemDims:
    """Local dimensions of the two subsystems."""

    m: int
    n: int

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n:
            raise WrongDims(f"dimensions must be integers, got {self.m}x{self.n}")
        if self.m < 2 or self.n < 2:
            raise WrongDims(f"both dimensions must be >= 2, got {self.m}x{self.n}")

    @property
    def total(self) -> int:
        return self.m * self.n

    @property
    def small(self) -> int:
        # AS_{m,n} and AS_{n,m} coincide (swap the factors), so the criteria
        # only care about the smaller local dimension.
        return min(self.m, self.n)

    @property
    def large(self) -> int:
        return max(self.m, self.n)

    @classmethod
    def parse(cls, text: str) -> "SystemDims":
        match = re.fullmatch(r"\s*(\d+)\s*[xX*,]\s*(\d+)\s*", text)
        if not match:
            raise WrongDims(f"cannot parse dimensions {text!r}; expected MxN")
        return cls(int(match.group(1)), int(match.group(2)))

    def __str__(self):
        return f"{self.m}x{self.n}"


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``eq_eps`` is absolute on normalized spectra and relative to the largest
    entry on unnormalized ones.  ``det_eps`` is relative to ``(2*lambda_1)**3``
    because the L-matrix determinants are cubic forms.
    """

    eq_eps: float = 1e-9
    rank_eps: float = 1e-9
    norm_eps: float = 1e-12
    det_eps: float = 1e-9

    def __post_init__(self):
        for name in ("eq_eps", "rank_eps", "norm_eps", "det_eps"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    dims: SystemDims
    normalized: bool

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, item):
        return self.values[item]

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    @property
    def scale(self) -> float:
        """Reference magnitude for tolerances: 1 if normalized, else lambda_1."""
        if self.normalized:
            return 1.0
        top = float(self.values[0]) if len(self.values) else 0.0
        return top if top > 0 else 1.0

    def normalize(self) -> "Spectrum":
        total = self.total
        if total <= 0:
            raise NotNormalized("cannot normalize a spectrum with zero trace")
        return Spectrum(self.values / total, self.dims, True)

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]

    def __repr__(self):
        body = ", ".join(f"{v:.6g}" for v in self.values)
        return f"Spectrum([{body}], dims={self.dims}, normalized={self.normalized})"


def _as_dims(dims) -> SystemDims:
    if isinstance(dims, SystemDims):
        return dims
    if isinstance(dims, str):
        return SystemDims.parse(dims)
    m, n = dims
    return SystemDims(int(m), int(n))


def make_spectrum(raw, dims, tol: Tolerance = DEFAULT_TOL) -> Spectrum:
    """Validate, clamp and sort ``raw`` into a :class:`Spectrum`."""
    dims = _as_dims(dims)
    arr = np.asarray(raw, dtype=float).ravel()
    if arr.size != dims.total:
        raise DimensionMismatch(
            f"spectrum has {arr.size} entries but dims {dims} need {dims.total}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("spectrum entries must be finite")
    total = float(arr.sum())
    scale = max(1.0, abs(total)) if abs(total - 1.0) > tol.norm_eps else 1.0
    low = float(arr.min())
    if low < -tol.eq_eps * scale:
        raise NegativeEigenvalue(f"entry {low!r} is below -{tol.eq_eps * scale:g}")
    arr = np.clip(arr, 0.0, None)
    # stable descending sort: ties keep input order
    order = np.argsort(-arr, kind="stable")
    arr = arr[order]
    normalized = abs(float(arr.sum()) - 1.0) <= tol.norm_eps
    return Spectrum(arr, dims, normalized)


def _vector(x) -> np.ndarray:
    if isinstance(x, Spectrum):
        return np.asarray(x.values, dtype=float)
    return np.asarray(x, dtype=float).ravel()


def majorizes(x, y, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``x`` majorizes ``y`` (partial sums of x dominate those of y)."""
    xv = np.sort(_vector(x))[::-1]
    yv = np.sort(_vector(y))[::-1]
    if xv.size != yv.size:
        raise DimensionMismatch(f"length {xv.size} vs {yv.size}")
    sx, sy = float(xv.sum()), float(yv.sum())
    scale = max(1.0, abs(sx), abs(sy))
    if abs(sx - sy) > tol.norm_eps * scale:
        raise SumMismatch(f"totals differ: {sx!r} vs {sy!r}")
    px = np.cumsum(xv)[:-1]
    py = np.cumsum(yv)[:-1]
    return bool(np.all(px >= py - tol.eq_eps * scale))


def purity_in_maximal_ball(s: Spectrum, tol: Tolerance = DEFAULT_TOL) -> tuple[bool, float]:
    """Test the purity bound Tr(rho^2) <= 1/(mn-1); returns (inside, margin)."""
    if not s.normalized:
        raise NotNormalized("the maximal-ball test needs a normalized spectrum")
    bound = 1.0 / (s.dims.total - 1)
    margin = bound - float(np.dot(s.values, s.values))
    return margin >= -tol.eq_eps, margin


def subspectrum(s: Spectrum, indices, sub_dims) -> Spectrum:
    """Select ``indices`` (0-based) of ``s`` as an unnormalized ``sub_dims`` spectrum."""
    sub_dims = _as_dims(sub_dims)
    idx = sorted(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise DimensionMismatch("indices must be distinct")
    if len(idx) != sub_dims.total:
        raise DimensionMismatch(f"{len(idx)} indices for sub-dims {sub_dims}")
    if idx and (idx[0] < 0 or idx[-1] >= len(s.values)):
        raise IndexOutOfRange(f"indices must lie in [0, {len(s.values) - 1}]")
    picked = np.sort(s.values[idx])[::-1]
    return Spectrum(picked, sub_dims, False)


def compress_2n(s: Spectrum) -> np.ndarray:
    """(l_1, l_{2n-2}, l_{2n-1}, l_{2n}): the entries the 2 x n criterion reads."""
    if s.dims.small != 2:
        raise WrongDims(f"compress_2n needs a 2 x n spectrum, got {s.dims}")
    v = s.values
    return np.array([v[0], v[-3], v[-2], v[-1]])


def compress_3n(s: Spectrum) -> np.ndarray:
    """Three largest followed by the six smallest entries (a 9-vector)."""
    if s.dims.small != 3:
        raise WrongDims(f"compress_3n needs a 3 x n spectrum, got {s.dims}")
    v = s.values
    return np.concatenate([v[:3], v[-6:]])


def equality_groups(values, eps: float) -> list[list[int]]:
    """Group consecutive indices of a sorted vector whose entries coincide.

    Two neighbours are equal when they differ by at most ``eps * values[0]``.
    """
    v = _vector(values)
    if v.size == 0:
        return []
    thresh = eps * (v[0] if v[0] > 0 else 1.0)
    groups = [[0]]
    for i in range(1, v.size):
        if abs(v[i - 1] - v[i]) <= thresh:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def distinct_count(values, eps: float = DEFAULT_TOL.eq_eps) -> int:
    return len(equality_groups(values, eps))
