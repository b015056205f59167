"""Dense linear algebra for matrices of order <= 16.

Cyclic Jacobi for symmetric/Hermitian eigenproblems and one-sided (Hestenes)
Jacobi for singular values.  Both run on plain Python lists: at these sizes
that beats per-call numpy overhead, and it keeps the criteria independent of
LAPACK, which the Monte-Carlo oracle uses instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotSymmetric
from .spectra import DEFAULT_TOL

__all__ = [
    "EigenResult",
    "eig_sym",
    "eig_herm",
    "rank_and_nullspace",
    "solve_homogeneous",
    "singular_values",
    "real_cubic_roots",
    "sign_normalize",
]

MAX_ORDER = 16
MAX_SWEEPS = 100
OFF_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class EigenResult:
    values: np.ndarray  # non-increasing
    vectors: np.ndarray  # columns aligned with values


def _to_rows(M, complex_ok: bool):
    arr = np.asarray(M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] > 2 * MAX_ORDER:
        raise ValueError(f"order {arr.shape[0]} exceeds the small-matrix limit")
    if np.iscomplexobj(arr):
        if not complex_ok:
            raise NotSymmetric("complex input to a real-symmetric routine")
        return [[complex(x) for x in row] for row in arr.tolist()], True
    return [[float(x) for x in row] for row in arr.tolist()], False


def _jacobi(a, is_complex: bool):
    """Diagonalize Hermitian ``a`` in place; returns (diag, V as rows)."""
    n = len(a)
    one = 1.0 + 0j if is_complex else 1.0
    zero = 0j if is_complex else 0.0
    v = [[one if i == j else zero for j in range(n)] for i in range(n)]
    norm = math.sqrt(sum(abs(x) ** 2 for row in a for x in row))
    if norm == 0.0 or n == 1:
        return [a[i][i].real if is_complex else a[i][i] for i in range(n)], v
    target = OFF_TOL * norm
    for _ in range(MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p][q]
                mag = abs(b)
                if mag <= 1e-300 or mag <= 1e-18 * norm:
                    continue
                phase = b / mag
                app = a[p][p].real if is_complex else a[p][p]
                aqq = a[q][q].real if is_complex else a[q][q]
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                sp_conj = sp.conjugate() if is_complex else sp
                # columns p, q of A <- A G with G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k][p]
                    akq = a[k][q]
                    nkp = c * akp - sp_conj * akq
                    nkq = sp * akp + c * akq
                    a[k][p] = nkp
                    a[k][q] = nkq
                    if is_complex:
                        a[p][k] = nkp.conjugate()
                        a[q][k] = nkq.conjugate()
                    else:
                        a[p][k] = nkp
                        a[q][k] = nkq
                a[p][p] = app - t * mag
                a[q][q] = aqq + t * mag
                a[p][q] = zero
                a[q][p] = zero
                for k in range(n):
                    vkp = v[k][p]
                    vkq = v[k][q]
                    v[k][p] = c * vkp - sp_conj * vkq
                    v[k][q] = sp * vkp + c * vkq
    diag = [a[i][i].real if is_complex else a[i][i] for i in range(n)]
    return diag, v


def sign_normalize(vec, eps: float = 1e-12) -> np.ndarray:
    """Flip ``vec`` so that its first non-negligible component is positive."""
    vec = np.asarray(vec)
    scale = np.max(np.abs(vec)) if vec.size else 0.0
    for x in vec:
        if abs(x) > eps * scale:
            if (x.real if np.iscomplexobj(vec) else x) < 0:
                return -vec
            return vec
    return vec


def _check_hermitian(rows, is_complex, eps, exc):
    n = len(rows)
    scale = max(1.0, max((abs(x) for row in rows for x in row), default=0.0))
    for i in range(n):
        if is_complex and abs(rows[i][i].imag) > eps * scale:
            raise exc(f"diagonal entry {i} has imaginary part {rows[i][i].imag!r}")
        for j in range(i + 1, n):
            other = rows[j][i].conjugate() if is_complex else rows[j][i]
            if abs(rows[i][j] - other) > eps * scale:
                raise exc(f"entries ({i},{j}) and ({j},{i}) are not conjugate")


def _symmetrize(rows, is_complex):
    n = len(rows)
    for i in range(n):
        if is_complex:
            rows[i][i] = complex(rows[i][i].real, 0.0)
        for j in range(i + 1, n):
            if is_complex:
                avg = 0.5 * (rows[i][j] + rows[j][i].conjugate())
                rows[i][j], rows[j][i] = avg, avg.conjugate()
            else:
                avg = 0.5 * (rows[i][j] + rows[j][i])
                rows[i][j] = rows[j][i] = avg


def _eig(rows, is_complex):
    diag, v = _jacobi(rows, is_complex)
    order = sorted(range(len(diag)), key=lambda i: -diag[i])
    values = np.array([diag[i] for i in order])
    dtype = complex if is_complex else float
    vectors = np.array([[v[k][i] for i in order] for k in range(len(diag))], dtype=dtype)
    for j in range(vectors.shape[1]):
        vectors[:, j] = sign_normalize(vectors[:, j])
    return EigenResult(values, vectors)


def eig_sym(M, eps: float = DEFAULT_TOL.eq_eps) -> EigenResult:
    """Eigen-decomposition of a real symmetric matrix, values non-increasing."""
    rows, is_complex = _to_rows(M, complex_ok=False)
    if len(rows) > MAX_ORDER:
        raise ValueError(f"order {len(rows)} exceeds {MAX_ORDER}")
    _check_hermitian(rows, False, eps, NotSymmetric)
    _symmetrize(rows, False)
    return _eig(rows, False)


def eig_herm(M, eps: float = DEFAULT_TOL.eq_eps, vectors: bool = False):
    """Eigenvalues (non-increasing) of a Hermitian matrix.

    With ``vectors=True`` the full :class:`EigenResult` is returned.
    """
    rows, is_complex = _to_rows(M, complex_ok=True)
    if len(rows) > MAX_ORDER:
        raise ValueError(f"order {len(rows)} exceeds {MAX_ORDER}")
    _check_hermitian(rows, is_complex, eps, NotHermitian)
    _symmetrize(rows, is_complex)
    result = _eig(rows, is_complex)
    return result if vectors else result.values


def min_eig_sym3(rows) -> float:
    """Smallest eigenvalue of a symmetric 3x3 given as nested lists (no checks)."""
    diag, _ = _jacobi([list(r) for r in rows], False)
    return min(diag)


def _hestenes(a_cols, m):
    """One-sided Jacobi on the columns of an m-row matrix.

    Returns (column norms, V rows) with A V = U diag(sigma).
    """
    n = len(a_cols)
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    total = sum(x * x for col in a_cols for x in col)
    negligible = 1e-30 * total
    for _ in range(MAX_SWEEPS):
        rotated = False
        # squared norms are refreshed each sweep and updated in closed form in between
        norms = [sum(x * x for x in col) for col in a_cols]
        for p in range(n - 1):
            for q in range(p + 1, n):
                up, uq = a_cols[p], a_cols[q]
                alpha, beta = norms[p], norms[q]
                if alpha <= negligible or beta <= negligible:
                    continue
                gamma = sum(x * y for x, y in zip(up, uq))
                if abs(gamma) <= 1e-14 * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                a_cols[p] = [c * x - s * y for x, y in zip(up, uq)]
                a_cols[q] = [s * x + c * y for x, y in zip(up, uq)]
                norms[p] = max(alpha - t * gamma, 0.0)
                norms[q] = beta + t * gamma
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
        if not rotated:
            break
    sigma = [math.sqrt(sum(x * x for x in col)) for col in a_cols]
    return sigma, v


def _svd_null(A):
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if np.iscomplexobj(arr):
        raise ValueError("real matrices only")
    rows, cols = arr.shape
    if rows < cols:
        arr = np.vstack([arr, np.zeros((cols - rows, cols))])
        rows = cols
    a_cols = [[float(x) for x in arr[:, j]] for j in range(cols)]
    sigma, v = _hestenes(a_cols, rows)
    return sigma, np.array(v, dtype=float)


def singular_values(A) -> np.ndarray:
    sigma, _ = _svd_null(A)
    return np.array(sorted(sigma, reverse=True))


def rank_and_nullspace(M, rank_eps: float = DEFAULT_TOL.rank_eps):
    """Numerical rank and an orthonormal null-space basis (columns)."""
    sigma, v = _svd_null(M)
    top = max(sigma) if sigma else 0.0
    keep = [s > rank_eps * top for s in sigma] if top > 0 else [False] * len(sigma)
    rank = sum(keep)
    null = [sign_normalize(v[:, j]) for j, k in enumerate(keep) if not k]
    basis = np.column_stack(null) if null else np.zeros((v.shape[0], 0))
    return rank, basis


def solve_homogeneous(A, rank_eps: float = DEFAULT_TOL.rank_eps):
    """Decide whether ``A t = 0`` has only the trivial solution.

    Returns ``(only_trivial, basis)``; ``basis`` columns span the solution set.
    """
    arr = np.atleast_2d(np.asarray(A, dtype=float))
    rank, basis = rank_and_nullspace(arr, rank_eps)
    only_trivial = rank == arr.shape[1]
    return only_trivial, basis


def real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Real roots, ascending, of ``c3 x^3 + c2 x^2 + c1 x + c0`` (repeated roots repeated)."""
    if c3 == 0:
        raise ValueError("leading coefficient must be non-zero")
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    # depressed cubic y^3 + p y + q with x = y - a/3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    # compare p, q and the discriminant with the size of the terms they are built from,
    # so cubics with tiny coefficients are not mistaken for a triple root
    mag_p = max(a * a, abs(b))
    mag_q = max(abs(a) ** 3, abs(a * b), abs(c))
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    mag_disc = max((q / 2.0) ** 2, abs(p / 3.0) ** 3)
    if abs(p) <= 1e-14 * mag_p and abs(q) <= 1e-14 * mag_q:
        roots = [shift] * 3
    elif disc > 1e-14 * mag_disc:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2 + sq) ** (1 / 3), -q / 2 + sq)
                 + math.copysign(abs(-q / 2 - sq) ** (1 / 3), -q / 2 - sq) + shift]
    elif disc < -1e-14 * mag_disc:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
    elif p == 0.0:
        roots = [shift] * 3
    else:
        # double root
        roots = [3.0 * q / p + shift, -1.5 * q / p + shift, -1.5 * q / p + shift]

    def poly(x):
        return ((x + a) * x + b) * x + c

    def dpoly(x):
        return (3.0 * x + 2.0 * a) * x + b

    polished = []
    for x in roots:
        for _ in range(50):
            d = dpoly(x)
            if d == 0:
                break
            step = poly(x) / d
            x_new = x - step
            if abs(x_new - x) <= 1e-16 * max(1.0, abs(x)):
                x = x_new
                break
            if abs(poly(x_new)) > abs(poly(x)):
                break
            x = x_new
        polished.append(x)
    return sorted(polished)

