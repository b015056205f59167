import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abssep.catalog import get
from abssep.errors import DimensionMismatch, NotHermitian, NotMajorized
from abssep.membership import check_membership
from abssep.oracle import (
    DensityMatrix,
    haar_unitary,
    mc_ap_check,
    nonextreme_witness_search,
    partial_transpose,
    sample_rng,
    uhlmann_decompose,
)
from abssep.sampling import project_to_boundary
from abssep.spectra import SystemDims, make_spectrum, majorizes

from helpers import sorted_dirichlet


def sp(values, dims):
    v = np.asarray(values, dtype=float)
    return make_spectrum(v / v.sum(), dims)


def test_haar_examples():
    u = haar_unitary(1, sample_rng(1, 0))
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-14
    for d in (2, 4, 9, 16):
        U = haar_unitary(d, sample_rng(5, d))
        assert np.linalg.norm(U.conj().T @ U - np.eye(d), 2) <= 1e-10
    a = haar_unitary(4, sample_rng(7, 3))
    b = haar_unitary(4, sample_rng(7, 3))
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        haar_unitary(17, sample_rng(0, 0))


def test_haar_first_moment_isotropic():
    d, n = 4, 4000
    acc = np.zeros((d, d))
    for i in range(n):
        acc += np.abs(haar_unitary(d, sample_rng(11, i))) ** 2
    assert np.allclose(acc / n, 1 / d, atol=0.02)


def test_density_matrix_validation():
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(3) / 3, SystemDims(2, 2))
    with pytest.raises(NotHermitian):
        DensityMatrix(np.diag([0.25] * 4) + np.triu(np.ones((4, 4)), 1) * 0.01, SystemDims(2, 2))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4), SystemDims(2, 2))
    rho = DensityMatrix.from_spectrum([0.4, 0.3, 0.2, 0.1], (2, 2), haar_unitary(4, sample_rng(0, 0)))
    assert rho.order == 4
    assert np.allclose(np.linalg.eigvalsh(rho.entries), [0.1, 0.2, 0.3, 0.4])


def test_partial_transpose_examples():
    D = DensityMatrix.from_spectrum([0.4, 0.3, 0.2, 0.1], (2, 2))
    assert np.allclose(partial_transpose(D), D.entries)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = DensityMatrix(np.outer(phi, phi), SystemDims(2, 2))
    assert np.linalg.eigvalsh(partial_transpose(bell))[0] == pytest.approx(-0.5)
    rng = np.random.default_rng(0)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    prod = DensityMatrix(np.outer(psi, psi.conj()), SystemDims(2, 3))
    assert np.linalg.eigvalsh(partial_transpose(prod))[0] >= -1e-12
    with pytest.raises(DimensionMismatch):
        partial_transpose(np.eye(4))
    with pytest.raises(DimensionMismatch):
        partial_transpose(np.eye(4), (2, 3))


@given(st.integers(0, 10**6))
def test_partial_transpose_matches_blockwise_definition(seed):
    rng = np.random.default_rng(seed)
    m, n = 2, 3
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    M = A + A.conj().T
    expected = M.copy()
    for i in range(m):
        for j in range(m):
            expected[i * n:(i + 1) * n, j * n:(j + 1) * n] = M[i * n:(i + 1) * n, j * n:(j + 1) * n].T
    assert np.allclose(partial_transpose(M, (m, n)), expected)


def test_mc_examples():
    r = mc_ap_check(get("zeta3").spectrum, samples=10_000, seed=1)
    assert not r.violated and r.min_over_samples >= -1e-9
    r = mc_ap_check(get("remark_counterexample").spectrum, samples=10_000, seed=1)
    assert r.violated
    r = mc_ap_check(make_spectrum([0.7, 0.1, 0.1, 0.1], (2, 2)), samples=10_000, seed=1)
    assert r.violated and r.sampled_min < -1e-9


def test_mc_is_independent_of_batching():
    s = sp([5, 3, 2, 1], (2, 2))
    a = mc_ap_check(s, samples=500, seed=9, refine=False, batch=64)
    b = mc_ap_check(s, samples=500, seed=9, refine=False, batch=500)
    assert a.sampled_min == b.sampled_min


def test_mc_soundness_on_random_members(rng):
    for dims in (SystemDims(2, 2), SystemDims(2, 3), SystemDims(3, 3)):
        count = 0
        while count < 8:
            s = make_spectrum(rng.dirichlet(np.full(dims.total, 2.0)), dims)
            if not check_membership(s).member:
                continue
            assert not mc_ap_check(s, samples=500, seed=count).violated
            count += 1


def test_uhlmann_examples():
    rho = np.array([0.4, 0.3, 0.2, 0.1])
    out = uhlmann_decompose(rho, rho)
    assert out == [((0, 1, 2, 3), 1.0)]
    out = dict(uhlmann_decompose([1.0, 0.0], [0.5, 0.5]))
    assert out == pytest.approx({(0, 1): 0.5, (1, 0): 0.5})
    sigma = np.array([3, 3, 1, 1, 1, 1]) / 10
    rho = np.array([3, 2, 2, 1, 1, 1]) / 10
    out = uhlmann_decompose(sigma, rho)
    recon = sum(w * sigma[list(p)] for p, w in out)
    assert np.abs(recon - rho).max() <= 1e-10
    with pytest.raises(NotMajorized):
        uhlmann_decompose(rho, sigma)


@settings(max_examples=80)
@given(st.integers(0, 10**6), st.integers(2, 9))
def test_uhlmann_reconstruction(seed, N):
    rng = np.random.default_rng(seed)
    sigma = sorted_dirichlet(rng, N, 0.5)
    P = sum(w * np.eye(N)[rng.permutation(N)] for w in rng.dirichlet(np.ones(3)))
    rho = np.sort(P @ sigma)[::-1]
    assert majorizes(sigma, rho)
    out = uhlmann_decompose(sigma, rho)
    weights = np.array([w for _, w in out])
    assert np.all(weights >= 0) and abs(weights.sum() - 1) <= 1e-12
    assert len(out) <= N
    recon = sum(w * sigma[list(p)] for p, w in out)
    assert np.abs(recon - rho).max() <= 1e-10


def test_witness_examples():
    assert nonextreme_witness_search(get("zeta1").spectrum, tries=10_000, seed=0) is None
    x = np.array([3, 2, 2, 1, 1, 1]) / 10
    found = nonextreme_witness_search(x, (2, 3), tries=2000, seed=0)
    assert found is not None
    _check_witness(x, SystemDims(2, 3), *found)


def test_witness_for_eight_distinct_boundary_point(rng):
    dims = SystemDims(3, 3)
    x = project_to_boundary(sorted_dirichlet(rng, 9), dims)
    found = nonextreme_witness_search(x, dims, tries=2000, seed=1)
    assert found is not None
    alpha, beta = found
    _check_witness(x, dims, alpha, beta)
    # the split direction is a solution of the judge system
    from abssep.extremality import build_judge_system
    js = build_judge_system(x)
    t = alpha - x
    coeffs = np.linalg.lstsq(js.indicator, t, rcond=None)[0]
    assert np.allclose(js.indicator @ coeffs, t, atol=1e-12)
    resid = js.constraint_matrix @ coeffs
    assert np.abs(resid).max() <= 1e-6 * np.abs(t).max()


def _check_witness(x, dims, alpha, beta):
    assert np.abs((alpha + beta) / 2 - x).max() <= 1e-12
    assert not np.allclose(alpha, beta)
    for w in (alpha, beta):
        assert np.all(np.diff(w) <= 0)
        assert check_membership(make_spectrum(w, dims)).member
