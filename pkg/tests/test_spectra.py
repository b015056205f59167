import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abssep.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NegativeEigenvalue,
    NotNormalized,
    SumMismatch,
    WrongDims,
)
from abssep.oracle import haar_unitary
from abssep.spectra import (
    SystemDims,
    Tolerance,
    compress_2n,
    compress_3n,
    distinct_count,
    equality_groups,
    make_spectrum,
    majorizes,
    purity_in_maximal_ball,
    subspectrum,
)

from strategies import spectra, weights


def test_dims_basics():
    d = SystemDims(2, 3)
    assert d.total == 6 and d.small == 2 and d.large == 3
    assert SystemDims.parse("3x4") == SystemDims(3, 4)
    assert str(SystemDims(3, 4)) == "3x4"
    with pytest.raises(WrongDims):
        SystemDims(1, 4)
    with pytest.raises(WrongDims):
        SystemDims.parse("3 by 3")


def test_tolerance_rejects_nonpositive():
    with pytest.raises(ValueError):
        Tolerance(eq_eps=0.0)
    with pytest.raises(ValueError):
        Tolerance(rank_eps=float("nan"))


def test_make_spectrum_examples():
    s = make_spectrum([0.1, 0.5, 0.2, 0.2], (2, 2))
    assert np.allclose(s.values, [0.5, 0.2, 0.2, 0.1]) and s.normalized
    s = make_spectrum(np.full(4, 0.25), (2, 2))
    assert np.allclose(s.values, 0.25) and s.normalized
    raw = np.array([15, 14, 9, 9, 9, 9, 9, 9, 1]) / 84
    s = make_spectrum(raw, (3, 3))
    assert np.allclose(s.values, raw) and s.normalized


def test_make_spectrum_errors_and_clamping():
    with pytest.raises(DimensionMismatch):
        make_spectrum([1, 0, 0], (2, 2))
    with pytest.raises(NegativeEigenvalue):
        make_spectrum([0.6, 0.3, 0.2, -0.1], (2, 2))
    s = make_spectrum([0.5, 0.5, 1e-12, -1e-12], (2, 2))
    assert s.values.min() == 0.0
    assert not make_spectrum([3, 1, 1, 1], (2, 2)).normalized
    assert not s.values.flags.writeable


def test_majorizes_examples():
    assert majorizes([0.5, 0.5, 0, 0], [0.25] * 4)
    x = [0.4, 0.3, 0.2, 0.1]
    assert majorizes(x, x)
    assert majorizes(np.array([3, 3, 1, 1, 1, 1]) / 10, np.array([3, 2, 2, 1, 1, 1]) / 10)
    assert not majorizes([0.25] * 4, [0.5, 0.5, 0, 0])
    with pytest.raises(SumMismatch):
        majorizes([0.5, 0.5], [0.5, 0.4])


def test_purity_examples():
    ok, margin = purity_in_maximal_ball(make_spectrum([1 / 3, 1 / 3, 1 / 3, 0], (2, 2)))
    assert ok and abs(margin) < 1e-15
    ok, margin = purity_in_maximal_ball(make_spectrum([1 / 2, 1 / 6, 1 / 6, 1 / 6], (2, 2)))
    assert ok and abs(margin) < 1e-15
    ok, _ = purity_in_maximal_ball(make_spectrum([1, 0, 0, 0], (2, 2)))
    assert not ok
    with pytest.raises(NotNormalized):
        purity_in_maximal_ball(make_spectrum([3, 1, 1, 1], (2, 2)))


def test_subspectrum_examples():
    s = make_spectrum(np.array([15, 14, 9, 9, 9, 9, 9, 9, 1]) / 84, (3, 3))
    sub = subspectrum(s, [0, 1, 7, 8], (2, 2))  # 0-based indices
    assert np.allclose(sub.values, np.array([15, 14, 9, 1]) / 84) and not sub.normalized
    whole = subspectrum(s, range(9), (3, 3))
    assert np.allclose(whole.values, s.values)
    s = make_spectrum([0.5, 0.2, 0.2, 0.1, 0, 0], (2, 3))
    assert np.allclose(subspectrum(s, [0, 1, 4, 5], (2, 2)).values, [0.5, 0.2, 0, 0])
    with pytest.raises(IndexOutOfRange):
        subspectrum(s, [0, 1, 2, 9], (2, 2))
    with pytest.raises(DimensionMismatch):
        subspectrum(s, [0, 1, 2], (2, 2))


def test_compress_examples():
    s = make_spectrum([0.3, 0.3, 0.1, 0.1, 0.1, 0.1], (2, 3))
    assert np.allclose(compress_2n(s), [0.3, 0.1, 0.1, 0.1])
    s = make_spectrum(np.array([3, 2, 2, 1, 1, 1]) / 10, (2, 3))
    assert np.allclose(compress_2n(s), np.array([3, 1, 1, 1]) / 10)
    s = make_spectrum([0.4, 0.3, 0.2, 0.1], (2, 2))
    assert np.allclose(compress_2n(s), s.values)
    s = make_spectrum(np.arange(12, 0, -1) / 78, (3, 4))
    assert np.allclose(compress_3n(s), s.values[[0, 1, 2, 6, 7, 8, 9, 10, 11]])
    s = make_spectrum([5, 4] + [1] * 10, (3, 4))
    assert np.allclose(compress_3n(s), [5, 4] + [1] * 7)
    with pytest.raises(WrongDims):
        compress_3n(make_spectrum([0.25] * 4, (2, 2)))
    with pytest.raises(WrongDims):
        compress_2n(make_spectrum(np.full(9, 1 / 9), (3, 3)))


def test_equality_groups_and_distinct():
    v = [0.3, 0.3, 0.2, 0.1, 0.1]
    assert equality_groups(v, 1e-9) == [[0, 1], [2], [3, 4]]
    assert distinct_count(v) == 3


@given(spectra())
def test_sorting_idempotent(s):
    again = make_spectrum(s.values, s.dims)
    assert np.array_equal(again.values, s.values)
    assert np.all(np.diff(s.values) <= 0)


@given(spectra(), st.integers(0, 10**6))
def test_majorization_partial_order(s, seed):
    rng = np.random.default_rng(seed)
    x = s.values
    assert majorizes(x, x)
    # a doubly stochastic image is majorized; composing two gives transitivity
    y = _ds_image(x, rng)
    z = _ds_image(y, rng)
    assert majorizes(x, y) and majorizes(y, z) and majorizes(x, z)
    if majorizes(y, x):
        assert np.allclose(np.sort(y)[::-1], x, atol=1e-8)


def _ds_image(x, rng):
    N = x.size
    P = sum(w * np.eye(N)[rng.permutation(N)] for w in rng.dirichlet(np.ones(3)))
    return P @ x


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 6, 9]))
def test_schur_diagonal_majorized(seed, d):
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(d))
    U = haar_unitary(d, rng)
    H = (U * lam) @ U.conj().T
    assert majorizes(np.linalg.eigvalsh(H), np.real(np.diag(H)), Tolerance(eq_eps=1e-9))


@given(weights(6), weights(6))
def test_sorted_sum_majorized_by_sum(x, y):
    x, y = np.array(x), np.array(y)
    ordered = np.sort(x)[::-1] + np.sort(y)
    assert majorizes(x + y, ordered, Tolerance(norm_eps=1e-9))


@given(spectra(), st.floats(0.1, 50.0))
def test_compress_order_and_scale(s, c):
    if s.dims.small == 2:
        f = compress_2n
    else:
        f = compress_3n
    out = f(s)
    assert np.all(np.diff(out) <= 0)
    scaled = make_spectrum(c * s.values, s.dims)
    assert np.allclose(f(scaled), c * out, rtol=1e-12, atol=0)


def test_maximal_ball_margin_formula():
    s = make_spectrum(np.full(6, 1 / 6), (2, 3))
    ok, margin = purity_in_maximal_ball(s)
    assert ok and math.isclose(margin, 1 / 5 - 1 / 6)
