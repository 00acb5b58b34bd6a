import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doubleris.correlation import RisGeometry, build_bs_correlation, build_ris_correlation, BsCorrelationSpec
from doubleris.exceptions import DimensionMismatch, IndefiniteMatrix, NotHermitian
from doubleris.matrix_core import hermitian_psd_sqrt, is_hermitian, trace_product


def random_psd(n, seed, rank=None):
    g = np.random.default_rng(seed)
    rank = n if rank is None else rank
    X = g.standard_normal((n, rank)) + 1j * g.standard_normal((n, rank))
    return X @ X.conj().T


def test_sqrt_identity():
    np.testing.assert_allclose(hermitian_psd_sqrt(np.eye(4)), np.eye(4), atol=1e-15)


def test_sqrt_diagonal():
    np.testing.assert_allclose(hermitian_psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)


def test_sqrt_sinc_quarter_wavelength():
    R = build_ris_correlation(RisGeometry(2, 2, 0.025, 0.1, 0.025, 0.025))
    S = hermitian_psd_sqrt(R)
    assert np.linalg.norm(S @ S - R) / np.linalg.norm(R) <= 1e-8
    assert is_hermitian(S)


def test_sqrt_rank_deficient_sinc():
    # 12 x 12 surface at lambda/8 is numerically singular; Cholesky would fail
    R = build_ris_correlation(RisGeometry(12, 12, 0.0125, 0.1, 0.025, 0.025))
    with pytest.raises(np.linalg.LinAlgError):
        np.linalg.cholesky(R)
    S = hermitian_psd_sqrt(R)
    assert np.linalg.norm(S @ S - R) / np.linalg.norm(R) <= 1e-8


def test_sqrt_complex_hermitian():
    R = random_psd(6, 3, rank=3)
    S = hermitian_psd_sqrt(R)
    assert np.linalg.norm(S @ S - R) / np.linalg.norm(R) <= 1e-8
    np.testing.assert_allclose(S, S.conj().T, atol=1e-12)


def test_sqrt_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_psd_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotHermitian):
        hermitian_psd_sqrt(np.ones((2, 3)))


def test_sqrt_rejects_indefinite():
    with pytest.raises(IndefiniteMatrix):
        hermitian_psd_sqrt(np.diag([1.0, -0.5]))


def test_sqrt_clamps_tiny_negative_eigenvalues():
    R = np.diag([1.0, -1e-13])
    S = hermitian_psd_sqrt(R)
    np.testing.assert_allclose(S, np.diag([1.0, 0.0]), atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**31 - 1), rank=st.integers(1, 8))
def test_sqrt_commutes_with_input(n, seed, rank):
    R = random_psd(n, seed, rank=min(rank, n))
    S = hermitian_psd_sqrt(R)
    assert np.linalg.norm(S @ R - R @ S) <= 1e-7 * np.linalg.norm(R)
    assert np.linalg.norm(S @ S - R) <= 1e-8 * np.linalg.norm(R) * n


def test_trace_identity():
    assert trace_product(np.eye(3), np.eye(3)) == 3


def test_trace_cyclic(rng):
    A = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    B = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    np.testing.assert_allclose(trace_product(A, B), trace_product(B, A), rtol=1e-12)
    np.testing.assert_allclose(trace_product(A, B), np.trace(A @ B), rtol=1e-12)


def test_trace_of_bs_correlation_squared():
    R = build_bs_correlation(BsCorrelationSpec(2, 0.5))
    # direct double sum of |R_ij|^2 = 1 + 0.25 + 0.25 + 1
    oracle = sum(abs(R[i, j]) ** 2 for i in range(2) for j in range(2))
    assert oracle == pytest.approx(2.5)
    assert trace_product(R, R) == pytest.approx(2.5, abs=1e-15)


def test_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        trace_product(np.ones((2, 3)), np.ones((2, 3)))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**31 - 1))
def test_trace_of_hermitian_square_is_real_nonnegative(n, seed):
    R = random_psd(n, seed) - random_psd(n, seed + 1)
    t = trace_product(R, R)
    assert abs(np.imag(t)) <= 1e-10 * max(1.0, abs(t))
    assert np.real(t) >= 0
