import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindyn import linalg
from lindyn.errors import (IndefiniteInput, NonFinite, NonSymmetric,
                           ZeroMatrix)


class TestPsdSqrt:
    def test_diagonal(self):
        assert np.allclose(linalg.psd_sqrt(np.diag([4.0, 9.0])),
                           np.diag([2.0, 3.0]), atol=1e-14)

    def test_identity(self):
        assert np.allclose(linalg.psd_sqrt(np.eye(7)), np.eye(7), atol=1e-14)

    def test_hand_eigendecomposition(self):
        # eigenvalues 3 and 1 on the (1,1)/(1,-1) frame
        s3 = np.sqrt(3.0)
        expected = 0.5 * np.array([[s3 + 1, s3 - 1], [s3 - 1, s3 + 1]])
        root = linalg.psd_sqrt([[2.0, 1.0], [1.0, 2.0]])
        assert np.allclose(root, expected, atol=1e-12)
        assert np.allclose(root @ root, [[2.0, 1.0], [1.0, 2.0]], atol=1e-12)

    def test_square_contract(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 17):
            X = rng.standard_normal((n, n))
            M = X @ X.T
            R = linalg.psd_sqrt(M)
            assert np.allclose(R, R.T)
            assert np.linalg.norm(R @ R - M) <= 1e-8 * max(1.0, np.linalg.norm(M))

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetric):
            linalg.psd_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(IndefiniteInput):
            linalg.psd_sqrt(np.diag([1.0, -1e-3]))

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFinite):
            linalg.psd_sqrt(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_clamps_tiny_negative(self):
        M = np.diag([1.0, -5e-11])      # inside the roundoff clamp band
        R = linalg.psd_sqrt(M)
        assert R[1, 1] == 0.0

    @given(st.floats(min_value=0.0, max_value=1e8))
    @settings(max_examples=30, deadline=None)
    def test_scaled_identity(self, c):
        assert np.allclose(linalg.psd_sqrt(c * c * np.eye(3)), c * np.eye(3),
                           atol=1e-10 * max(c, 1.0))

    @given(st.lists(st.floats(min_value=0.0, max_value=1e3), min_size=1, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_diagonal_squares_exact(self, diag):
        D = np.asarray(diag)
        R = linalg.psd_sqrt(np.diag(D * D))
        assert np.max(np.abs(R - np.diag(D))) <= 1e-10 * max(1.0, D.max())


class TestSvdDesc:
    def test_diagonal_reorder(self):
        U, S, V = linalg.svd_desc(np.diag([1.0, 3.0]))
        assert np.allclose(S, [3.0, 1.0])
        assert np.allclose(U @ np.diag(S) @ V.T, np.diag([1.0, 3.0]), atol=1e-12)

    def test_zero_matrix(self):
        U, S, V = linalg.svd_desc(np.zeros((4, 4)))
        assert np.allclose(S, 0.0)
        assert np.allclose(U, np.eye(4))
        assert np.allclose(V, np.eye(4))

    def test_sign_invariance_of_values(self):
        A = np.random.default_rng(11).standard_normal((5, 5))
        assert np.allclose(linalg.svd_desc(A).S, linalg.svd_desc(-A).S, rtol=1e-13)

    def test_sign_convention_deterministic(self):
        A = np.random.default_rng(5).standard_normal((6, 6))
        U1, _, V1 = linalg.svd_desc(A)
        U2, _, V2 = linalg.svd_desc(A.copy())
        assert np.array_equal(U1, U2) and np.array_equal(V1, V2)
        # largest-|entry| element of each left vector is positive
        for j in range(6):
            k = np.argmax(np.abs(U1[:, j]))
            assert U1[k, j] > 0

    @pytest.mark.parametrize("n,m", [(3, 3), (8, 8), (50, 50), (20, 35), (35, 20)])
    def test_reconstruction_orthogonality(self, n, m):
        rng = np.random.default_rng(n * 100 + m)
        for _ in range(20):
            A = rng.standard_normal((n, m))
            U, S, V = linalg.svd_desc(A)
            k = min(n, m)
            assert np.all(np.diff(S) <= 1e-12)
            assert np.linalg.norm((U[:, :k] * S) @ V[:, :k].T - A) \
                <= 1e-9 * max(1.0, np.linalg.norm(A))
            assert np.max(np.abs(U.T @ U - np.eye(n))) <= 1e-9
            assert np.max(np.abs(V.T @ V - np.eye(m))) <= 1e-9

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFinite):
            linalg.svd_desc(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestStableRank:
    def test_rank_one(self):
        rng = np.random.default_rng(0)
        A = np.outer(rng.standard_normal(9), rng.standard_normal(9))
        assert abs(linalg.stable_rank(A) - 1.0) <= 1e-10

    def test_identity(self):
        assert abs(linalg.stable_rank(np.eye(12)) - 12.0) <= 1e-10

    def test_diag_211(self):
        assert linalg.stable_rank(np.diag([2.0, 1.0, 1.0])) == pytest.approx(1.5)

    def test_zero_rejected(self):
        with pytest.raises(ZeroMatrix):
            linalg.stable_rank(np.zeros((2, 2)))

    def test_range(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            A = rng.standard_normal((7, 13))
            sr = linalg.stable_rank(A)
            assert 1.0 - 1e-12 <= sr <= 7.0 + 1e-12

    @given(st.floats(min_value=-1e6, max_value=1e6).filter(lambda c: abs(c) > 1e-9))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, c):
        A = np.random.default_rng(8).standard_normal((6, 6))
        assert linalg.stable_rank(c * A) == pytest.approx(linalg.stable_rank(A),
                                                          rel=1e-8)


def test_sqrt_gram_shifted_matches_psd_sqrt():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((8, 8))
    shift = 0.7
    left, right = linalg.sqrt_gram_shifted(A, shift)
    assert np.allclose(left, linalg.psd_sqrt(A @ A.T + shift ** 2 * np.eye(8)),
                       atol=1e-10)
    assert np.allclose(right, linalg.psd_sqrt(A.T @ A + shift ** 2 * np.eye(8)),
                       atol=1e-10)
