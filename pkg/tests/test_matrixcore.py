import numpy as np
import pytest

from covnet import (DimensionError, NotPositiveDefinite, NumericError,
                    cholesky, empirical_covariance, invert_pd, sym_eigen)
from conftest import random_spd, random_symmetric
from oracles import covariance_triple_loop


class TestEmpiricalCovariance:
    def test_two_scalar_rows(self):
        cov = empirical_covariance(np.array([[1.0], [-1.0]]))
        assert cov.shape == (1, 1)
        assert cov[0, 0] == 1.0

    def test_identity_rows(self):
        cov = empirical_covariance(np.eye(2))
        np.testing.assert_array_equal(cov, np.array([[0.5, 0.0], [0.0, 0.5]]))

    def test_matches_triple_loop(self, rng):
        rows = rng.standard_normal((3, 2))
        cov = empirical_covariance(rows)
        np.testing.assert_allclose(cov, covariance_triple_loop(rows), atol=1e-14)

    def test_exactly_symmetric_and_psd(self, rng):
        rows = rng.standard_normal((7, 5))
        cov = empirical_covariance(rows)
        assert np.array_equal(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() >= -1e-10

    def test_empty_raises(self):
        with pytest.raises(DimensionError):
            empirical_covariance(np.zeros((0, 3)))

    def test_nonfinite_raises(self):
        with pytest.raises(NumericError):
            empirical_covariance(np.array([[1.0, np.nan]]))


class TestSymEigen:
    def test_identity(self):
        pair = sym_eigen(np.eye(2))
        np.testing.assert_allclose(pair.values, [1.0, 1.0])

    def test_diagonal(self):
        pair = sym_eigen(np.diag([2.0, 3.0]))
        np.testing.assert_allclose(pair.values, [2.0, 3.0])
        np.testing.assert_allclose(np.abs(pair.vectors), np.eye(2), atol=1e-14)

    def test_analytic_2x2(self):
        pair = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(pair.values, [1.0, 3.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(pair.vectors[:, 0], [s, -s], atol=1e-12)
        np.testing.assert_allclose(pair.vectors[:, 1], [s, s], atol=1e-12)

    def test_reconstruction(self, rng):
        for _ in range(20):
            a = random_symmetric(rng, 6, scale=3.0)
            pair = sym_eigen(a)
            recon = pair.vectors @ np.diag(pair.values) @ pair.vectors.T
            assert np.linalg.norm(recon - a) / np.linalg.norm(a) < 1e-8
            ortho = pair.vectors.T @ pair.vectors
            assert np.max(np.abs(ortho - np.eye(6))) < 1e-10

    def test_sign_convention_deterministic(self, rng):
        a = random_symmetric(rng, 5)
        first = sym_eigen(a).vectors
        again = sym_eigen(a.copy()).vectors
        np.testing.assert_array_equal(first, again)
        for j in range(5):
            col = first[:, j]
            lead = col[np.abs(col) > 1e-12][0]
            assert lead > 0

    def test_nonfinite_raises(self):
        with pytest.raises(NumericError):
            sym_eigen(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(2)), np.eye(2))

    def test_scalar(self):
        np.testing.assert_array_equal(cholesky(np.array([[4.0]])), [[2.0]])

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_reconstruction(self, rng):
        a = random_spd(rng, 6)
        lower = cholesky(a)
        err = np.linalg.norm(lower @ lower.T - a) / np.linalg.norm(a)
        assert err < 1e-10

    def test_tiny_pivot_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.diag([1.0, 1e-13]))

    def test_matches_eigenvalue_sign(self, rng):
        # PD iff all eigenvalues positive, across a mixed batch
        for k in range(100):
            p = 4
            if k % 2 == 0:
                a = random_spd(rng, p)
                assert np.linalg.eigvalsh(a).min() > 0
                cholesky(a)
            else:
                a = random_symmetric(rng, p, scale=2.0)
                a -= (np.linalg.eigvalsh(a).min() + 0.5) * np.eye(p)
                assert np.linalg.eigvalsh(a).min() < 0
                with pytest.raises(NotPositiveDefinite):
                    cholesky(a)


class TestInvertPd:
    def test_diagonal(self):
        np.testing.assert_allclose(invert_pd(np.diag([2.0, 4.0])),
                                   np.diag([0.5, 0.25]))

    def test_identity(self):
        np.testing.assert_allclose(invert_pd(np.eye(3)), np.eye(3))

    def test_residual(self, rng):
        a = random_spd(rng, 4)
        inv = invert_pd(a)
        assert np.max(np.abs(a @ inv - np.eye(4))) < 1e-8
        assert np.array_equal(inv, inv.T)

    def test_not_pd_raises(self):
        with pytest.raises(NotPositiveDefinite):
            invert_pd(np.array([[0.0, 1.0], [1.0, 0.0]]))
