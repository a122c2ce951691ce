"""Unit tests for the Jacobi eigensolver."""

import numpy as np
import pytest
from scipy import linalg

from eegres.errors import ConvergenceError
from eegres.infra.linalg import canonical_signs, jacobi_eigh


def random_symmetric(n: int, seed: int) -> np.ndarray:
    a = np.random.default_rng(seed).standard_normal((n, n))
    return a + a.T


class TestJacobiEigh:
    """Tests for jacobi_eigh()."""

    @pytest.mark.parametrize("n,seed", [(2, 0), (5, 1), (12, 2), (23, 3)])
    def test_matches_reference_eigenvalues(self, n, seed):
        """Test eigenvalues agree with LAPACK."""
        a = random_symmetric(n, seed)
        system = jacobi_eigh(a)
        expected = linalg.eigh(a, eigvals_only=True)
        np.testing.assert_allclose(system.values, expected, atol=1e-9)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_laplacians(self, seed):
        """Test Laplacians of dense [0, 1] graphs reach the default tolerance."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 24))
        a = rng.random((n, n))
        a = 0.5 * (a + a.T)
        np.fill_diagonal(a, 0.0)
        lap = np.diag(a.sum(axis=1)) - a

        system = jacobi_eigh(lap)

        expected = linalg.eigh(lap, eigvals_only=True)
        np.testing.assert_allclose(system.values, expected, atol=1e-9)
        v = system.vectors
        np.testing.assert_allclose(lap @ v, v * system.values, atol=1e-8)

    def test_eigenpairs_and_orthonormality(self):
        """Test A v = lambda v and V^T V = I."""
        a = random_symmetric(10, 4)
        system = jacobi_eigh(a)
        v = system.vectors
        np.testing.assert_allclose(a @ v, v * system.values, atol=1e-8)
        np.testing.assert_allclose(v.T @ v, np.eye(10), atol=1e-8)

    def test_ascending_order(self):
        """Test eigenvalues come back sorted ascending."""
        values = jacobi_eigh(random_symmetric(8, 5)).values
        assert (np.diff(values) >= 0).all()

    def test_canonical_signs(self):
        """Test the largest-magnitude entry of every eigenvector is positive."""
        vectors = jacobi_eigh(random_symmetric(9, 6)).vectors
        pivots = np.argmax(np.abs(vectors), axis=0)
        assert (vectors[pivots, np.arange(9)] > 0).all()

    def test_sign_tie_goes_to_lowest_index(self):
        """Test equal magnitudes keep the first entry positive."""
        flipped = canonical_signs(np.array([[-0.5], [0.5]]))
        np.testing.assert_array_equal(flipped, [[0.5], [-0.5]])

    def test_diagonal_needs_no_sweeps(self):
        """Test a diagonal matrix is already converged."""
        system = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
        assert system.sweeps == 0
        np.testing.assert_array_equal(system.values, [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(system.vectors, np.eye(3)[:, [1, 2, 0]])

    def test_two_by_two_laplacian(self):
        """Test [[1, -1], [-1, 1]] has eigenvalues 0 and 2."""
        system = jacobi_eigh(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        np.testing.assert_allclose(system.values, [0.0, 2.0], atol=1e-12)
        np.testing.assert_allclose(system.vectors[:, 0], [2**-0.5, 2**-0.5])

    def test_zero_matrix(self):
        """Test the zero matrix gives zero eigenvalues."""
        system = jacobi_eigh(np.zeros((4, 4)))
        assert not system.values.any()

    def test_deterministic(self):
        """Test repeated calls give bit-identical results."""
        a = random_symmetric(7, 7)
        first, second = jacobi_eigh(a), jacobi_eigh(a)
        np.testing.assert_array_equal(first.values, second.values)
        np.testing.assert_array_equal(first.vectors, second.vectors)

    def test_sweep_cap(self):
        """Test exhausting the sweep cap raises ConvergenceError."""
        with pytest.raises(ConvergenceError, match="did not converge"):
            jacobi_eigh(random_symmetric(12, 8), max_sweeps=1)

    def test_rejects_non_square(self):
        """Test a non-square input raises ValueError."""
        with pytest.raises(ValueError):
            jacobi_eigh(np.zeros((2, 3)))
