import numpy as np
import pytest

from qpencil.errors import ConvergenceFailure
from qpencil.jacobi import eigh_jacobi

from conftest import random_hermitian


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 16, 33])
def test_matches_direct_diagonalization(n, rng):
    A = random_hermitian(n, rng)
    w, V = eigh_jacobi(A)
    w_ref = np.linalg.eigvalsh(A)
    assert np.abs(w - w_ref).max() <= 1e-12 * max(np.abs(w_ref).max(), 1.0)


@pytest.mark.parametrize("n", [2, 5, 12])
def test_eigenvectors_reconstruct(n, rng):
    A = random_hermitian(n, rng)
    w, V = eigh_jacobi(A)
    assert np.abs(V.conj().T @ V - np.eye(n)).max() < 1e-12
    assert np.abs((V * w) @ V.conj().T - A).max() < 1e-12 * np.abs(A).max()


def test_real_symmetric_input(rng):
    A = random_hermitian(9, rng, complex_entries=False)
    w, _ = eigh_jacobi(A)
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-12)


def test_eigenvalues_sorted_ascending(rng):
    w, _ = eigh_jacobi(random_hermitian(14, rng))
    assert (np.diff(w) >= 0).all()


def test_values_only_skips_vectors(rng):
    A = random_hermitian(6, rng)
    w, V = eigh_jacobi(A, vectors=False)
    assert V is None
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-12)


def test_zero_and_diagonal_matrices():
    w, V = eigh_jacobi(np.zeros((4, 4)))
    assert np.all(w == 0.0)
    w, _ = eigh_jacobi(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(w, [-1.0, 2.0, 3.0])


def test_sweep_cap_raises(rng):
    A = random_hermitian(8, rng)
    with pytest.raises(ConvergenceFailure):
        eigh_jacobi(A, max_sweeps=0)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        eigh_jacobi(np.zeros((3, 2)))
