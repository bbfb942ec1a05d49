import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_hermitian(n, rng, complex_entries=True):
    X = rng.uniform(-1.0, 1.0, (n, n))
    if complex_entries:
        X = X + 1j * rng.uniform(-1.0, 1.0, (n, n))
    return 0.5 * (X + X.conj().T)


def eig2_sym(a, b, c):
    """Closed-form eigendecomposition of [[a, b], [b, c]] (real symmetric).

    Returns (w, V) with w ascending and V columns the eigenvectors.
    """
    tr = a + c
    disc = np.sqrt((a - c) ** 2 + 4.0 * b * b)
    w = np.array([(tr - disc) / 2.0, (tr + disc) / 2.0])
    vecs = []
    for lam in w:
        if abs(b) > 1e-300:
            v = np.array([b, lam - a])
        else:
            v = np.array([1.0, 0.0]) if abs(lam - a) < abs(lam - c) else np.array([0.0, 1.0])
        vecs.append(v / np.linalg.norm(v))
    return w, np.column_stack(vecs)


def cholesky_by_hand(M):
    """Textbook Cholesky recurrence, kept independent of the package."""
    n = M.shape[0]
    L = np.zeros_like(np.asarray(M, dtype=complex))
    for j in range(n):
        s = M[j][j] - sum(abs(L[j, t]) ** 2 for t in range(j))
        L[j, j] = np.sqrt(s.real)
        for i in range(j + 1, n):
            acc = sum(L[i, t] * np.conj(L[j, t]) for t in range(j))
            L[i, j] = (M[i][j] - acc) / L[j, j]
    return L


def qpe_kernel(phi, t_bits):
    """Closed-form phase-estimation outcome distribution for one eigenphase."""
    M = 2 ** t_bits
    ys = np.arange(M)
    delta = phi - ys / M
    out = np.empty(M)
    for i, d in enumerate(delta):
        s = np.sin(np.pi * d)
        if abs(s) < 1e-15:
            out[i] = 1.0
        else:
            out[i] = (np.sin(np.pi * M * d) / (M * s)) ** 2
    return out
