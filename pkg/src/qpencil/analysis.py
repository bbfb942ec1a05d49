"""Classical oracle eigensolver and quantitative scaling scans.

The oracle solves the pencil problem through the Cholesky route followed by
a dense Jacobi diagonalization; the scans measure nonzero counts of the two
reductions, the growth of the splitting commutator with grid refinement,
and the first-order Trotter error against exact evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite
from .jacobi import eigh_jacobi
from .linalg import (
    BandedHermitian,
    BlockDiagonalPD,
    BlockLowerTriangular,
    count_nonzeros,
    predicted_nnz,
)
from .qpe import Statevector, _TrotterCycle
from .reduction import (
    ROUTE_CHOLESKY,
    recover_eigenvector,
    reduce_cholesky,
    reduce_sqrt,
)

_DENSE_NORM_CAP = 256
_POWER_ITERATIONS = 200
_POWER_RTOL = 1e-8
_EIGENVALUE_FLOOR_RTOL = 1e-14


@dataclass(frozen=True)
class ScanRecord:
    """One (parameter, observable) point of a scaling scan."""

    parameter: float
    observable: float
    label: str

    def __post_init__(self):
        if not np.isfinite(self.observable) or self.observable < 0.0:
            raise ValueError(
                f"observable must be finite and non-negative, got {self.observable}")


def random_banded_hermitian(size: int, half_bandwidth: int,
                            rng: np.random.Generator) -> BandedHermitian:
    """Hermitian matrix with dense-within-band entries drawn uniform on [-1, 1]."""
    bands = [rng.uniform(-1.0, 1.0, size)]
    for d in range(1, half_bandwidth + 1):
        bands.append(rng.uniform(-1.0, 1.0, size - d)
                     + 1j * rng.uniform(-1.0, 1.0, size - d))
    return BandedHermitian(size, half_bandwidth, tuple(bands))


def random_block_diagonal_pd(block_sizes, rng: np.random.Generator) -> BlockDiagonalPD:
    """Positive-definite blocks built as ``G G^H + 0.1 I`` for random ``G``."""
    blocks = []
    for s in block_sizes:
        G = rng.uniform(-1.0, 1.0, (s, s)) + 1j * rng.uniform(-1.0, 1.0, (s, s))
        blocks.append(G @ G.conj().T + 0.1 * np.eye(s))
    return BlockDiagonalPD(tuple(block_sizes), tuple(blocks))


def uniform_block_sizes(size: int, m: int) -> tuple:
    """Blocks of size ``m`` covering ``size`` rows, last block possibly smaller."""
    sizes = [m] * (size // m)
    if size % m:
        sizes.append(size % m)
    return tuple(sizes)


def random_generalized_pair(size: int, k: int, m: int, seed: int):
    """Seeded random pencil: banded Hermitian ``A`` and block-diagonal PD ``B``."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, size, k, m])))
    A = random_banded_hermitian(size, k, rng)
    B = random_block_diagonal_pd(uniform_block_sizes(size, m), rng)
    return A, B


def oracle_eigensolve(A: BandedHermitian, B: BlockDiagonalPD | None = None):
    """Classical reference solution of ``A v = lam B v``.

    Reduces through the Cholesky route, diagonalizes densely with Jacobi
    rotations, and maps eigenvectors back with unit weighted norm.

    Returns
    -------
    (w, V) with eigenvalues ``w`` ascending and ``V`` holding the matching
    eigenvectors as columns, normalized so that ``v^H B v = 1``.
    """
    if A.size > 4096:
        raise ValueError("oracle path is capped at dimension 4096")
    if B is None:
        B = BlockDiagonalPD.identity(A.size)
    reduced = reduce_cholesky(A, B)
    w, W = eigh_jacobi(reduced.hamiltonian.to_dense())
    V = np.empty_like(W)
    for j in range(W.shape[1]):
        V[:, j] = recover_eigenvector(W[:, j], reduced.transform_witness, ROUTE_CHOLESKY)
    return w, V


def _laplacian(size: int) -> BandedHermitian:
    """Dirichlet second-difference operator on ``size`` interior points of (0, 1)."""
    inv_dx2 = float((size + 1) ** 2)
    return BandedHermitian(
        size, 1, (np.full(size, 2.0 * inv_dx2), np.full(size - 1, -1.0 * inv_dx2)))


def _spectral_norm(M: np.ndarray, size: int) -> float:
    if size <= _DENSE_NORM_CAP:
        w, _ = eigh_jacobi(M, vectors=False)
        return float(np.abs(w).max(initial=0.0))
    rng = np.random.Generator(np.random.PCG64(2024))
    x = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(_POWER_ITERATIONS):
        y = M @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - est) <= _POWER_RTOL * new:
            return new
        est = new
    return est


def scan_commutator_norm(potential, sizes) -> list:
    """Spectral norm of the kinetic/potential splitting commutator versus size.

    The kinetic part is the Dirichlet second-difference operator on the unit
    interval; the potential is evaluated at the integer site index, so its
    per-cell increment stays fixed as the grid refines.  That is the regime
    in which the commutator tracks the kinetic norm's quadratic growth; a
    potential sampled at the physical coordinates of a fixed smooth profile
    varies by O(dx) per cell and would grow only linearly.
    """
    records = []
    for size in sizes:
        if size > 1024:
            raise ValueError("commutator scan is capped at size 1024")
        H1 = _laplacian(size)
        v = np.asarray(potential(np.arange(1, size + 1, dtype=float)), dtype=float)
        if v.shape != (size,):
            raise ValueError("potential must return one value per site")
        # [H1, diag(v)] has zero diagonal and entries H1[i, j] (v_j - v_i);
        # multiplying by 1j makes it Hermitian with the same spectral norm.
        hop = H1.diagonals[1]
        upper = hop * (v[1:] - v[:-1])
        C = np.zeros((size, size), dtype=np.complex128)
        idx = np.arange(size - 1)
        C[idx, idx + 1] = 1j * upper
        C[idx + 1, idx] = np.conjugate(1j * upper)
        records.append(ScanRecord(float(size), _spectral_norm(C, size),
                                  "commutator_norm"))
    return records


def _trial_states(n_qubits: int) -> list:
    dim = 2 ** n_qubits
    states = [Statevector.basis_state(n_qubits, i) for i in range(min(8, dim))]
    states.append(Statevector.uniform(n_qubits))
    return states


def scan_trotter_error(H1: BandedHermitian, H2: BandedHermitian, time: float,
                       steps_list) -> list:
    """Worst-case Trotter error over a fixed trial basis, per step count.

    The observable is ``max_psi || trotter(psi) - exact(psi) ||`` over the
    eight lowest computational basis states plus the uniform state, a
    reproducible surrogate for the operator-norm error.
    """
    H = H1.add(H2)
    n_qubits = int(np.log2(H.size))
    if 2 ** n_qubits != H.size:
        raise ValueError("Trotter scan needs a power-of-two dimension")
    w, V = eigh_jacobi(H.to_dense())
    trials = _trial_states(n_qubits)
    exact = [V @ (np.exp(-1j * w * time) * (V.conj().T @ t.amplitudes))
             for t in trials]
    records = []
    for steps in steps_list:
        cycle = _TrotterCycle(H1, H2, time / steps)
        worst = 0.0
        for trial, reference in zip(trials, exact):
            amps = trial.amplitudes.copy()
            for _ in range(steps):
                amps = cycle.apply(amps)
            worst = max(worst, float(np.linalg.norm(amps - reference)))
        records.append(ScanRecord(float(steps), worst, "trotter_error"))
    return records


def scan_sparsity(k: int, m: int, sizes, seed: int = 0) -> list:
    """Measured against predicted nonzero counts for both reduction routes.

    Each size gets its own seeded random pencil.  Records carry measured
    and predicted counts, relative deviations, and the Cholesky-to-sqrt
    count ratio.
    """
    records = []
    for size in sizes:
        if size % m:
            raise ValueError(f"size {size} is not divisible by block size {m}")
        pred_chol = predicted_nnz("cholesky", k, m, size)
        pred_sqrt = predicted_nnz("sqrt", k, m, size)
        A, B = random_generalized_pair(size, k, m, seed)
        nnz_chol = count_nonzeros(reduce_cholesky(A, B).hamiltonian)
        nnz_sqrt = count_nonzeros(reduce_sqrt(A, B).hamiltonian)
        n = float(size)
        records.extend([
            ScanRecord(n, float(nnz_chol), "measured_nnz_cholesky"),
            ScanRecord(n, float(pred_chol), "predicted_nnz_cholesky"),
            ScanRecord(n, abs(nnz_chol - pred_chol) / pred_chol, "rel_dev_cholesky"),
            ScanRecord(n, float(nnz_sqrt), "measured_nnz_sqrt"),
            ScanRecord(n, float(pred_sqrt), "predicted_nnz_sqrt"),
            ScanRecord(n, abs(nnz_sqrt - pred_sqrt) / pred_sqrt, "rel_dev_sqrt"),
            ScanRecord(n, nnz_chol / nnz_sqrt, "nnz_ratio"),
        ])
    return records


def fill_fraction(M, rel_tol: float = 1e-12) -> float:
    """Fraction of entries above the relative threshold, in [0, 1]."""
    if isinstance(M, (BandedHermitian, BlockDiagonalPD, BlockLowerTriangular)):
        size = M.size
    else:
        M = np.asarray(M)
        size = M.shape[0]
    if size > 1024:
        raise ValueError("fill fraction path is capped at dimension 1024")
    return count_nonzeros(M, rel_tol) / float(size * size)


def hermitian_inv_sqrt(M) -> np.ndarray:
    """Dense inverse square root of a positive-definite Hermitian matrix."""
    if isinstance(M, BandedHermitian):
        M = M.to_dense()
    elif isinstance(M, BlockDiagonalPD):
        M = M.to_dense()
    w, V = eigh_jacobi(np.asarray(M, dtype=np.complex128))
    floor = _EIGENVALUE_FLOOR_RTOL * float(w.max())
    if float(w.min()) <= max(floor, 0.0):
        raise NotPositiveDefinite(
            f"eigenvalue {w.min():.3e} at or below floor {floor:.3e}")
    out = (V / np.sqrt(w)) @ V.conj().T
    return 0.5 * (out + out.conj().T)
