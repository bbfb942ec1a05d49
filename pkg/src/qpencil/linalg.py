"""Banded Hermitian and positive-definite block-diagonal matrix storage.

Matrices are stored compactly: a Hermitian band matrix keeps only its
diagonal and upper bands (the lower triangle is implied by conjugate
symmetry), and a block-diagonal matrix keeps only its dense blocks.  Full
matrices are materialized only on small oracle paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, RegimeViolation
from .jacobi import eigh_jacobi

#: Relative threshold below which an entry counts as a structural zero.
NNZ_RTOL = 1e-12

_HERMITIAN_RTOL = 1e-13
_PIVOT_RTOL = 1e-14


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BandedHermitian:
    """Hermitian matrix stored by its diagonal and upper bands.

    ``diagonals[d][i]`` holds entry ``(i, i + d)`` for offsets ``d = 0..k``;
    entries below the diagonal are mirrored by conjugation on read and
    entries beyond offset ``k`` are structurally zero.  The main diagonal is
    kept exactly real.  Values are immutable after construction.
    """

    size: int
    half_bandwidth: int
    diagonals: tuple

    def __post_init__(self):
        n, k = self.size, self.half_bandwidth
        if n < 1:
            raise ValueError(f"size must be positive, got {n}")
        if not 0 <= k <= n - 1:
            raise ValueError(f"half_bandwidth {k} out of range for size {n}")
        if len(self.diagonals) != k + 1:
            raise ValueError(
                f"expected {k + 1} stored bands, got {len(self.diagonals)}")
        bands = []
        for d, band in enumerate(self.diagonals):
            band = np.asarray(band, dtype=np.complex128)
            if band.shape != (n - d,):
                raise ValueError(f"band {d} must have length {n - d}")
            bands.append(band)
        scale = max((float(np.abs(b).max()) if b.size else 0.0) for b in bands)
        diag = bands[0]
        if float(np.abs(diag.imag).max(initial=0.0)) > _HERMITIAN_RTOL * max(scale, 1e-300):
            raise ValueError("diagonal of a Hermitian matrix must be real")
        bands[0] = diag.real.astype(np.complex128)
        object.__setattr__(self, "diagonals", tuple(_frozen(b) for b in bands))

    @classmethod
    def from_dense(cls, dense, half_bandwidth: int | None = None,
                   tol: float = NNZ_RTOL) -> "BandedHermitian":
        """Compress a dense Hermitian matrix into band storage.

        With ``half_bandwidth=None`` the smallest bandwidth covering every
        entry above ``tol`` (relative to the largest magnitude) is used;
        otherwise entries outside the requested band must be negligible.
        """
        M = np.asarray(dense, dtype=np.complex128)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {M.shape}")
        n = M.shape[0]
        scale = float(np.abs(M).max(initial=0.0))
        if float(np.abs(M - M.conj().T).max(initial=0.0)) > _HERMITIAN_RTOL * max(scale, 1e-300):
            raise ValueError("matrix is not Hermitian within tolerance")
        thr = tol * scale
        if half_bandwidth is None:
            k = 0
            for d in range(n - 1, 0, -1):
                if np.abs(np.diagonal(M, d)).max(initial=0.0) > thr:
                    k = d
                    break
        else:
            k = half_bandwidth
            for d in range(k + 1, n):
                if np.abs(np.diagonal(M, d)).max(initial=0.0) > thr:
                    raise ValueError(
                        f"entries found outside requested half-bandwidth {k}")
        return cls(n, k, tuple(np.diagonal(M, d).copy() for d in range(k + 1)))

    def to_dense(self) -> np.ndarray:
        n = self.size
        M = np.zeros((n, n), dtype=np.complex128)
        for d, band in enumerate(self.diagonals):
            idx = np.arange(n - d)
            M[idx, idx + d] = band
            if d > 0:
                M[idx + d, idx] = np.conjugate(band)
        return M

    def dense_block(self, r0: int, r1: int, c0: int, c1: int) -> np.ndarray:
        """Dense copy of the sub-block ``M[r0:r1, c0:c1]``."""
        out = np.zeros((r1 - r0, c1 - c0), dtype=np.complex128)
        for d, band in enumerate(self.diagonals):
            # upper part: entries (i, i + d)
            lo = max(r0, c0 - d)
            hi = min(r1, c1 - d)
            if hi > lo:
                rows = np.arange(lo, hi)
                out[rows - r0, rows + d - c0] = band[lo:hi]
            if d == 0:
                continue
            # mirrored part: entries (i, i - d)
            lo = max(r0, c0 + d)
            hi = min(r1, c1 + d)
            if hi > lo:
                rows = np.arange(lo, hi)
                out[rows - r0, rows - d - c0] = np.conjugate(band[lo - d:hi - d])
        return out

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.size,):
            raise DimensionMismatch(
                f"vector of length {x.shape} against matrix of size {self.size}")
        y = self.diagonals[0] * x
        for d in range(1, self.half_bandwidth + 1):
            band = self.diagonals[d]
            y[:self.size - d] += band * x[d:]
            y[d:] += np.conjugate(band) * x[:self.size - d]
        return y

    def max_abs(self) -> float:
        return max(float(np.abs(b).max(initial=0.0)) for b in self.diagonals)

    def add(self, other: "BandedHermitian") -> "BandedHermitian":
        if self.size != other.size:
            raise DimensionMismatch(
                f"sizes {self.size} and {other.size} differ")
        k = max(self.half_bandwidth, other.half_bandwidth)
        bands = []
        for d in range(k + 1):
            band = np.zeros(self.size - d, dtype=np.complex128)
            if d <= self.half_bandwidth:
                band += self.diagonals[d]
            if d <= other.half_bandwidth:
                band += other.diagonals[d]
            bands.append(band)
        return BandedHermitian(self.size, k, tuple(bands))

    def affine(self, scale: float, shift: float = 0.0) -> "BandedHermitian":
        """Return ``scale * (M - shift * I)`` in band storage."""
        bands = [scale * (self.diagonals[0].real - shift)]
        bands += [scale * b for b in self.diagonals[1:]]
        return BandedHermitian(self.size, self.half_bandwidth, tuple(bands))

    def drop_small(self, rel_tol: float = NNZ_RTOL) -> "BandedHermitian":
        """Zero stored entries at or below ``rel_tol`` times the largest magnitude."""
        thr = rel_tol * self.max_abs()
        bands = tuple(np.where(np.abs(b) > thr, b, 0.0) for b in self.diagonals)
        return BandedHermitian(self.size, self.half_bandwidth, bands)


@dataclass(frozen=True)
class BlockDiagonalPD:
    """Positive-definite Hermitian block-diagonal matrix.

    Positive definiteness is validated eagerly at construction through a
    Cholesky witness on every block, and each block must be Hermitian to
    within a 1e-13 relative tolerance.
    """

    block_sizes: tuple
    blocks: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        if len(self.blocks) != len(sizes):
            raise ValueError("one dense block required per block size")
        blocks = []
        for s, raw in zip(sizes, self.blocks):
            blk = np.asarray(raw, dtype=np.complex128)
            if blk.shape != (s, s):
                raise ValueError(f"block of size {s} has shape {blk.shape}")
            scale = max(float(np.abs(blk).max(initial=0.0)), 1e-300)
            if float(np.abs(blk - blk.conj().T).max(initial=0.0)) > _HERMITIAN_RTOL * scale:
                raise ValueError("blocks must be Hermitian within tolerance")
            _cholesky_dense(blk)  # positive-definiteness witness
            blocks.append(_frozen(blk))
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "blocks", tuple(blocks))

    @classmethod
    def from_diagonal(cls, values) -> "BlockDiagonalPD":
        vals = np.asarray(values, dtype=np.complex128)
        return cls(tuple([1] * vals.size), tuple(vals.reshape(-1, 1, 1)))

    @classmethod
    def identity(cls, n: int) -> "BlockDiagonalPD":
        return cls.from_diagonal(np.ones(n))

    @property
    def size(self) -> int:
        return sum(self.block_sizes)

    @property
    def block_starts(self) -> tuple:
        starts, acc = [], 0
        for s in self.block_sizes:
            starts.append(acc)
            acc += s
        return tuple(starts)

    def to_dense(self) -> np.ndarray:
        n = self.size
        M = np.zeros((n, n), dtype=np.complex128)
        for start, s, blk in zip(self.block_starts, self.block_sizes, self.blocks):
            M[start:start + s, start:start + s] = blk
        return M

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.size,):
            raise DimensionMismatch(
                f"vector of length {x.shape} against matrix of size {self.size}")
        y = np.empty(self.size, dtype=np.complex128)
        for start, s, blk in zip(self.block_starts, self.block_sizes, self.blocks):
            y[start:start + s] = blk @ x[start:start + s]
        return y


@dataclass(frozen=True)
class BlockLowerTriangular:
    """Block-diagonal lower-triangular factor with real positive diagonal."""

    block_sizes: tuple
    blocks: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        blocks = []
        for s, raw in zip(sizes, self.blocks):
            blk = np.asarray(raw, dtype=np.complex128)
            if blk.shape != (s, s):
                raise ValueError(f"block of size {s} has shape {blk.shape}")
            if np.abs(np.triu(blk, 1)).max(initial=0.0) != 0.0:
                raise ValueError("blocks must be lower triangular")
            d = np.diag(blk)
            if np.abs(d.imag).max(initial=0.0) != 0.0 or (d.real <= 0.0).any():
                raise ValueError("triangular diagonal must be real positive")
            blocks.append(_frozen(blk))
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def size(self) -> int:
        return sum(self.block_sizes)

    @property
    def block_starts(self) -> tuple:
        starts, acc = [], 0
        for s in self.block_sizes:
            starts.append(acc)
            acc += s
        return tuple(starts)

    def to_dense(self) -> np.ndarray:
        n = self.size
        M = np.zeros((n, n), dtype=np.complex128)
        for start, s, blk in zip(self.block_starts, self.block_sizes, self.blocks):
            M[start:start + s, start:start + s] = blk
        return M


@dataclass(frozen=True)
class SparsityReport:
    """Measured versus predicted nonzero count for one matrix."""

    measured_nnz: int
    predicted_nnz: int
    matrix_label: str
    tolerance: float

    def __post_init__(self):
        if self.measured_nnz < 0:
            raise ValueError("measured_nnz must be non-negative")


def _cholesky_dense(block: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a dense Hermitian block.

    Raises :class:`NotPositiveDefinite` when a pivot is non-positive or
    falls below 1e-14 times the largest diagonal entry.
    """
    n = block.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    floor = _PIVOT_RTOL * float(np.diag(block).real.max(initial=0.0))
    for j in range(n):
        pivot = block[j, j].real
        if j:
            pivot -= float((np.abs(L[j, :j]) ** 2).sum())
        if pivot <= 0.0 or pivot <= floor:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at position {j} (floor {floor:.3e})")
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (block[j + 1:, j] - L[j + 1:, :j] @ np.conjugate(L[j, :j])) / L[j, j].real
    return L


def _forward_sub(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``L Y = B`` for lower-triangular ``L``."""
    Y = np.array(B, dtype=np.complex128, copy=True)
    for i in range(L.shape[0]):
        if i:
            Y[i] -= L[i, :i] @ Y[:i]
        Y[i] /= L[i, i]
    return Y

def _back_sub_conj(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``L^H Y = B`` for lower-triangular ``L``."""
    n = L.shape[0]
    Y = np.array(B, dtype=np.complex128, copy=True)
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            Y[i] -= np.conjugate(L[i + 1:, i]) @ Y[i + 1:]
        Y[i] /= np.conjugate(L[i, i])
    return Y


def cholesky_block_diagonal(B: BlockDiagonalPD) -> BlockLowerTriangular:
    """Blockwise Cholesky factorization ``B = L L^H``.

    The factor shares the block structure of ``B``, so it stays exactly as
    sparse as the input.
    """
    return BlockLowerTriangular(
        B.block_sizes, tuple(_cholesky_dense(blk) for blk in B.blocks))


def _eigh_block(block: np.ndarray):
    w, V = eigh_jacobi(block)
    floor = _PIVOT_RTOL * float(w.max())
    if float(w.min()) <= max(floor, 0.0):
        raise NotPositiveDefinite(
            f"block eigenvalue {w.min():.3e} at or below floor {floor:.3e}")
    return w, V


def sqrt_block_diagonal(B: BlockDiagonalPD) -> BlockDiagonalPD:
    """Unique positive-definite square root, block by block.

    Each block is diagonalized (Jacobi rotations) and rebuilt from the
    square roots of its eigenvalues.
    """
    roots = []
    for blk in B.blocks:
        w, V = _eigh_block(blk)
        S = (V * np.sqrt(w)) @ V.conj().T
        roots.append(0.5 * (S + S.conj().T))
    return BlockDiagonalPD(B.block_sizes, tuple(roots))


def invert_block_diagonal(S: BlockDiagonalPD) -> BlockDiagonalPD:
    """Blockwise inverse; the block sparsity pattern is preserved."""
    invs = []
    for blk in S.blocks:
        w, V = _eigh_block(blk)
        M = (V / w) @ V.conj().T
        invs.append(0.5 * (M + M.conj().T))
    return BlockDiagonalPD(S.block_sizes, tuple(invs))


def solve_block_lower(L: BlockLowerTriangular, X) -> np.ndarray:
    """Solve ``L Y = X`` without forming the inverse of ``L``.

    ``X`` may be a vector or a matrix of stacked right-hand sides.
    """
    X = np.asarray(X, dtype=np.complex128)
    if X.shape[0] != L.size:
        raise DimensionMismatch(
            f"right-hand side has leading dimension {X.shape[0]}, "
            f"factor has size {L.size}")
    Y = np.empty_like(X)
    for start, s, blk in zip(L.block_starts, L.block_sizes, L.blocks):
        Y[start:start + s] = _forward_sub(blk, X[start:start + s])
    return Y


def count_nonzeros(M, rel_tol: float = NNZ_RTOL) -> int:
    """Count entries larger in magnitude than ``rel_tol * max|M|``.

    Accepts banded, block-diagonal, triangular, or dense matrices.  The
    count is taken over the full (mirrored) matrix, so Hermitian band
    storage and its dense expansion agree.
    """
    if rel_tol < 0.0:
        raise ValueError("rel_tol must be non-negative")
    if isinstance(M, BandedHermitian):
        thr = rel_tol * M.max_abs()
        total = int((np.abs(M.diagonals[0]) > thr).sum())
        for band in M.diagonals[1:]:
            total += 2 * int((np.abs(band) > thr).sum())
        return total
    if isinstance(M, (BlockDiagonalPD, BlockLowerTriangular)):
        scale = max(float(np.abs(b).max(initial=0.0)) for b in M.blocks)
        thr = rel_tol * scale
        return sum(int((np.abs(b) > thr).sum()) for b in M.blocks)
    M = np.asarray(M)
    thr = rel_tol * float(np.abs(M).max(initial=0.0))
    return int((np.abs(M) > thr).sum())


def predicted_nnz(variant: str, k: int, m: int, N: int) -> int:
    """Large-size nonzero count prediction for the two reduction routes.

    The Cholesky route fills about ``(2k + m) N`` entries; the square-root
    route about ``3 m N``, valid in the regime ``m >= k``.
    """
    if k < 0 or m < 1 or N < 1:
        raise ValueError(f"invalid parameters k={k}, m={m}, N={N}")
    if variant == "cholesky":
        return (2 * k + m) * N
    if variant == "sqrt":
        if m < k:
            raise RegimeViolation(
                f"square-root prediction requires m >= k, got m={m}, k={k}")
        return 3 * m * N
    raise ValueError(f"unknown variant {variant!r}")


def sparsity_report(M, predicted: int, label: str,
                    rel_tol: float = NNZ_RTOL) -> SparsityReport:
    """Bundle a measured count against its prediction."""
    return SparsityReport(count_nonzeros(M, rel_tol), int(predicted), label, rel_tol)
