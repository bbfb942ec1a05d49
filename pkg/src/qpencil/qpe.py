"""Full statevector simulation of textbook phase estimation for banded Hamiltonians.

Conventions (fixed here, once, for the whole package):

* Phase map.  A shift-and-scale pair ``(sigma, tau)`` sends an eigenvalue to
  the phase ``phi = tau * (lam - sigma)``, which must land in
  ``[0, 1 - guard)``.  The controlled unitary is arranged so that an
  eigenvector with mapped phase ``phi`` produces the ancilla phase ``+phi``
  directly: an ancilla reading ``y`` estimates ``phi ~= y / 2**t`` and hence
  ``lam ~= sigma + y / (2**t tau)``, with no reflection anywhere.
* Qubit ordering.  The ancilla register is most significant; ancilla bit
  ``j`` controls the ``2**j``-th power of the unit evolution, so the branch
  with ancilla integer ``a`` carries ``a`` repetitions of it.  Controlled
  powers are realized by evolving ``2**j`` times longer (exact path) or by
  repeating Trotter cycles (trotter path), never by squaring matrices.
* Padding.  When the physical dimension is not a power of two, the
  Hamiltonian is embedded in the next power of two with decoupled padding
  rows whose mapped phase sits at ``1 - guard/2``, above every physical
  phase, so padding outcomes cannot be mistaken for physical ones.
* Randomness.  Measurement sampling uses a PCG64 generator seeded
  explicitly and draws outcomes by inverse transform over the exact
  distribution, so a seed pins the full sample sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BandwidthTooLarge,
    DegenerateRange,
    DimensionMismatch,
    OutOfRange,
    TooManyQubits,
)
from .jacobi import eigh_jacobi
from .linalg import BandedHermitian

#: Fraction of the phase interval kept free above the mapped spectrum.
DEFAULT_GUARD = 0.125

#: Total qubit budget of the dense statevector simulator.
MAX_QUBITS = 24

_NORM_ATOL = 1e-10
# Inflation applied to a spectral enclosure so that a tight upper bound
# still maps strictly inside the guarded interval.
_RANGE_PAD = 1.0 / 64.0


@dataclass(frozen=True)
class Statevector:
    """Normalized amplitudes of an ``n_qubits`` register."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a statevector needs at least one qubit")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise DimensionMismatch(
                f"{self.n_qubits} qubits require {2 ** self.n_qubits} amplitudes, "
                f"got shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValueError(f"statevector norm {norm} is not 1 within {_NORM_ATOL}")
        amps = np.ascontiguousarray(amps)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "Statevector":
        amps = np.zeros(2 ** n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def uniform(cls, n_qubits: int) -> "Statevector":
        dim = 2 ** n_qubits
        return cls(n_qubits, np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))

    @classmethod
    def from_vector(cls, vec) -> "Statevector":
        """Normalize a raw vector, zero-padding it up to the next power of two."""
        vec = np.asarray(vec, dtype=np.complex128).ravel()
        if vec.size < 1:
            raise DimensionMismatch("empty vector")
        n_qubits = max(1, int(math.ceil(math.log2(vec.size))))
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        amps = np.zeros(2 ** n_qubits, dtype=np.complex128)
        amps[:vec.size] = vec / norm
        return cls(n_qubits, amps)


@dataclass(frozen=True)
class ShiftScale:
    """Affine map ``lam -> tau (lam - sigma)`` placing a spectrum in [0, 1 - guard)."""

    shift: float
    scale: float
    guard: float = DEFAULT_GUARD

    def __post_init__(self):
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if not 0.0 < self.guard < 1.0:
            raise ValueError(f"guard must lie in (0, 1), got {self.guard}")

    def phase(self, lam):
        return self.scale * (np.asarray(lam, dtype=float) - self.shift)

    def eigenvalue(self, phase):
        return self.shift + np.asarray(phase, dtype=float) / self.scale

    def map_matrix(self, H: BandedHermitian) -> BandedHermitian:
        """Hamiltonian whose spectrum is the mapped phases: ``tau (H - sigma I)``."""
        return H.affine(self.scale, self.shift)


@dataclass(frozen=True)
class QpeResult:
    """Outcome distribution over the ancilla register plus phase-map metadata."""

    t_bits: int
    distribution: np.ndarray
    shift_scale: ShiftScale
    samples: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        dist = np.asarray(self.distribution, dtype=float)
        if dist.shape != (2 ** self.t_bits,):
            raise DimensionMismatch(
                f"{self.t_bits} ancilla bits require {2 ** self.t_bits} probabilities")
        if (dist < 0.0).any():
            raise ValueError("probabilities must be non-negative")
        if abs(float(dist.sum()) - 1.0) > _NORM_ATOL:
            raise ValueError("probabilities must sum to 1")
        dist = np.ascontiguousarray(dist)
        dist.setflags(write=False)
        object.__setattr__(self, "distribution", dist)

    def with_samples(self, samples: np.ndarray, seed: int) -> "QpeResult":
        return replace(self, samples=np.asarray(samples), seed=seed)


def gershgorin_shift_scale(H: BandedHermitian,
                           guard: float = DEFAULT_GUARD) -> ShiftScale:
    """Shift-and-scale map built from Gershgorin disc bounds.

    The shift is the lower disc bound and the scale compresses the disc
    range (inflated slightly, so a tight bound stays strictly inside) onto
    ``[0, 1 - guard)``.  A spectrum collapsed to one point, such as any
    multiple of the identity, maps with unit scale to phase zero.
    """
    centers = H.diagonals[0].real.copy()
    radii = np.zeros(H.size)
    for d in range(1, H.half_bandwidth + 1):
        mag = np.abs(H.diagonals[d])
        radii[:H.size - d] += mag
        radii[d:] += mag
    lower = float((centers - radii).min())
    upper = float((centers + radii).max())
    span = upper - lower
    if not math.isfinite(span):
        raise DegenerateRange("Gershgorin discs are not finite")
    if span < 1e-300:
        return ShiftScale(lower, 1.0, guard)
    return ShiftScale(lower, (1.0 - guard) / (span * (1.0 + _RANGE_PAD)), guard)


def _check_system(H: BandedHermitian, psi: Statevector) -> None:
    if H.size != 2 ** psi.n_qubits:
        raise DimensionMismatch(
            f"Hamiltonian of size {H.size} against a {psi.n_qubits}-qubit register")


def evolve_exact(H: BandedHermitian, time: float, psi: Statevector) -> Statevector:
    """Apply ``exp(-i H t)`` through a dense eigendecomposition."""
    _check_system(H, psi)
    if H.size > 4096:
        raise ValueError("dense evolution path is capped at dimension 4096")
    w, V = eigh_jacobi(H.to_dense())
    amps = V @ (np.exp(-1j * w * time) * (V.conj().T @ psi.amplitudes))
    return Statevector(psi.n_qubits, amps)


def split_tridiagonal(H: BandedHermitian):
    """Split a tridiagonal Hamiltonian into diagonal and hopping parts.

    The two parts sum to the input exactly; the second has zero diagonal.
    """
    if H.half_bandwidth > 1:
        raise BandwidthTooLarge(
            f"tridiagonal split needs half-bandwidth <= 1, got {H.half_bandwidth}")
    n = H.size
    H1 = BandedHermitian(n, 0, (H.diagonals[0].copy(),))
    if n == 1:
        return H1, H1.affine(0.0)
    hop = H.diagonals[1].copy() if H.half_bandwidth == 1 else np.zeros(n - 1)
    H2 = BandedHermitian(n, 1, (np.zeros(n), hop))
    return H1, H2


class _TrotterCycle:
    """One first-order cycle ``exp(-i H1 dt) exp(-i H2 dt)`` applied exactly.

    The diagonal factor is a phase mask; the hopping factor is applied
    through a cached eigendecomposition, so each factor is unitary to
    machine precision and all error comes from the splitting itself.
    """

    def __init__(self, H1: BandedHermitian, H2: BandedHermitian, dt: float):
        if H1.half_bandwidth != 0:
            raise BandwidthTooLarge("the first Trotter factor must be diagonal")
        if H2.half_bandwidth > 1:
            raise BandwidthTooLarge("the second Trotter factor must be tridiagonal")
        if H1.size != H2.size:
            raise DimensionMismatch(
                f"factor sizes {H1.size} and {H2.size} differ")
        self.phase1 = np.exp(-1j * H1.diagonals[0].real * dt)
        w2, V2 = eigh_jacobi(H2.to_dense())
        self.V2 = V2
        self.phase2 = np.exp(-1j * w2 * dt)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = self.V2 @ (self.phase2 * (self.V2.conj().T @ vec))
        return self.phase1 * vec


def evolve_trotter(H1: BandedHermitian, H2: BandedHermitian, time: float,
                   steps: int, psi: Statevector) -> Statevector:
    """First-order product formula ``(exp(-i H1 t/s) exp(-i H2 t/s))^s``."""
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    _check_system(H1, psi)
    cycle = _TrotterCycle(H1, H2, time / steps)
    amps = psi.amplitudes.copy()
    for _ in range(steps):
        amps = cycle.apply(amps)
    return Statevector(psi.n_qubits, amps)


def _embed(H: BandedHermitian, dim: int, pad_value: float) -> BandedHermitian:
    """Grow to dimension ``dim`` with decoupled diagonal padding entries."""
    if dim == H.size:
        return H
    pad = dim - H.size
    bands = [np.concatenate([H.diagonals[0].real, np.full(pad, pad_value)])]
    for d in range(1, H.half_bandwidth + 1):
        bands.append(np.concatenate([H.diagonals[d], np.zeros(pad)]))
    return BandedHermitian(dim, H.half_bandwidth, tuple(bands))


def _system_state(psi0, n_sys: int, phys_dim: int) -> np.ndarray:
    if isinstance(psi0, Statevector):
        if psi0.n_qubits != n_sys:
            raise DimensionMismatch(
                f"trial state has {psi0.n_qubits} qubits, system needs {n_sys}")
        return psi0.amplitudes.copy()
    vec = np.asarray(psi0, dtype=np.complex128).ravel()
    if vec.size not in (phys_dim, 2 ** n_sys):
        raise DimensionMismatch(
            f"trial vector of length {vec.size} does not match the problem "
            f"size {phys_dim} or the padded dimension {2 ** n_sys}")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero trial vector")
    amps = np.zeros(2 ** n_sys, dtype=np.complex128)
    amps[:vec.size] = vec / norm
    return amps


def run_qpe(H: BandedHermitian, psi0, t_bits: int, shift_scale: ShiftScale,
            evolution: str = "exact", trotter_steps: int | None = None) -> QpeResult:
    """Simulate phase estimation of a banded Hamiltonian.

    The ancilla register starts in uniform superposition, branch ``a``
    accumulates ``a`` applications of the unit evolution (whose eigenphases
    are the mapped phases of ``H``), the inverse Fourier transform acts on
    the ancilla, and the system register is traced out of the joint state.

    Parameters
    ----------
    H : BandedHermitian
        Physical Hamiltonian; padded to a power of two when necessary.
    psi0 : Statevector or array_like
        Trial state on the padded register, or a raw vector of the physical
        dimension (zero-padded and normalized).
    t_bits : int
        Ancilla width; outcomes resolve phases to ``2**-t_bits``.
    shift_scale : ShiftScale
        Phase map; every physical eigenvalue must land in ``[0, 1 - guard)``.
    evolution : {"exact", "trotter"}
        Exact eigenphase evolution, or first-order Trotter cycles of the
        diagonal/hopping split with ``trotter_steps`` cycles per unit power.
    """
    if t_bits < 1:
        raise ValueError(f"t_bits must be at least 1, got {t_bits}")
    if evolution not in ("exact", "trotter"):
        raise ValueError(f"unknown evolution mode {evolution!r}")
    if evolution == "trotter" and (trotter_steps is None or trotter_steps < 1):
        raise ValueError("trotter evolution requires trotter_steps >= 1")
    n_sys = max(1, int(math.ceil(math.log2(H.size))))
    if n_sys + t_bits > MAX_QUBITS:
        raise TooManyQubits(
            f"{n_sys} system + {t_bits} ancilla qubits exceed the budget of {MAX_QUBITS}")

    pad_value = float(shift_scale.eigenvalue(1.0 - shift_scale.guard / 2.0))
    H_emb = _embed(H, 2 ** n_sys, pad_value)
    state = _system_state(psi0, n_sys, H.size)
    H_phase = shift_scale.map_matrix(H_emb)  # spectrum equals the mapped phases

    M = 2 ** t_bits
    if evolution == "exact":
        phases, V = eigh_jacobi(H_phase.to_dense())
        comps = V.conj().T @ state
        kick = np.exp(2j * np.pi * np.outer(np.arange(M), phases))
        joint = (kick * comps) @ V.T
    else:
        # exp(+2 pi i H_phase) realized as s Trotter cycles of time -2 pi / s
        h1, h2 = split_tridiagonal(H_phase)
        cycle = _TrotterCycle(h1, h2, -2.0 * np.pi / trotter_steps)
        joint = np.empty((M, 2 ** n_sys), dtype=np.complex128)
        cur = state
        for a in range(M):
            joint[a] = cur
            if a + 1 < M:
                for _ in range(trotter_steps):
                    cur = cycle.apply(cur)
    joint /= math.sqrt(M)

    # Inverse Fourier transform on the ancilla axis:
    # |a> -> M^{-1/2} sum_y exp(-2 pi i a y / M) |y>.
    transformed = np.fft.fft(joint, axis=0) / math.sqrt(M)
    distribution = (np.abs(transformed) ** 2).sum(axis=1)
    return QpeResult(t_bits, distribution, shift_scale)


def sample_outcomes(result: QpeResult, shots: int, seed: int) -> np.ndarray:
    """Draw ancilla outcomes by inverse transform from the exact distribution.

    A fixed seed pins the entire sequence; the generator is PCG64.
    """
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum(result.distribution)
    cdf[-1] = max(cdf[-1], 1.0)
    draws = rng.random(shots)
    return np.searchsorted(cdf, draws, side="right").astype(np.int64)


def outcome_to_eigenvalue(y: int, t_bits: int, shift_scale: ShiftScale) -> float:
    """Invert the phase map for one ancilla reading."""
    if not 0 <= y < 2 ** t_bits:
        raise OutOfRange(f"outcome {y} outside [0, {2 ** t_bits})")
    return float(shift_scale.eigenvalue(y / 2 ** t_bits))


def overlap_probabilities(psi0, H: BandedHermitian):
    """Eigenvalues of ``H`` with the trial state's overlap on each eigenvector.

    These overlaps are exactly the weights with which phase estimation
    distributes its outcome mass across eigenphases.
    """
    if H.size > 4096:
        raise ValueError("dense overlap path is capped at dimension 4096")
    if isinstance(psi0, Statevector):
        vec = psi0.amplitudes
    else:
        vec = np.asarray(psi0, dtype=np.complex128).ravel()
    if vec.shape != (H.size,):
        raise DimensionMismatch(
            f"trial vector of shape {vec.shape} against dimension {H.size}")
    w, V = eigh_jacobi(H.to_dense())
    probs = np.abs(V.conj().T @ vec) ** 2
    return [(float(lam), float(p)) for lam, p in zip(w, probs)]
