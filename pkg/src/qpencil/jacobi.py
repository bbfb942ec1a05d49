"""Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

Rotations are scheduled in a round-robin (tournament) ordering: every sweep
visits each index pair exactly once, grouped into rounds of pairwise-disjoint
pairs.  Rotations within a round touch disjoint rows and columns, so they
commute and can be applied simultaneously with vectorized updates.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceFailure

#: Convergence: off-diagonal Frobenius norm below this multiple of the full norm.
OFF_NORM_RTOL = 1e-13

#: Hard cap on the number of full sweeps before giving up.
SWEEP_CAP = 100


def _tournament_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Index pairs for one sweep, grouped into rounds of disjoint pairs."""
    m = n + (n % 2)  # pad with a bye when odd
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.asarray(ps, dtype=np.intp), np.asarray(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def eigh_jacobi(matrix, *, vectors: bool = True,
                tol: float = OFF_NORM_RTOL, max_sweeps: int = SWEEP_CAP):
    """Diagonalize a Hermitian matrix with complex 2x2 Jacobi rotations.

    Parameters
    ----------
    matrix : (n, n) array_like
        Hermitian matrix; only its Hermitian part is used.
    vectors : bool
        Accumulate eigenvectors.  Skipping them saves roughly a third of
        the work when only the spectrum is needed.
    tol : float
        Relative off-diagonal Frobenius tolerance declaring convergence.
    max_sweeps : int
        Sweep cap; :class:`ConvergenceFailure` is raised beyond it.

    Returns
    -------
    (w, V) with eigenvalues ``w`` ascending and unitary ``V`` whose columns
    are the matching eigenvectors (``V is None`` when ``vectors=False``).
    """
    A = np.asarray(matrix, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 1:
        w = np.array([A[0, 0].real])
        return w, (np.ones((1, 1), dtype=np.complex128) if vectors else None)

    A = 0.5 * (A + A.conj().T)
    Q = np.eye(n, dtype=np.complex128) if vectors else None
    norm = np.linalg.norm(A)
    if norm == 0.0:
        w = np.zeros(n)
        return w, Q

    rounds = _tournament_rounds(n)
    # Pairs whose coupling is this small cannot push the off-norm back above
    # the convergence threshold; skipping them keeps late sweeps cheap.
    skip = 0.01 * tol * norm / n

    for _ in range(max_sweeps):
        off = A.copy()
        np.fill_diagonal(off, 0.0)
        if np.linalg.norm(off) < tol * norm:
            break
        for P, Qi in rounds:
            apq = A[P, Qi]
            g = np.abs(apq)
            active = g > skip
            if not active.any():
                continue
            P = P[active]
            Qi = Qi[active]
            apq = apq[active]
            g = g[active]

            # Phase factor reducing each 2x2 block to the real symmetric case,
            # then the textbook small-angle rotation.
            u = apq / g
            app = A[P, P].real
            aqq = A[Qi, Qi].real
            tau = (aqq - app) / (2.0 * g)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ubar = np.conjugate(u)

            # Column update A <- A J with J = diag(1, conj(u)) @ [[c, s], [-s, c]]
            AP = A[:, P]
            AQ = A[:, Qi]
            A[:, P] = c * AP - (s * ubar) * AQ
            A[:, Qi] = s * AP + (c * ubar) * AQ
            # Row update A <- J^H A
            BP = A[P, :]
            BQ = A[Qi, :]
            A[P, :] = c[:, None] * BP - (s * u)[:, None] * BQ
            A[Qi, :] = s[:, None] * BP + (c * u)[:, None] * BQ

            A[P, Qi] = 0.0
            A[Qi, P] = 0.0
            A[P, P] = app - t * g
            A[Qi, Qi] = aqq + t * g

            if vectors:
                QP = Q[:, P]
                QQ = Q[:, Qi]
                Q[:, P] = c * QP - (s * ubar) * QQ
                Q[:, Qi] = s * QP + (c * ubar) * QQ
    else:
        raise ConvergenceFailure(
            f"Jacobi sweeps exceeded cap of {max_sweeps} (n={n})")

    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    if vectors:
        Q = np.ascontiguousarray(Q[:, order])
    return w, Q
