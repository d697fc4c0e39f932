"""Dense linear-algebra primitives shared by the integrators and metrics.

All functions are pure: they never mutate their inputs and are safe to call
concurrently. Backed by LAPACK through numpy (eigh / svd).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import IndefiniteInput, NonFinite, NonSymmetric, ZeroMatrix

# Eigenvalues of a nominally-PSD matrix in (-CLAMP_REL * ||M||_op, 0) are
# treated as roundoff and clamped to zero; anything below errors out.
CLAMP_REL = 1e-10
SYM_TOL_REL = 1e-10


class SvdTriple(NamedTuple):
    """SVD with descending singular values and a deterministic sign choice."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray           # columns are right singular vectors (not V^T)


def op_norm(A: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def fro_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A))


def psd_sqrt(M: np.ndarray, clamp_rel: float = CLAMP_REL) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in (-clamp_rel * ||M||_op, 0) are clamped to zero; a smaller
    eigenvalue raises IndefiniteInput, an asymmetric input NonSymmetric.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise NonFinite("psd_sqrt: input has non-finite entries")
    norm = op_norm(M)
    if norm > 0.0:
        defect = op_norm(M - M.T)
        if defect > SYM_TOL_REL * norm:
            raise NonSymmetric(
                f"symmetry defect {defect:.3e} exceeds {SYM_TOL_REL:.0e} * ||M||_op"
            )
    sym = 0.5 * (M + M.T)
    evals, evecs = np.linalg.eigh(sym)
    floor = -clamp_rel * max(norm, 1e-300)
    if evals[0] < floor:
        raise IndefiniteInput(
            f"eigenvalue {evals[0]:.3e} below clamp threshold {floor:.3e}"
        )
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return 0.5 * (root + root.T)


def svd_desc(A: np.ndarray) -> SvdTriple:
    """Full SVD with descending values and sign-canonical singular vectors.

    Sign convention: each left singular vector is flipped so that its entry
    of largest absolute value is positive (first such entry on ties); the
    matching right vector is flipped along with it.
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise NonFinite("svd_desc: input has non-finite entries")
    U, S, Vh = np.linalg.svd(A)
    U = U.copy()
    V = Vh.T.copy()
    k = min(A.shape)
    # argmax returns the first maximal entry, which is the tie-break we want
    idx = np.argmax(np.abs(U[:, :k]), axis=0)
    signs = np.sign(U[idx, np.arange(k)])
    signs[signs == 0] = 1.0
    U[:, :k] *= signs
    V[:, :k] *= signs
    return SvdTriple(U, S, V)


def stable_rank(A: np.ndarray) -> float:
    """||A||_F^2 / ||A||_op^2, in [1, min(rows, cols)]."""
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise NonFinite("stable_rank: input has non-finite entries")
    fro2 = float(np.sum(A * A))
    if fro2 == 0.0:
        raise ZeroMatrix("stable_rank undefined for the zero matrix")
    return fro2 / op_norm(A) ** 2


def sqrt_gram_shifted(A: np.ndarray, shift: float) -> tuple[np.ndarray, np.ndarray]:
    """(sqrt(A A^T + shift^2 I), sqrt(A^T A + shift^2 I)) from one SVD of A.

    Equivalent to psd_sqrt on the shifted Gram matrices but avoids forming
    the squares, which matters when shift^2 underflows relative to ||A||^2.
    """
    U, S, Vh = np.linalg.svd(np.asarray(A, dtype=float))
    vals = np.sqrt(S * S + shift * shift)
    left = (U * vals) @ U.T
    right = (Vh.T * vals) @ Vh
    return 0.5 * (left + left.T), 0.5 * (right + right.T)
