"""Dense symmetric linear algebra: eigenpairs, numerical rank, PSD tests, square roots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPsd, NumericalError

DEFAULT_RANK_TOL = 1e-7


def as_symmetric(M, sym_tol: float = 1e-9) -> np.ndarray:
    """Validate and return a float copy with exactly symmetric storage."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionMismatch("empty matrix")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > sym_tol * scale:
        raise DimensionMismatch("matrix is not symmetric")
    return (A + A.T) / 2


def eigendecompose(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching orthonormal eigenvector columns."""
    A = as_symmetric(M)
    w, V = np.linalg.eigh(A)
    return w[::-1].copy(), V[:, ::-1].copy()


@dataclass(frozen=True)
class RankReport:
    rank: int
    eigenvalues: tuple[float, ...]
    tolerance: float

    def to_json(self) -> dict:
        return {"rank": self.rank, "eigenvalues": list(self.eigenvalues), "tolerance": self.tolerance}


def numerical_rank(M, tol: float = DEFAULT_RANK_TOL) -> RankReport:
    """Count eigenvalues above ``tol * max(|lambda|, 1)``."""
    w, _ = eigendecompose(M)
    cutoff = tol * max(float(np.max(np.abs(w))), 1.0)
    return RankReport(int(np.sum(w > cutoff)), tuple(float(x) for x in w), tol)


def is_psd(M, tol: float = 1e-9) -> bool:
    w, _ = eigendecompose(M)
    return bool(w[-1] >= -tol * max(1.0, float(w[0])))


def min_eigenvalue(M) -> float:
    return float(np.linalg.eigvalsh(as_symmetric(M))[0])


def psd_square_root_rows(M, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Rows g_k = sqrt(lambda_k) v_k with M ~= sum_k g_k g_k^T, one per retained eigenvalue."""
    A = as_symmetric(M)
    if not is_psd(A, tol):
        raise NotPsd(f"minimum eigenvalue {min_eigenvalue(A):.3e} is below tolerance")
    w, V = eigendecompose(A)
    cutoff = tol * max(float(np.max(np.abs(w))), 1.0)
    keep = w > cutoff
    return (V[:, keep] * np.sqrt(w[keep])).T


def max_abs(M) -> float:
    return float(np.max(np.abs(M))) if np.size(M) else 0.0
