"""SVD-based quantities feeding the reconstruction-error bound.

The bound needs two numbers about the ideal code matrix: the optimal rank-k
residual ||C - C_k||_F (tail of the singular value spectrum) and the scaled
diagonal maximum N * max_i C_ii.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nystrom import _matrix


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Rank choice k, the corresponding residual, and the diagonal term."""

    k: int
    rank_k_residual: float
    scaled_diag_max: float
    singular_values: np.ndarray


def singular_values(C) -> np.ndarray:
    """Singular values of C, descending."""
    return np.linalg.svd(_matrix(C), compute_uv=False)


def rank_k_residual(C, k: int) -> float:
    """Frobenius norm of C minus its best rank-k approximation.

    By Eckart-Young this equals sqrt(sum of squared singular values past k).
    """
    values = _matrix(C)
    if not (0 <= k <= min(values.shape)):
        raise ValueError(f"need 0 <= k <= min(dims), got k={k} for shape {values.shape}")
    s = singular_values(values)
    return float(np.sqrt(np.sum(s[k:] ** 2)))


def scaled_diag_max(C) -> float:
    """N times the largest diagonal entry of a square matrix."""
    values = _matrix(C)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"C must be square, got shape {values.shape}")
    return float(values.shape[0] * np.max(np.diag(values)))


def effective_rank(C, energy: float = 0.95) -> int:
    """Smallest k whose top-k squared singular values retain ``energy`` of the total."""
    if not (0.0 < energy <= 1.0):
        raise ValueError(f"energy must be in (0, 1], got {energy}")
    s2 = singular_values(C) ** 2
    total = s2.sum()
    if total == 0.0:
        return 0
    cum = np.cumsum(s2)
    k = int(np.searchsorted(cum, energy * total, side="left")) + 1
    return min(k, len(s2))


def spectral_report(C, k: int | None = None, energy: float = 0.95) -> SpectralReport:
    """Assemble the bound inputs for C; k defaults to the effective rank at ``energy``."""
    values = _matrix(C)
    if values.shape[0] != values.shape[1]:
        raise ValueError(f"C must be square, got shape {values.shape}")
    s = singular_values(values)
    if k is None:
        s2 = s**2
        total = s2.sum()
        if total == 0.0:
            k = 0
        else:
            k = min(int(np.searchsorted(np.cumsum(s2), energy * total, side="left")) + 1, len(s))
    if not (0 <= k <= len(s)):
        raise ValueError(f"need 0 <= k <= min(dims), got k={k}")
    residual = float(np.sqrt(np.sum(s[k:] ** 2)))
    return SpectralReport(
        k=k,
        rank_k_residual=residual,
        scaled_diag_max=scaled_diag_max(values),
        singular_values=s,
    )
