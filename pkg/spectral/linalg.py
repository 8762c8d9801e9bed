"""
Small dense linear-algebra helpers.
Determinant and adjugate by the Faddeev-LeVerrier recursion for small
matrices and through the SVD above that, plus singular-value rank decisions.
"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg

from spectral.errors import RankAmbiguityError

logger = logging.getLogger(__name__)

# the recursion loses digits quickly beyond this dimension
RECURSION_MAX_DIM = 16
ADJUGATE_CHECK_TOL = 1e-8


def faddeev_leverrier(a: np.ndarray) -> Tuple[np.ndarray, complex, np.ndarray]:
    """Characteristic coefficients, determinant and adjugate of a square matrix.

    Returns (c, det, adj) with det(lambda*I - a) = sum_i c[i] lambda^i. No
    division by the determinant happens, so adj is exact (up to roundoff)
    also for singular matrices. Accurate for small dimensions only.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    identity = np.eye(n, dtype=complex)
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + c[n - k + 1] * identity
        c[n - k] = -np.trace(a @ m) / k
    det = (-1) ** n * c[0]
    adj = (-1) ** (n + 1) * m
    return c, complex(det), adj


def _svd_parts(a: np.ndarray) -> Tuple[complex, np.ndarray]:
    w, s, vh = linalg.svd(a)
    others = np.array([np.prod(np.delete(s, i)) for i in range(len(s))])
    phase = linalg.det(w) * linalg.det(vh)
    adj = phase * (vh.conj().T * others) @ w.conj().T
    return complex(phase * np.prod(s)), adj


def adjugate_svd(a: np.ndarray) -> np.ndarray:
    """Adjugate through the SVD: adj(a) = det(W) det(V^H) V diag(prod_{j!=i} s_j) W^H."""
    return _svd_parts(np.asarray(a, dtype=complex))[1]


def adjugate_residual(a: np.ndarray, det: complex, adj: np.ndarray) -> float:
    """max |a adj - det I|, relative to max(1, |adj|)."""
    n = a.shape[0]
    scale = max(1.0, float(np.abs(adj).max()))
    return float(np.abs(a @ adj - det * np.eye(n)).max()) / scale


def det_adjugate(a: np.ndarray) -> Tuple[complex, np.ndarray]:
    """Determinant and adjugate, valid for singular matrices as well."""
    a = np.asarray(a, dtype=complex)
    if a.shape[0] <= RECURSION_MAX_DIM:
        _, det, adj = faddeev_leverrier(a)
    else:
        det, adj = _svd_parts(a)
    residual = adjugate_residual(a, det, adj)
    if residual > ADJUGATE_CHECK_TOL:
        logger.warning(f"Adjugate identity off by {residual:.3g} at dimension {a.shape[0]}")
    return det, adj


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values in ascending order."""
    return np.sort(linalg.svdvals(a))


def kernel(a: np.ndarray, tol: float, band: float = 1e3) -> np.ndarray:
    """Orthonormal kernel basis (columns) by singular-value thresholding.

    Singular values in (tol, band*tol] make the rank decision ambiguous.
    """
    w, s, vh = linalg.svd(a)
    order = np.argsort(s)
    s_sorted = s[order]
    ambiguous = (s_sorted > tol) & (s_sorted <= band * tol)
    if ambiguous.any():
        raise RankAmbiguityError(
            f"rank decision ambiguous: singular values {s_sorted[:4]} straddle {tol:.3g}",
            s_sorted)
    dim = int(np.count_nonzero(s_sorted <= tol))
    return vh.conj().T[:, order[:dim]]


def smallest_right_vectors(a: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """The `count` smallest singular values and their right singular vectors."""
    w, s, vh = linalg.svd(a)
    order = np.argsort(s)[:count]
    return s[order], vh.conj().T[:, order]
