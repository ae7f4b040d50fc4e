"""Thin contracts around the dense LAPACK kernels used by the library.

All routines accept array-likes, work in complex double precision and
translate backend failures into library errors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, SingularMatrix

EPS = np.finfo(float).eps
SOLVE_RCOND = 1e-14


@dataclass(frozen=True)
class EigResult:
    """Eigenvalues, unit-norm eigenvectors (columns) and the backward error
    ``max_i ||A v_i - lambda_i v_i|| / ||A||``."""

    values: np.ndarray
    vectors: np.ndarray
    backward_error: float


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def eig(A) -> EigResult:
    """Full eigendecomposition of a dense square matrix."""
    A = _as_square(A)
    if A.shape[0] == 0:
        return EigResult(np.zeros(0, complex), np.zeros((0, 0), complex), 0.0)
    try:
        w, v = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    norm_a = np.linalg.norm(A, 2)
    if norm_a == 0:
        berr = 0.0
    else:
        berr = float(np.max(np.linalg.norm(A @ v - v * w[None, :], axis=0)) / norm_a)
    return EigResult(w, v, berr)


def eig_condition(A):
    """Eigenvalues of ``A`` with their condition numbers ``1/|y^H x|``.

    ``x`` and ``y`` are the unit right and left eigenvectors.  Returns
    ``(values, conditions, right_vectors)``.
    """
    A = _as_square(A)
    if A.shape[0] == 0:
        return np.zeros(0, complex), np.zeros(0), np.zeros((0, 0), complex)
    try:
        w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    vl = vl / np.linalg.norm(vl, axis=0, keepdims=True)
    vr = vr / np.linalg.norm(vr, axis=0, keepdims=True)
    s = np.abs(np.sum(vl.conj() * vr, axis=0))
    with np.errstate(divide="ignore"):
        cond = np.where(s > 0, 1.0 / np.maximum(s, 1e-300), np.inf)
    return w, cond, vr


def svd_values(A) -> np.ndarray:
    """Singular values in descending order."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        return scipy.linalg.svd(A, compute_uv=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        try:
            return scipy.linalg.svd(A, compute_uv=False, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError):
            raise NoConvergence(f"SVD failed: {exc}") from exc


def condition_number(A) -> float:
    s = svd_values(A)
    if s.size == 0:
        return 1.0
    if s[-1] == 0:
        return float("inf")
    return float(s[0] / s[-1])


def solve(A, B, rcond: float = SOLVE_RCOND) -> np.ndarray:
    """Solve ``A X = B``; raise :class:`SingularMatrix` when ``1/cond(A) < rcond``."""
    A = _as_square(A)
    B = np.asarray(B, dtype=complex)
    cond = condition_number(A)
    if not np.isfinite(cond) or 1.0 / cond < rcond:
        raise SingularMatrix(f"matrix is numerically singular (condition {cond:.3g})", cond)
    try:
        return scipy.linalg.solve(A, B)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularMatrix(str(exc), cond) from exc


def lstsq(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    try:
        return scipy.linalg.lstsq(A, B)[0]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"least squares failed: {exc}") from exc


def invariant_subspace(A, select) -> np.ndarray:
    """Orthonormal basis of the invariant subspace of ``A`` for the
    eigenvalues accepted by ``select`` (a predicate on complex numbers)."""
    A = _as_square(A)
    try:
        _, Z, sdim = scipy.linalg.schur(A, output="complex", sort=select)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"Schur decomposition failed: {exc}") from exc
    return Z[:, :sdim]
