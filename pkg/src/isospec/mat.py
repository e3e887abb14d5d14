"""Dense complex linear algebra and the su(m) layer.

Matrices are plain ``numpy`` complex arrays of shape ``(m, m)``; the helpers
here validate them instead of wrapping them in classes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import linear_sum_assignment

if TYPE_CHECKING:
    from .jmaps import JMapPair

SU_TOL = 1e-12
RANK_TOL = 1e-9


class EigenSolverError(RuntimeError):
    """Raised when the eigensolver fails; carries the offending matrix."""

    def __init__(self, message: str, matrix: np.ndarray):
        super().__init__(message)
        self.matrix = matrix


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite square complex array or raise ``ValueError``."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def is_su(M, tol: float = SU_TOL) -> bool:
    A = as_matrix(M)
    return bool(
        np.max(np.abs(A + A.conj().T)) <= tol and abs(np.trace(A)) <= tol
    )


def as_su(M, tol: float = SU_TOL) -> np.ndarray:
    """Validate that ``M`` is skew-hermitian and traceless within ``tol``."""
    A = as_matrix(M)
    skew = np.max(np.abs(A + A.conj().T))
    tr = abs(np.trace(A))
    if skew > tol or tr > tol:
        raise ValueError(
            f"not in su(m): |M + M^H|_max = {skew:.3e}, |tr M| = {tr:.3e}"
        )
    return A


def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X


def su_basis(m: int) -> np.ndarray:
    """Real basis of su(m), shape ``(m*m - 1, m, m)``.

    Off-diagonal pairs E_kl - E_lk and i(E_kl + E_lk), then the diagonal
    elements i(E_kk - E_{k+1,k+1}).
    """
    basis = []
    for k in range(m):
        for l in range(k + 1, m):
            B = np.zeros((m, m), dtype=complex)
            B[k, l], B[l, k] = 1.0, -1.0
            basis.append(B)
            B = np.zeros((m, m), dtype=complex)
            B[k, l], B[l, k] = 1j, 1j
            basis.append(B)
    for k in range(m - 1):
        B = np.zeros((m, m), dtype=complex)
        B[k, k], B[k + 1, k + 1] = 1j, -1j
        basis.append(B)
    return np.array(basis).reshape(len(basis), m, m)


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial ``lam^m + c[m-1] lam^(m-1) + ... + c[0]``.

    ``coeffs`` holds ``c_0 .. c_m`` in increasing degree, ``c_m == 1``.
    """

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return np.polynomial.polynomial.polyval(lam, self.coeffs)


def char_poly(M) -> CharPoly:
    """Characteristic polynomial by the Faddeev-LeVerrier recursion."""
    A = as_matrix(M)
    m = A.shape[0]
    c = np.zeros(m + 1, dtype=complex)
    c[m] = 1.0
    Mk = np.zeros_like(A)
    eye = np.eye(m, dtype=complex)
    for k in range(1, m + 1):
        Mk = A @ Mk + c[m - k + 1] * eye
        c[m - k] = -np.trace(A @ Mk) / k
    return CharPoly(c)


def _sort_key(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.real, values.imag))


def eigenvalue_multiset(M) -> np.ndarray:
    """Eigenvalues with multiplicity, sorted by (imaginary, real) part."""
    A = as_matrix(M)
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver failed: {exc}", A) from exc
    return w[_sort_key(w)]


def match_multisets(a: np.ndarray, b: np.ndarray) -> float:
    """Worst distance over an optimal pairing of two equal-size multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"multiset sizes differ: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if len(a) else 0.0


def commutant_dimension(j: "JMapPair", rank_tol: float = RANK_TOL) -> int:
    """Real dimension of the common commutant of both j-components in su(m)."""
    basis = su_basis(j.m)
    columns = []
    for B in basis:
        c1 = bracket(B, j.jz1).ravel()
        c2 = bracket(B, j.jz2).ravel()
        columns.append(np.concatenate([c1.real, c1.imag, c2.real, c2.imag]))
    L = np.array(columns).T
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[0] == 0.0:
        return len(basis)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    return len(basis) - rank


def is_unitary(A, tol: float = 1e-10) -> bool:
    A = as_matrix(A)
    return bool(np.max(np.abs(A @ A.conj().T - np.eye(len(A)))) <= tol)


def conjugate(A, M, unitary: bool | None = None) -> np.ndarray:
    """Return ``A M A^{-1}``; the inverse is ``A^H`` when ``A`` is unitary."""
    A = as_matrix(A)
    M = as_matrix(M)
    if A.shape != M.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {M.shape}")
    if unitary is None:
        unitary = is_unitary(A)
    if unitary:
        return A @ M @ A.conj().T
    if np.linalg.cond(A) > 1e14:
        raise np.linalg.LinAlgError("conjugating matrix is singular")
    return A @ M @ np.linalg.inv(A)


def random_unitary(m: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    """Haar-random unitary from the QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    Q = Q * (d / np.abs(d))
    if special:
        Q = Q / np.linalg.det(Q) ** (1.0 / m)
    return Q


def random_su(m: int, rng: np.random.Generator) -> np.ndarray:
    coeffs = rng.standard_normal(m * m - 1)
    return np.tensordot(coeffs, su_basis(m), axes=1)


# -- JSON matrix format: {"dim": m, "re": [[...]], "im": [[...]]} ----------

def matrix_to_json(M) -> dict:
    A = as_matrix(M)
    return {"dim": A.shape[0], "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix record: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"matrix record declares dim={dim} but arrays have shapes "
            f"{re.shape} and {im.shape}"
        )
    return as_matrix(re + 1j * im)


def read_matrix(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def write_matrix(M, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(M), fh)
