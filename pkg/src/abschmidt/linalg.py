"""Dense complex linear algebra for small bipartite operators.

Matrices are plain ``numpy`` complex arrays. Everything here is a pure
function of its inputs; nothing is cached or mutated in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from . import config
from .errors import DimensionMismatch, DimensionOverflow, NotHermitian, NotUnitary, ValidationError

__all__ = [
    "HermitianSpectrum",
    "as_matrix",
    "dagger",
    "hermitian_deviation",
    "require_hermitian",
    "hermitian_eigensystem",
    "eigvalsh",
    "tensor_product",
    "partial_transpose",
    "partial_trace",
    "trace_norm",
    "unitary_from_generator",
    "unitarity_residual",
    "require_unitary",
    "projector",
]


def as_matrix(A, *, cap: int = config.DIM_CAP) -> np.ndarray:
    """Return ``A`` as a square complex128 array, checking shape and finiteness."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise DimensionMismatch("empty matrix")
    if M.shape[0] > cap:
        raise DimensionOverflow(f"dimension {M.shape[0]} exceeds the supported cap {cap}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(A).T


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def hermitian_deviation(A: np.ndarray) -> float:
    return float(np.max(np.abs(A - dagger(A))))


def require_hermitian(A, tol: float | None = None) -> np.ndarray:
    M = as_matrix(A)
    tol = config.get().hermiticity if tol is None else tol
    dev = hermitian_deviation(M)
    if dev > tol:
        raise NotHermitian(dev, tol)
    return M


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ dagger(V)


@numba.njit(cache=True, nogil=True)
def _jacobi(A: np.ndarray, tol: float, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    # Cyclic complex Jacobi. Each rotation is R = D G with D = diag(1, e^{-i phi})
    # removing the phase of a_pq and G a real Givens rotation.
    n = A.shape[0]
    A = A.copy()
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += abs(A[i, j]) ** 2
    threshold = tol * max(1.0, math.sqrt(fro))
    tiny = 1e-300
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += abs(A[i, j]) ** 2
        if math.sqrt(off) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= tiny:
                    continue
                phase_c = np.conj(apq / mag)
                tau = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # R = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                r10 = -s * phase_c
                r11 = c * phase_c
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = c * aip + r10 * aiq
                    A[i, q] = s * aip + r11 * aiq
                for j in range(n):
                    apj = A[p, j]
                    aqj = A[q, j]
                    A[p, j] = c * apj + np.conj(r10) * aqj
                    A[q, j] = s * apj + np.conj(r11) * aqj
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip + r10 * viq
                    V[i, q] = s * vip + r11 * viq
    vals = np.empty(n)
    for i in range(n):
        vals[i] = A[i, i].real
    return vals, V


def hermitian_eigensystem(A, hermiticity_tol: float | None = None) -> HermitianSpectrum:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(A + A^H)/2`` after the Hermiticity check so
    that residual asymmetry below tolerance never leaks into the spectrum.
    """
    M = require_hermitian(A, hermiticity_tol)
    return symmetric_eigensystem(0.5 * (M + dagger(M)))


def symmetric_eigensystem(M: np.ndarray) -> HermitianSpectrum:
    """:func:`hermitian_eigensystem` without the check, for matrices already symmetrized exactly."""
    vals, vecs = _jacobi(M, config.get().jacobi_offdiag)
    order = np.argsort(-vals, kind="stable")
    return HermitianSpectrum(vals[order], vecs[:, order])


def eigvalsh(A, hermiticity_tol: float | None = None) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix."""
    return hermitian_eigensystem(A, hermiticity_tol).eigenvalues


def tensor_product(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    n = A.shape[0] * B.shape[0]
    if n > config.DIM_CAP:
        raise DimensionOverflow(f"tensor product dimension {n} exceeds the supported cap {config.DIM_CAP}")
    return np.kron(as_matrix(A), as_matrix(B))


def _check_bipartite(rho: np.ndarray, dA: int, dB: int) -> None:
    if dA < 1 or dB < 1 or rho.shape[0] != dA * dB:
        raise DimensionMismatch(f"matrix of dimension {rho.shape[0]} does not split as {dA}x{dB}")


def partial_transpose(rho, dA: int, dB: int, sys: str = "B") -> np.ndarray:
    """Transpose one tensor factor: ``sys`` is ``"A"`` or ``"B"``."""
    M = as_matrix(rho)
    _check_bipartite(M, dA, dB)
    T = M.reshape(dA, dB, dA, dB)
    if sys == "B":
        T = T.transpose(0, 3, 2, 1)
    elif sys == "A":
        T = T.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"sys must be 'A' or 'B', got {sys!r}")
    return T.reshape(dA * dB, dA * dB).copy()


def partial_trace(rho, dA: int, dB: int, keep: str = "A") -> np.ndarray:
    """Reduced operator on the kept subsystem (``"A"`` or ``"B"``)."""
    M = as_matrix(rho)
    _check_bipartite(M, dA, dB)
    T = M.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", T)
    if keep == "B":
        return np.einsum("ijil->jl", T)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def trace_norm(A) -> float:
    tol = 1e-8
    return float(np.sum(np.abs(eigvalsh(A, tol))))


def unitarity_residual(U) -> float:
    U = np.asarray(U, dtype=np.complex128)
    return float(np.max(np.abs(dagger(U) @ U - np.eye(U.shape[0]))))


def require_unitary(U, tol: float | None = None) -> np.ndarray:
    M = as_matrix(U)
    tol = config.get().unitarity if tol is None else tol
    res = unitarity_residual(M)
    if res > tol:
        raise NotUnitary(res, tol)
    return M


def unitary_from_generator(H) -> np.ndarray:
    """``exp(iH)`` for Hermitian ``H`` via its eigendecomposition."""
    spec = hermitian_eigensystem(H, 1e-10)
    V = spec.eigenvectors
    return (V * np.exp(1j * spec.eigenvalues)) @ dagger(V)
