"""Generator bases and the fixed global unitaries used by the qutrit examples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch
from .linalg import dagger, unitary_from_generator

SQ2 = np.sqrt(2.0)
SQ3 = np.sqrt(3.0)
SQ6 = np.sqrt(6.0)


def gellmann_matrix(j: int, k: int, n: int) -> np.ndarray:
    """Generalized Gell-Mann matrix in the Bertlmann-Krammer convention (1-based ``j, k``).

    ``j < k`` gives the symmetric element on (j, k), ``j > k`` the
    antisymmetric one on (k, j), ``j == k < n`` the diagonal element number
    ``j``.
    """
    G = np.zeros((n, n), dtype=np.complex128)
    if j < k:
        G[j - 1, k - 1] = G[k - 1, j - 1] = 1.0
    elif j > k:
        G[k - 1, j - 1] = -1j
        G[j - 1, k - 1] = 1j
    elif j < n:
        G[np.arange(j), np.arange(j)] = 1.0
        G[j, j] = -j
        G *= np.sqrt(2.0 / (j * (j + 1)))
    else:
        raise ValueError("the identity is not a Gell-Mann generator")
    return G


@lru_cache(maxsize=None)
def _basis(n: int) -> tuple[np.ndarray, ...]:
    mats = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            if j == k == n:
                continue
            G = gellmann_matrix(j, k, n)
            G.setflags(write=False)
            mats.append(G)
    return tuple(mats)


def gellmann_basis(n: int) -> list[np.ndarray]:
    """The ``n^2 - 1`` traceless Hermitian generators with ``Tr(G_a G_b) = 2 δ_ab``."""
    return list(_basis(n))


# standard su(3) numbering used in the qutrit examples
G3 = np.diag([1.0, -1.0, 0.0]).astype(np.complex128)
G4 = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=np.complex128)
G5 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=np.complex128)
G8 = np.diag([1.0, 1.0, -2.0]).astype(np.complex128) / SQ3


@dataclass(frozen=True)
class UnitaryParameterization:
    basis: tuple[np.ndarray, ...]
    coefficients: np.ndarray

    @classmethod
    def gellmann(cls, n: int, coefficients=None) -> UnitaryParameterization:
        basis = _basis(n)
        c = np.zeros(len(basis)) if coefficients is None else np.asarray(coefficients, dtype=float)
        if c.shape != (len(basis),):
            raise DimensionMismatch(f"expected {len(basis)} coefficients, got shape {c.shape}")
        return cls(basis, c)

    def generator(self) -> np.ndarray:
        return np.tensordot(self.coefficients, np.asarray(self.basis), axes=1)

    def unitary(self) -> np.ndarray:
        """``exp(i sum_a theta_a G_a)``."""
        return unitary_from_generator(self.generator())


def _ket(i: int, n: int = 9) -> np.ndarray:
    v = np.zeros(n, dtype=np.complex128)
    v[i] = 1.0
    return v


def unitary_u1() -> np.ndarray:
    """Global unitary taking |00> to (|00>+|22>)/√2 on two qutrits."""
    e00, e22 = _ket(0), _ket(8)
    P = np.outer(e00, e00) + np.outer(e22, e22)
    swap = np.outer(e22, e00) - np.outer(e00, e22)
    return np.eye(9) - (SQ2 - 1) / SQ2 * P + swap / SQ2


def unitary_u2() -> np.ndarray:
    """Global unitary taking (|00>+|22>)/√2 to (|00>+|11>+|22>)/√3."""
    U = np.eye(9, dtype=np.complex128)
    a = 1 / SQ3 + 1 / SQ6
    b = -1 / SQ3 + 1 / SQ6
    c = -1 / (2 * SQ3) + 1 / SQ6
    e = 1 / (2 * SQ3) + 1 / SQ6
    U[0, 0], U[0, 8] = a, b
    U[4, 0], U[4, 4], U[4, 8] = c, 1 / SQ2, e
    U[8, 0], U[8, 4], U[8, 8] = c, -1 / SQ2, e
    return U


def rotation_onto(v, target) -> np.ndarray:
    """A unitary ``U`` with ``U v = target`` for unit vectors (phase-corrected Householder)."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    t = np.asarray(target, dtype=np.complex128).reshape(-1)
    overlap = np.vdot(t, v)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-15 else 1.0
    u = v / phase   # now <t|u> is real and nonnegative
    w = u - t
    nw = np.linalg.norm(w)
    n = v.shape[0]
    if nw < 1e-15:
        H = np.eye(n, dtype=np.complex128)
    else:
        w = w / nw
        H = np.eye(n) - 2.0 * np.outer(w, w.conj())
    return H / phase


def conjugate_by(U: np.ndarray, X: np.ndarray) -> np.ndarray:
    return U @ X @ dagger(U)
