"""Bipartite density matrices, pure states and spectral helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import config
from .errors import BadParameter, BadSupport, DimensionMismatch, ValidationError
from .linalg import (
    as_matrix,
    dagger,
    hermitian_deviation,
    hermitian_eigensystem,
    partial_trace,
    projector,
    symmetric_eigensystem,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state on ``C^dA ⊗ C^dB``.

    Construction checks Hermiticity, unit trace and positivity against the
    current tolerances and raises :class:`ValidationError` naming the
    violated invariant.
    """

    matrix: np.ndarray
    dA: int
    dB: int

    def __post_init__(self):
        M = as_matrix(self.matrix)
        if M.shape[0] != self.dA * self.dB:
            raise DimensionMismatch(f"matrix of dimension {M.shape[0]} does not split as {self.dA}x{self.dB}")
        tol = config.get()
        dev = hermitian_deviation(M)
        if dev > tol.hermiticity:
            raise ValidationError(f"hermiticity violated: max |rho - rho^H| = {dev:.3e}")
        tr = np.trace(M)
        if abs(tr - 1.0) > tol.trace:
            raise ValidationError(f"unit-trace violated: Tr(rho) = {tr.real:.12g}")
        M = 0.5 * (M + dagger(M))
        object.__setattr__(self, "matrix", _frozen(M))
        lam_min = float(self.eigenvalues[-1])
        if lam_min < -tol.psd:
            raise ValidationError(f"positivity violated: minimum eigenvalue {lam_min:.3e}")

    @property
    def dim(self) -> int:
        return self.dA * self.dB

    @cached_property
    def spectrum(self):
        # the stored matrix is exactly Hermitian after construction
        return symmetric_eigensystem(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    def conjugated(self, U) -> DensityMatrix:
        """The state ``U rho U^dagger``."""
        U = np.asarray(U, dtype=np.complex128)
        return DensityMatrix(U @ self.matrix @ dagger(U), self.dA, self.dB)

    @classmethod
    def maximally_mixed(cls, dA: int, dB: int | None = None) -> DensityMatrix:
        dB = dA if dB is None else dB
        n = dA * dB
        return cls(np.eye(n) / n, dA, dB)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dA: int
    dB: int

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if v.shape[0] != self.dA * self.dB:
            raise DimensionMismatch(f"vector of length {v.shape[0]} does not split as {self.dA}x{self.dB}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > config.get().pure_norm:
            raise ValidationError(f"unit-norm violated: |psi| = {norm:.15g}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    def density(self) -> DensityMatrix:
        return DensityMatrix(projector(self.amplitudes), self.dA, self.dB)

    @classmethod
    def from_schmidt(cls, coefficients: Sequence[float], d: int) -> PureState:
        """``sum_j sqrt(q_j) |jj>`` from squared Schmidt coefficients ``q``."""
        q = np.asarray(coefficients, dtype=float)
        if q.shape[0] > d or np.any(q < 0):
            raise BadParameter("Schmidt weights must be nonnegative and at most d in number")
        v = np.zeros(d * d, dtype=np.complex128)
        for j, qj in enumerate(q):
            v[j * d + j] = np.sqrt(qj)
        return cls(v, d, d)


def default_support(k: int, d: int) -> list[int]:
    """Basis indices used when none are given.

    ``k = 1`` gives ``{0}``, otherwise ``{0, ..., k-2} ∪ {d-1}``; for qutrits this
    yields |00>, (|00>+|22>)/√2 and (|00>+|11>+|22>)/√3.
    """
    if k == 1:
        return [0]
    return list(range(k - 1)) + [d - 1]


def maximally_entangled(k: int, d: int, support: Sequence[int] | None = None) -> PureState:
    if not 1 <= k <= d:
        raise BadSupport(f"need 1 <= k <= d, got k={k}, d={d}")
    support = default_support(k, d) if support is None else list(support)
    if len(support) != k or len(set(support)) != k or any(not 0 <= j < d for j in support):
        raise BadSupport(f"support must list {k} distinct indices in [0, {d}), got {support}")
    v = np.zeros(d * d, dtype=np.complex128)
    for j in support:
        v[j * d + j] = 1.0 / np.sqrt(k)
    return PureState(v, d, d)


def isotropic_like(k: int, d: int, p: float, support: Sequence[int] | None = None) -> DensityMatrix:
    """``p |phi_k><phi_k| + (1-p)/d^2 I``."""
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"p must lie in [0, 1], got {p}")
    P = _phi_projector(k, d, None if support is None else tuple(support))
    n = d * d
    return DensityMatrix(p * P + (1.0 - p) / n * np.eye(n), d, d)


@lru_cache(maxsize=64)
def _phi_projector(k: int, d: int, support: tuple[int, ...] | None) -> np.ndarray:
    P = projector(maximally_entangled(k, d, support).amplitudes)
    P.setflags(write=False)
    return P


def purity(rho: DensityMatrix) -> float:
    return float(np.sum(np.abs(rho.matrix) ** 2))


def majorizes(rho: DensityMatrix, sigma: DensityMatrix) -> bool:
    """True when the spectrum of ``rho`` majorizes that of ``sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions differ: {rho.dim} vs {sigma.dim}")
    slack = config.get().majorization
    a = np.cumsum(rho.eigenvalues)
    b = np.cumsum(sigma.eigenvalues)
    return bool(np.all(a >= b - slack))


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return int(self.coefficients.shape[0])

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ak,bk->ab", self.coefficients, self.left, self.right).reshape(-1)


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt form of a pure state from the eigenvectors of its reduced state.

    Only coefficients above the Schmidt cutoff are kept, so ``rank`` is the
    Schmidt rank.
    """
    M = psi.amplitudes.reshape(psi.dA, psi.dB)
    reduced = partial_trace(projector(psi.amplitudes), psi.dA, psi.dB, keep="A")
    left = hermitian_eigensystem(reduced).eigenvectors
    # coefficients as row norms of V^† M rather than sqrt(eigenvalue): a null
    # direction then gives ~1e-16 instead of sqrt(1e-16)
    rows = dagger(left) @ M
    coeffs = np.linalg.norm(rows, axis=1)
    order = np.argsort(-coeffs, kind="stable")
    coeffs, left, rows = coeffs[order], left[:, order], rows[order]
    keep = coeffs > config.get().schmidt_cutoff
    coeffs = coeffs[keep]
    right = rows[keep].T / coeffs
    return SchmidtDecomposition(coeffs, left[:, keep], right)
