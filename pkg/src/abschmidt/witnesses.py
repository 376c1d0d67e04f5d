"""Schmidt-number witnesses and their global-unitary pullbacks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import BadParameter, DimensionMismatch
from .linalg import dagger, eigvalsh, projector, require_hermitian, require_unitary
from .states import DensityMatrix, maximally_entangled


@dataclass(frozen=True, eq=False)
class SchmidtWitness:
    """Hermitian operator nonnegative on every state of Schmidt number ``<= r``.

    For the canonical family ``I - scale |phi+><phi+|`` the scale is ``d/r``.
    """

    matrix: np.ndarray
    r: int
    d: int
    scale: float

    def __post_init__(self):
        M = require_hermitian(self.matrix)
        M = 0.5 * (M + dagger(M))
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def lambda_max(self) -> float:
        return float(eigvalsh(self.matrix)[0])


def canonical_witness(d: int, r: int) -> SchmidtWitness:
    """``I_{d^2} - (d/r) |phi+_d><phi+_d|`` with ``phi+_d`` maximally entangled on all ``d`` levels."""
    if not 1 <= r < d:
        raise BadParameter(f"need 1 <= r < d, got r={r}, d={d}")
    phi = maximally_entangled(d, d, range(d)).amplitudes
    scale = d / r
    return SchmidtWitness(np.eye(d * d) - scale * projector(phi), r, d, scale)


def expectation(W: SchmidtWitness, rho: DensityMatrix) -> float:
    if W.matrix.shape[0] != rho.dim:
        raise DimensionMismatch(f"witness dimension {W.matrix.shape[0]} vs state dimension {rho.dim}")
    val = np.trace(W.matrix @ rho.matrix)
    # both operators are Hermitian, so the imaginary part is rounding only
    assert abs(val.imag) <= 1e-10, val
    return float(val.real)


def conjugate(W: SchmidtWitness, U) -> SchmidtWitness:
    """The pulled-back witness ``U^dagger W U``."""
    U = require_unitary(U)
    return SchmidtWitness(dagger(U) @ W.matrix @ U, W.r, W.d, W.scale)


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    value: float
    unitary: np.ndarray
    witness: SchmidtWitness

    @property
    def pulled_back(self) -> SchmidtWitness:
        return conjugate(self.witness, self.unitary)


def nonmember_certificate(rho: DensityMatrix, W: SchmidtWitness, U) -> WitnessCertificate | None:
    """Certificate that ``rho`` is outside r-ABSN, or ``None`` when ``U^dagger W U`` detects nothing."""
    value = expectation(conjugate(W, U), rho)
    if value < -config.get().witness:
        return WitnessCertificate(value, np.asarray(U, dtype=np.complex128), W)
    return None
