"""The reduction-map family ``X -> Tr(X) I - k X`` and its one-sided extension."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, DimensionMismatch
from .linalg import as_matrix
from .states import DensityMatrix


def positivity_window(r: int) -> tuple[float, float]:
    """Interval ``(1/(r+1), 1/r]`` of ``k`` for which the map is r- but not (r+1)-positive."""
    if r < 1:
        raise BadParameter(f"r must be >= 1, got {r}")
    return 1.0 / (r + 1), 1.0 / r


@dataclass(frozen=True)
class MapSpec:
    k: float
    r: int
    d: int

    def __post_init__(self):
        if not 1 <= self.r < self.d:
            raise BadParameter(f"need 1 <= r < d, got r={self.r}, d={self.d}")
        lo, hi = positivity_window(self.r)
        if not lo < self.k <= hi:
            raise BadParameter(f"k={self.k} outside the valid window ({lo:.6g}, {hi:.6g}] for r={self.r}")

    @classmethod
    def for_level(cls, r: int, d: int) -> MapSpec:
        """Map at the closed top of the window, ``k = 1/r``."""
        return cls(1.0 / r, r, d)


def apply_reduction(spec: MapSpec, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[0] != spec.d:
        raise DimensionMismatch(f"map acts on dimension {spec.d}, got {X.shape[0]}")
    return np.trace(X) * np.eye(spec.d) - spec.k * X


def id_tensor_reduction(X: np.ndarray, dA: int, d: int, k: float) -> np.ndarray:
    """``(id ⊗ Λ)(X) = Tr_B(X) ⊗ I_d - k X`` on a raw ``dA*d`` square matrix."""
    if X.shape[0] != dA * d:
        raise DimensionMismatch(f"matrix of dimension {X.shape[0]} does not split as {dA}x{d}")
    reduced = np.einsum("ijkj->ik", X.reshape(dA, d, dA, d))
    return np.kron(reduced, np.eye(d)) - k * X


def apply_id_tensor_map(spec: MapSpec, rho: DensityMatrix) -> np.ndarray:
    if rho.dB != spec.d:
        raise DimensionMismatch(f"map acts on dimension {spec.d}, state has dB={rho.dB}")
    return id_tensor_reduction(rho.matrix, rho.dA, spec.d, spec.k)
