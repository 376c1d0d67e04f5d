"""Moment sequences, Hankel determinant tests and scalar membership criteria."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .errors import SingularNormalizer, TooFewMoments, WrongDimension, ZeroMatrix
from .linalg import dagger, eigvalsh, partial_transpose, require_hermitian, require_unitary
from .maps import MapSpec, id_tensor_reduction
from .states import DensityMatrix, purity


class Verdict(str, enum.Enum):
    CONSISTENT = "ConsistentWithMember"
    VIOLATES = "ViolatesNecessaryCondition"


class BallVerdict(str, enum.Enum):
    CERTIFIED_MEMBER = "CertifiedMember"
    INCONCLUSIVE = "Inconclusive"


def power_sums(eigenvalues: np.ndarray, n_max: int) -> list[float]:
    x = np.asarray(eigenvalues, dtype=float)
    return [float(np.sum(x**n)) for n in range(1, n_max + 1)]


def pt_moments(rho: DensityMatrix, n_max: int = 3) -> list[float]:
    """``p_n = Tr[(rho^{T_A})^n]`` for ``n = 1..n_max``."""
    if n_max < 2:
        raise TooFewMoments(f"n_max must be >= 2, got {n_max}")
    return power_sums(eigvalsh(partial_transpose(rho.matrix, rho.dA, rho.dB, sys="A")), n_max)


def p3_ppt_check(moments: Sequence[float]) -> bool:
    """PPT necessary condition ``p2^2 <= p3 p1``."""
    if len(moments) < 3:
        raise TooFewMoments(f"need p1, p2, p3; got {len(moments)} moments")
    p1, p2, p3 = moments[:3]
    return bool(p2 * p2 <= p3 * p1 + config.get().p3_slack)


def hankel_matrix(moments: Sequence[float], m: int) -> np.ndarray:
    """``(m+1) x (m+1)`` matrix with entry ``(i, j)`` equal to moment number ``i+j+1``."""
    if m < 0 or len(moments) < 2 * m + 1:
        raise TooFewMoments(f"level m={m} needs {2 * m + 1} moments, got {len(moments)}")
    s = np.asarray(moments, dtype=float)
    idx = np.add.outer(np.arange(m + 1), np.arange(m + 1))
    return s[idx]


def hankel_determinants(moments: Sequence[float], max_level: int | None = None) -> list[float]:
    """``det H_m`` for ``m = 1 .. max_level`` (default: as many as the moments allow)."""
    top = (len(moments) - 1) // 2 if max_level is None else max_level
    return [float(np.linalg.det(hankel_matrix(moments, m))) for m in range(1, top + 1)]


@dataclass(frozen=True)
class MomentReport:
    moments: list[float]
    hankel_dets: list[float]
    verdict: Verdict
    min_det: float
    normalizer: float

    @property
    def violating_levels(self) -> list[int]:
        tol = config.get().det
        return [m for m, det in enumerate(self.hankel_dets, start=1) if det < -tol]

    def to_dict(self) -> dict:
        return {
            "moments": self.moments,
            "hankel_dets": self.hankel_dets,
            "verdict": self.verdict.value,
            "min_det": self.min_det,
            "normalizer": self.normalizer,
        }


def normalized_map_output(rho: DensityMatrix, U, spec: MapSpec) -> tuple[np.ndarray, float]:
    """``(id ⊗ Λ)(U rho U^dagger)`` divided by its trace, and that trace."""
    U = require_unitary(U)
    rotated = U @ rho.matrix @ dagger(U)
    out = id_tensor_reduction(rotated, rho.dA, spec.d, spec.k)
    normalizer = float(np.trace(out).real)
    if abs(normalizer) < config.get().normalizer:
        raise SingularNormalizer(f"Tr[(id ⊗ Λ)(U rho U^dagger)] = {normalizer:.3e}")
    out = out / normalizer
    return 0.5 * (out + dagger(out)), normalizer


def moments_report(moments: Sequence[float], normalizer: float = 1.0, max_level: int | None = None) -> MomentReport:
    dets = hankel_determinants(moments, max_level)
    min_det = min(dets) if dets else math.inf
    verdict = Verdict.VIOLATES if min_det < -config.get().det else Verdict.CONSISTENT
    return MomentReport(list(moments), dets, verdict, min_det, normalizer)


def map_moments(rho: DensityMatrix, U, spec: MapSpec, n_max: int = 5, max_level: int | None = None) -> MomentReport:
    """Hankel test on the normalized image of ``U rho U^dagger`` under ``id ⊗ Λ``.

    A violation (any ``det H_m < -det_tol``) certifies that ``rho`` is not an
    r-absolute Schmidt number state. Levels default to all ``m`` with
    ``2m + 1 <= n_max``.
    """
    if n_max < 3:
        raise TooFewMoments(f"n_max must be >= 3, got {n_max}")
    S, normalizer = normalized_map_output(rho, U, spec)
    moments = power_sums(eigvalsh(S), n_max)
    return moments_report(moments, normalizer, max_level)


def theorem3_scan(
    rho: DensityMatrix,
    unitaries: Sequence[np.ndarray],
    spec: MapSpec,
    n_max: int = 5,
    workers: int | None = None,
) -> list[MomentReport]:
    """One :class:`MomentReport` per unitary, in input order."""
    def one(U):
        return map_moments(rho, U, spec, n_max)

    if workers and workers > 1:
        tol = config.get()

        def scoped(U):
            with config.override(**tol.as_dict()):
                return one(U)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(scoped, unitaries))
    return [one(U) for U in unitaries]


@dataclass(frozen=True)
class ScanCertificate:
    index: int
    level: int
    det: float


def scan_certificate(reports: Sequence[MomentReport]) -> ScanCertificate | None:
    """First (unitary index, Hankel level) with a violating determinant, if any."""
    tol = config.get().det
    for i, rep in enumerate(reports):
        for m, det in enumerate(rep.hankel_dets, start=1):
            if det < -tol:
                return ScanCertificate(i, m, det)
    return None


def purity_ball_2absn(rho: DensityMatrix) -> BallVerdict:
    """Purity at most 1/8 certifies membership of 2-ABSN for two qutrits."""
    if rho.dA != 3 or rho.dB != 3:
        raise WrongDimension(f"purity ball applies to 3x3 states only, got {rho.dA}x{rho.dB}")
    if purity(rho) <= 0.125 + config.get().purity_slack:
        return BallVerdict.CERTIFIED_MEMBER
    return BallVerdict.INCONCLUSIVE


def mehta_ratio(A) -> float:
    A = require_hermitian(A)
    tr2 = float(np.sum(np.abs(A) ** 2))
    if tr2 < 1e-15:
        raise ZeroMatrix("Tr(A^2) vanishes")
    return float(np.trace(A).real) / math.sqrt(tr2)


def mehta_psd_check(A) -> bool:
    """Sufficient PSD test ``Tr A / sqrt(Tr A^2) >= sqrt(n - 1)`` for an ``n x n`` Hermitian ``A``."""
    n = np.asarray(A).shape[0]
    # relative slack keeps the exact boundary Tr(rho^2) = 1/8 on the certified side
    return mehta_ratio(A) >= math.sqrt(n - 1) * (1.0 - 1e-12)


def sign_changes(grid: Sequence[float], values: Sequence[float], tol: float | None = None) -> list[float]:
    """Grid points where ``values`` drops below ``-tol`` after being at or above it.

    ``tol`` defaults to ``det_tol`` so rounding noise around an exact zero is
    not reported as a change.
    """
    tol = config.get().det if tol is None else tol
    out = []
    prev_ok = None
    for x, v in zip(grid, values):
        ok = v >= -tol
        if prev_ok and not ok:
            out.append(float(x))
        prev_ok = ok
    return out
