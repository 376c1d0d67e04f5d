"""Unitary-orbit search and quantitative measures of non-absoluteness.

The witness family is the global-unitary orbit of the canonical witness
``I - (d/r)|phi+><phi+|``. Over that orbit the minimum expectation value has
the closed form ``1 - (d/r) λ_max(rho)``, which is what the optimizer is
validated against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from . import config
from .errors import BadParameter, DimensionMismatch, NotAViolation, NotUnitary, WrongDimension
from .linalg import dagger, hermitian_eigensystem, unitarity_residual
from .states import DensityMatrix, maximally_entangled, purity
from .unitaries import G3, G4, G5, G8, SQ2, SQ6, UnitaryParameterization, gellmann_basis, rotation_onto
from .witnesses import SchmidtWitness, WitnessCertificate, canonical_witness, conjugate, expectation


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    RESTRICTED_FAMILY = "RestrictedFamily"
    OPTIMIZED = "Optimized"
    SANDWICH_BOUND = "SandwichBound"


@dataclass(frozen=True, eq=False)
class MeasureResult:
    value: float
    certificate: WitnessCertificate | None
    method: Method
    bracket: tuple[float, float] | None = None
    # smallest Tr(U^† W U rho) reached, before clipping at zero
    objective: float | None = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"measure value must be nonnegative, got {self.value}")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not lo - 1e-12 <= self.value <= hi + 1e-12:
                raise ValueError(f"value {self.value} outside bracket {self.bracket}")

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method.value}
        if self.objective is not None:
            out["objective"] = self.objective
        if self.bracket is not None:
            out["bracket"] = list(self.bracket)
        if self.certificate is not None:
            out["certificate_value"] = self.certificate.value
        return out


# Coefficients of the two-qutrit unitary expanded in Gell-Mann tensor products.
# In the uncorrected set alpha_0 and alpha_5 do not give a unitary; the corrected pair comes
# from expanding the |00>,|22> rotation exactly and agrees with the other five.
PRINTED_RHO1_ALPHAS = (
    (7 * SQ2 + 1) / (9 * SQ2),
    (1 - SQ2) / (6 * SQ2),
    (SQ2 - 1) / (6 * SQ6),
    (1 - SQ2) / (4 * SQ2),
    (1 - SQ2) / (4 * SQ6),
    (1 - 5 * SQ2) / (12 * SQ2),
    -1j / (2 * SQ2),
)
CORRECTED_RHO1_ALPHAS = (
    (7 + SQ2) / 9,
    PRINTED_RHO1_ALPHAS[1],
    PRINTED_RHO1_ALPHAS[2],
    PRINTED_RHO1_ALPHAS[3],
    PRINTED_RHO1_ALPHAS[4],
    5 * (1 - SQ2) / (12 * SQ2),
    PRINTED_RHO1_ALPHAS[6],
)


def gellmann_tensor_unitary(alphas) -> np.ndarray:
    """Assemble ``a0 I + a1 (I⊗G3 + G3⊗I) + ... + a6 (G4⊗G5 + G5⊗G4)`` without any check."""
    a0, a1, a2, a3, a4, a5, a6 = alphas
    I3 = np.eye(3)
    k = np.kron
    return (
        a0 * np.eye(9)
        + a1 * (k(I3, G3) + k(G3, I3))
        + a2 * (k(I3, G8) + k(G8, I3))
        + a3 * k(G3, G3)
        + a4 * (k(G3, G8) + k(G8, G3))
        + a5 * k(G8, G8)
        + a6 * (k(G4, G5) + k(G5, G4))
    )


def paper_unitary_rho1(coefficients: str = "corrected", tol: float = 1e-8) -> np.ndarray:
    """The Gell-Mann-expanded unitary optimal for ``p|00><00| + (1-p) I/9``.

    ``coefficients="printed"`` uses the uncorrected set unchanged and raises
    :class:`NotUnitary` with the measured residual (about 0.40).
    """
    if coefficients == "corrected":
        alphas = CORRECTED_RHO1_ALPHAS
    elif coefficients == "printed":
        alphas = PRINTED_RHO1_ALPHAS
    else:
        raise BadParameter(f"coefficients must be 'corrected' or 'printed', got {coefficients!r}")
    U = gellmann_tensor_unitary(alphas)
    res = unitarity_residual(U)
    if res > tol:
        raise NotUnitary(res, tol)
    return U


def _square_dim(rho: DensityMatrix) -> int:
    if rho.dA != rho.dB:
        raise DimensionMismatch(f"measure needs d⊗d states, got {rho.dA}x{rho.dB}")
    return rho.dA


def witness_measure_closed_form(rho: DensityMatrix, r: int) -> MeasureResult:
    """``max{0, (d/r) λ_max(rho) - 1}`` with the unitary rotating the top eigenvector onto ``phi+``."""
    d = _square_dim(rho)
    W = canonical_witness(d, r)
    spec = rho.spectrum
    top = spec.eigenvectors[:, 0]
    phi = maximally_entangled(d, d, range(d)).amplitudes
    U = rotation_onto(top, phi)
    objective = 1.0 - W.scale * float(spec.eigenvalues[0])
    cert = WitnessCertificate(objective, U, W) if objective < -config.get().witness else None
    return MeasureResult(max(0.0, -objective), cert, Method.CLOSED_FORM, objective=objective)


def restricted_measure(rho: DensityMatrix, W: SchmidtWitness, U) -> MeasureResult:
    """Measure evaluated at one fixed (witness, unitary) pair."""
    objective = expectation(conjugate(W, U), rho)
    cert = WitnessCertificate(objective, np.asarray(U), W) if objective < -config.get().witness else None
    return MeasureResult(max(0.0, -objective), cert, Method.RESTRICTED_FAMILY, objective=objective)


@dataclass(frozen=True)
class _Moves:
    """Per-generator data for the coordinate search, stacked for the compiled kernel."""

    vecs: np.ndarray    # (m, n, n) eigenvectors V of each generator
    vals: np.ndarray    # (m, n) eigenvalues
    rot: np.ndarray     # (m, n, n) V^† rho V
    freqs: np.ndarray   # (m, F) distinct gaps λ_a - λ_b, zero padded
    nfreq: np.ndarray   # (m,) number of valid gaps
    bins: np.ndarray    # (m, n*n) flat (a, b) -> gap index


def _moves(n: int, rho: np.ndarray) -> _Moves:
    vecs, vals, rots, fl, bl = [], [], [], [], []
    for G in gellmann_basis(n):
        spec = hermitian_eigensystem(G)
        gaps = np.round(np.subtract.outer(spec.eigenvalues, spec.eigenvalues), 12)
        f, b = np.unique(gaps.reshape(-1), return_inverse=True)
        vecs.append(spec.eigenvectors)
        vals.append(spec.eigenvalues)
        rots.append(dagger(spec.eigenvectors) @ rho @ spec.eigenvectors)
        fl.append(f)
        bl.append(b.reshape(-1))
    width = max(len(f) for f in fl)
    freqs = np.zeros((len(fl), width))
    for i, f in enumerate(fl):
        freqs[i, : len(f)] = f
    return _Moves(
        np.ascontiguousarray(vecs), np.ascontiguousarray(vals), np.ascontiguousarray(rots),
        freqs, np.array([len(f) for f in fl], dtype=np.int64), np.ascontiguousarray(bl, dtype=np.int64),
    )


@numba.njit(cache=True, nogil=True)
def _trig(A, freqs, nf, t):
    acc = 0.0
    for j in range(nf):
        acc += A[j].real * math.cos(t * freqs[j]) - A[j].imag * math.sin(t * freqs[j])
    return acc


@numba.njit(cache=True, nogil=True)
def _ascent(rho, phi, U, vecs, vals, rot, freqs, nfreq, bins, grid_size, max_sweeps, tol):
    # Coordinate ascent of g(U) = <phi|U rho U^†|phi> = <psi|rho|psi>, psi = U^† phi.
    # The move U <- U exp(i t G) sends psi to exp(-i t G) psi, along which g is the
    # trigonometric polynomial sum_f Re(A_f e^{i t f}) over eigenvalue gaps f of G.
    # Each line search scans a grid and refines by successive parabolic interpolation.
    n = rho.shape[0]
    m = vecs.shape[0]
    U = U.copy()
    psi = np.conj(U.T) @ phi
    current = np.vdot(psi, rho @ psi).real
    A = np.zeros(freqs.shape[1], dtype=np.complex128)
    y = np.empty(n, dtype=np.complex128)
    step = 2.0 * math.pi / grid_size
    for _ in range(max_sweeps):
        start = current
        for k in range(m):
            V = vecs[k]
            nf = nfreq[k]
            for a in range(n):
                acc = 0j
                for b in range(n):
                    acc += np.conj(V[b, a]) * psi[b]
                y[a] = acc
            A[:] = 0
            for a in range(n):
                ya = np.conj(y[a])
                for b in range(n):
                    A[bins[k, a * n + b]] += ya * rot[k, a, b] * y[b]
            best_t = 0.0
            best_g = -np.inf
            for i in range(grid_size):
                t = -math.pi + i * step
                g = _trig(A, freqs[k], nf, t)
                if g > best_g:
                    best_t, best_g = t, g
            h = step
            for _r in range(4):
                lo = _trig(A, freqs[k], nf, best_t - h)
                hi = _trig(A, freqs[k], nf, best_t + h)
                denom = lo - 2.0 * best_g + hi
                if denom >= 0.0:
                    break
                t = best_t + 0.5 * h * (lo - hi) / denom
                g = _trig(A, freqs[k], nf, t)
                if g > best_g:
                    best_t, best_g = t, g
                h = max(h * 1e-2, 1e-9)
            if best_g > current:
                lam = vals[k]
                for a in range(n):
                    y[a] *= np.exp(-1j * best_t * lam[a])
                psi = V @ y
                UV = U @ V
                for a in range(n):
                    ph = np.exp(1j * best_t * lam[a])
                    for i in range(n):
                        UV[i, a] *= ph
                U = UV @ np.conj(V.T)
                current = best_g
        if current - start < tol:
            break
    return U


def optimize_violation(
    rho: DensityMatrix,
    r: int,
    budget: int = 32,
    seed: int = 0,
    max_sweeps: int = 200,
) -> MeasureResult:
    """Derivative-free search for the most negative ``Tr(U^† W U rho)`` over global unitaries.

    Each of the ``budget`` restarts starts from ``exp(i sum θ_a G_a)`` with
    uniformly drawn coefficients over the Gell-Mann basis of ``C^{d^2}``, then
    sweeps single-generator moves ``U <- U exp(i t G_a)``, each with a grid
    scan and a parabolic-interpolation line search. Restart ``j`` draws from
    ``SeedSequence(seed).spawn(budget)[j]``, so the outcome does not depend on
    scheduling.
    """
    if budget < 1:
        raise BadParameter(f"budget must be >= 1, got {budget}")
    d = _square_dim(rho)
    W = canonical_witness(d, r)
    n = d * d
    phi = maximally_entangled(d, d, range(d)).amplitudes
    mv = _moves(n, rho.matrix)
    best_g, best_U = -math.inf, None
    for child in np.random.SeedSequence(seed).spawn(budget):
        rng = np.random.default_rng(child)
        theta = rng.uniform(-np.pi, np.pi, n * n - 1)
        U0 = UnitaryParameterization.gellmann(n, theta).unitary()
        U = _ascent(
            rho.matrix, phi, U0, mv.vecs, mv.vals, mv.rot, mv.freqs, mv.nfreq, mv.bins, 64, max_sweeps, 1e-13
        )
        psi = dagger(U) @ phi
        g = float(np.real(np.vdot(psi, rho.matrix @ psi)))
        if g > best_g:
            best_g, best_U = g, U
    objective = expectation(conjugate(W, best_U), rho)
    cert = WitnessCertificate(objective, best_U, W) if objective < -config.get().witness else None
    return MeasureResult(max(0.0, -objective), cert, Method.OPTIMIZED, objective=objective)


def mixing_weight_for_purity(current: float, target: float, n: int) -> float:
    """Smallest ``t >= 0`` with ``purity((rho + t I/n)/(1+t)) <= target``.

    That purity equals ``(P + (2t + t^2)/n)/(1+t)^2``, leading to
    ``(1+t)^2 = 1 + (P - target)/(target - 1/n)``.
    """
    if target <= 1.0 / n:
        raise BadParameter("target purity must exceed that of the maximally mixed state")
    if current <= target:
        return 0.0
    return math.sqrt(1.0 + (current - target) / (target - 1.0 / n)) - 1.0


def random_robustness_upper(rho: DensityMatrix) -> MeasureResult:
    """Upper bound on the random robustness for two qutrits at ``r = 2``.

    The returned ``t`` pushes ``rho`` into the purity ball ``Tr ρ^2 <= 1/8``,
    which certifies 2-ABSN membership. The bracket's lower end is the witness
    bound from the closed-form certificate.
    """
    if rho.dA != 3 or rho.dB != 3:
        raise WrongDimension(f"the purity-ball bound needs a 3x3 state, got {rho.dA}x{rho.dB}")
    t = mixing_weight_for_purity(purity(rho), 0.125, 9)
    lower = robustness_lower_closed_form(rho, 2)
    return MeasureResult(t, None, Method.SANDWICH_BOUND, bracket=(min(lower, t), t))


def grobustness_lower(rho: DensityMatrix, cert: WitnessCertificate) -> float:
    """``-v / λ_max(W̃)``, a lower bound on the generalized robustness from a violation ``v < 0``."""
    v = cert.value
    if v >= 0:
        raise NotAViolation(f"certificate value {v} does not detect anything")
    lam = cert.pulled_back.lambda_max
    return -v / lam


def robustness_lower_closed_form(rho: DensityMatrix, r: int) -> float:
    cert = witness_measure_closed_form(rho, r).certificate
    return 0.0 if cert is None else grobustness_lower(rho, cert)


def measure_ordering_check(rho: DensityMatrix) -> bool:
    """Witness lower bound on the generalized robustness does not exceed the purity-ball upper bound."""
    lower = robustness_lower_closed_form(rho, 2)
    upper = random_robustness_upper(rho).value
    return lower <= upper + 1e-9
