"""Channels on bipartite systems, the ABSNC verdict for covariant channels, and discrimination diagnostics.

A channel here acts on a whole ``n``-dimensional system. For the absolute
channel questions ``n = d^2`` and the system is read as ``B1 ⊗ B2``; for the
discrimination diagnostic the channel acts on subsystem B of a probe.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from . import config
from .criteria import MomentReport, Verdict, map_moments
from .errors import BadParameter, BadPriors, DimensionMismatch, InvalidKraus, NotUnital
from .linalg import dagger, eigvalsh, partial_trace, require_unitary, trace_norm
from .maps import MapSpec, apply_id_tensor_map
from .measures import mixing_weight_for_purity, random_robustness_upper, robustness_lower_closed_form
from .sampling import haar_unitary, random_density, random_pure, random_simplex, rng_from
from .states import DensityMatrix, PureState, purity


class ChannelKind(str, enum.Enum):
    DEPOLARIZING = "Depolarizing"
    KRAUS = "KrausList"


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """CPTP map from dimension ``input_dim`` to ``output_dim``.

    Use the constructors :func:`depolarizing`, :func:`kraus_channel`,
    :func:`unitary_channel` and :func:`identity_channel`, which validate.
    """

    kind: ChannelKind
    input_dim: int
    output_dim: int
    p: float | None = None
    kraus: tuple[np.ndarray, ...] = field(default=(), repr=False)
    label: str = ""

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "input_dim": self.input_dim, "output_dim": self.output_dim}
        if self.p is not None:
            out["p"] = self.p
        if self.kind is ChannelKind.KRAUS:
            out["n_kraus"] = len(self.kraus)
        if self.label:
            out["label"] = self.label
        return out


def depolarizing(p: float, dim: int = 9) -> ChannelSpec:
    """``rho -> p rho + (1-p) Tr(rho) I/dim``."""
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"depolarizing parameter must lie in [0, 1], got {p}")
    if dim < 1:
        raise BadParameter(f"dimension must be positive, got {dim}")
    return ChannelSpec(ChannelKind.DEPOLARIZING, dim, dim, p=float(p), label=f"depolarizing(p={p})")


def kraus_channel(ops: Sequence, label: str = "kraus") -> ChannelSpec:
    if len(ops) == 0:
        raise InvalidKraus("a channel needs at least one Kraus operator")
    mats = []
    for K in ops:
        K = np.array(K, dtype=np.complex128)
        if K.ndim != 2 or not np.all(np.isfinite(K)):
            raise InvalidKraus("Kraus operators must be finite 2-d arrays")
        mats.append(K)
    shape = mats[0].shape
    if any(K.shape != shape for K in mats):
        raise InvalidKraus("Kraus operators must share one shape")
    out_dim, in_dim = shape
    if max(in_dim, out_dim) > config.DIM_CAP:
        raise InvalidKraus(f"Kraus dimension {shape} exceeds the cap {config.DIM_CAP}")
    completeness = sum(dagger(K) @ K for K in mats)
    res = float(np.max(np.abs(completeness - np.eye(in_dim))))
    if res > config.get().kraus:
        raise InvalidKraus(f"sum K^H K deviates from identity by {res:.3e}")
    for K in mats:
        K.setflags(write=False)
    return ChannelSpec(ChannelKind.KRAUS, in_dim, out_dim, kraus=tuple(mats), label=label)


def unitary_channel(U, label: str = "unitary") -> ChannelSpec:
    return kraus_channel([require_unitary(U)], label=label)


def identity_channel(dim: int) -> ChannelSpec:
    return kraus_channel([np.eye(dim)], label="identity")


def weyl_operators(n: int) -> list[np.ndarray]:
    """``X^a Z^b`` for ``a, b = 0..n-1``; an orthogonal unitary basis with ``X^0 Z^0 = I`` first."""
    w = np.exp(2j * np.pi / n)
    X = np.roll(np.eye(n), 1, axis=0)
    Z = np.diag(w ** np.arange(n))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(n) for b in range(n)]


def depolarizing_kraus(p: float, dim: int = 9) -> ChannelSpec:
    """Kraus form of :func:`depolarizing` through the Weyl twirl ``(1/n^2) sum W rho W^H = Tr(rho) I/n``."""
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"depolarizing parameter must lie in [0, 1], got {p}")
    ops = weyl_operators(dim)
    w_rest = (1.0 - p) / dim**2
    kraus = [np.sqrt(p + w_rest) * ops[0]] + [np.sqrt(w_rest) * W for W in ops[1:]]
    return kraus_channel(kraus, label=f"depolarizing-kraus(p={p})")


def _apply_raw(ch: ChannelSpec, X: np.ndarray) -> np.ndarray:
    if ch.kind is ChannelKind.DEPOLARIZING:
        n = ch.input_dim
        return ch.p * X + (1.0 - ch.p) * np.trace(X) * np.eye(n) / n
    return sum(K @ X @ dagger(K) for K in ch.kraus)


def apply_channel(ch: ChannelSpec, rho: DensityMatrix) -> DensityMatrix:
    """``Φ(rho)`` on the whole system; a change of dimension returns a ``(output_dim, 1)`` state."""
    if rho.dim != ch.input_dim:
        raise DimensionMismatch(f"channel takes dimension {ch.input_dim}, state has {rho.dim}")
    out = _apply_raw(ch, rho.matrix)
    if ch.output_dim == ch.input_dim:
        return DensityMatrix(out, rho.dA, rho.dB)
    return DensityMatrix(out, ch.output_dim, 1)


def apply_to_subsystem_b(ch: ChannelSpec, rho: DensityMatrix) -> DensityMatrix:
    """``(id_A ⊗ Φ)(rho)``."""
    if rho.dB != ch.input_dim:
        raise DimensionMismatch(f"channel takes dimension {ch.input_dim}, subsystem B has {rho.dB}")
    dA = rho.dA
    if ch.kind is ChannelKind.DEPOLARIZING:
        n = ch.input_dim
        reduced = partial_trace(rho.matrix, dA, n, keep="A")
        out = ch.p * rho.matrix + (1.0 - ch.p) * np.kron(reduced, np.eye(n) / n)
    else:
        IA = np.eye(dA)
        out = sum(np.kron(IA, K) @ rho.matrix @ dagger(np.kron(IA, K)) for K in ch.kraus)
    return DensityMatrix(out, dA, ch.output_dim)


def is_unital(ch: ChannelSpec) -> bool:
    if ch.kind is ChannelKind.DEPOLARIZING:
        return True
    if ch.input_dim != ch.output_dim:
        return False
    S = sum(K @ dagger(K) for K in ch.kraus)
    return float(np.max(np.abs(S - np.eye(ch.output_dim)))) <= config.get().kraus


def _as_kraus(ch: ChannelSpec) -> tuple[np.ndarray, ...]:
    if ch.kind is ChannelKind.KRAUS:
        return ch.kraus
    return depolarizing_kraus(ch.p, ch.input_dim).kraus


def compose(second: ChannelSpec, first: ChannelSpec) -> ChannelSpec:
    """``second ∘ first``; two depolarizing channels compose in closed form."""
    if first.output_dim != second.input_dim:
        raise DimensionMismatch(f"cannot feed dimension {first.output_dim} into {second.input_dim}")
    if first.kind is ChannelKind.DEPOLARIZING and second.kind is ChannelKind.DEPOLARIZING:
        return depolarizing(first.p * second.p, first.input_dim)
    ops = [K2 @ K1 for K2 in _as_kraus(second) for K1 in _as_kraus(first)]
    return kraus_channel(ops, label=f"{second.label}∘{first.label}")


# -- covariance ---------------------------------------------------------------


@dataclass(frozen=True)
class PassedSamples:
    n: int
    max_residual: float | None = None

    @property
    def passed(self) -> bool:
        return True

    def to_dict(self) -> dict:
        out = {"status": "PassedSamples", "n": self.n}
        if self.max_residual is not None:
            out["max_residual"] = self.max_residual
        return out


@dataclass(frozen=True, eq=False)
class FailedAt:
    unitary: np.ndarray
    state: DensityMatrix
    residual: float

    @property
    def passed(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"status": "FailedAt", "residual": self.residual}


def _adj(X: np.ndarray) -> np.ndarray:
    return np.conj(X).swapaxes(-1, -2)


@lru_cache(maxsize=32)
def _covariance_samples(n: int, samples: int, states: int, seed: int):
    rng = rng_from(seed)
    us = np.stack([haar_unitary(n, rng) for _ in range(samples)])
    rhos = np.stack([random_density(n, 1, rng).matrix for _ in range(states)])
    rotated = us[:, None] @ rhos[None] @ _adj(us)[:, None]
    for arr in (us, rhos, rotated):
        arr.setflags(write=False)
    return us, rhos, rotated


def _apply_batch(ch: ChannelSpec, X: np.ndarray) -> np.ndarray:
    """``_apply_raw`` over the leading axes of a stack of matrices."""
    if ch.kind is ChannelKind.DEPOLARIZING:
        n = ch.input_dim
        tr = np.trace(X, axis1=-2, axis2=-1)[..., None, None]
        return ch.p * X + (1.0 - ch.p) * tr * np.eye(n) / n
    return sum(K @ X @ _adj(K) for K in ch.kraus)


def covariance_probe(ch: ChannelSpec, samples: int = 20, seed: int = 0, states: int = 10) -> PassedSamples | FailedAt:
    """Sampled check of ``Φ(U rho U^H) = U Φ(rho) U^H`` with Haar ``U``; evidence, not proof."""
    if samples < 1 or states < 1:
        raise BadParameter("samples and states must be >= 1")
    if ch.input_dim != ch.output_dim:
        return FailedAt(np.eye(ch.output_dim), DensityMatrix.maximally_mixed(ch.input_dim, 1), np.inf)
    tol = config.get().covariance
    us, rhos, rotated = _covariance_samples(ch.input_dim, samples, states, seed)
    lhs = _apply_batch(ch, rotated)
    rhs = us[:, None] @ _apply_batch(ch, rhos)[None] @ _adj(us)[:, None]
    res = np.max(np.abs(lhs - rhs), axis=(-2, -1))
    bad = np.argwhere(res > tol)
    if len(bad):
        i, j = bad[0]  # row-major, so the first unitary then the first state
        return FailedAt(us[i], DensityMatrix(rhos[j], ch.input_dim, 1), float(res[i, j]))
    return PassedSamples(samples * states, float(res.max()))


# -- annihilation -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DetectionEvidence:
    """Why an output was certified to have Schmidt number above ``r``."""

    min_eigenvalue: float
    moments: MomentReport | None

    @property
    def detected(self) -> bool:
        eig_hit = self.min_eigenvalue < -config.get().detection
        hankel_hit = self.moments is not None and self.moments.verdict is Verdict.VIOLATES
        return eig_hit or hankel_hit

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "moments": None if self.moments is None else self.moments.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class ViolatedAt:
    index: int
    input: PureState
    evidence: DetectionEvidence

    @property
    def passed(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"status": "ViolatedAt", "index": self.index, "evidence": self.evidence.to_dict()}


def detect_above_r(state: DensityMatrix, spec: MapSpec, U=None) -> DetectionEvidence:
    """Map-based test of ``SN(U state U^H) > r``: negative spectrum of ``(id ⊗ Λ)`` or a Hankel violation."""
    rotated = state if U is None else state.conjugated(U)
    lam_min = float(eigvalsh(apply_id_tensor_map(spec, rotated))[-1])
    try:
        report = map_moments(rotated, np.eye(rotated.dim), spec)
    except ArithmeticError:
        report = None
    return DetectionEvidence(lam_min, report)


def default_input_grid(d: int = 3, count: int = 20, seed: int = 0) -> list[PureState]:
    """Uniform Schmidt weights followed by ``count`` seeded points of the simplex."""
    rng = rng_from(seed)
    grid = [PureState.from_schmidt(np.full(d, 1.0 / d), d)]
    grid += [PureState.from_schmidt(random_simplex(d, rng), d) for _ in range(count)]
    return grid


def _local_dim(n: int) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatch(f"channel dimension {n} is not of the form d^2")
    return d


def _resolve_spec(r: int, spec: MapSpec | None, d: int) -> MapSpec:
    if spec is None:
        return MapSpec.for_level(r, d)
    if spec.r != r or spec.d != d:
        raise BadParameter(f"map spec (r={spec.r}, d={spec.d}) does not match r={r}, d={d}")
    return spec


def _as_input(x, d: int) -> PureState:
    if isinstance(x, PureState):
        return x
    return PureState.from_schmidt(x, d)


InputLike = Union[PureState, Sequence[float]]


def annihilating_probe(
    ch: ChannelSpec,
    r: int,
    spec: MapSpec | None = None,
    inputs: Sequence[InputLike] | None = None,
) -> PassedSamples | ViolatedAt:
    """Look for a pure input whose output is certified to have Schmidt number above ``r``.

    Inputs are pure states on ``B1 ⊗ B2`` or Schmidt-weight vectors. The first
    violating input (by index) is reported.
    """
    d = _local_dim(ch.output_dim)
    spec = _resolve_spec(r, spec, d)
    inputs = default_input_grid(_local_dim(ch.input_dim)) if inputs is None else list(inputs)
    if not inputs:
        raise BadParameter("annihilating_probe needs at least one input")
    for i, x in enumerate(inputs):
        psi = _as_input(x, _local_dim(ch.input_dim))
        out = apply_channel(ch, psi.density())
        out = DensityMatrix(out.matrix, d, d)
        ev = detect_above_r(out, spec)
        if ev.detected:
            return ViolatedAt(i, psi, ev)
    return PassedSamples(len(inputs))


class AbsncVerdict(str, enum.Enum):
    MEMBER = "MemberByTheorem5"
    NON_MEMBER = "NonMemberByTheorem5"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class ChannelVerdict:
    covariant: PassedSamples | FailedAt
    annihilating: PassedSamples | ViolatedAt
    absnc: AbsncVerdict

    def to_dict(self) -> dict:
        return {
            "covariant": self.covariant.to_dict(),
            "annihilating": self.annihilating.to_dict(),
            "absnc": self.absnc.value,
        }


def absnc_verdict(
    ch: ChannelSpec,
    r: int,
    spec: MapSpec | None = None,
    samples: int = 20,
    seed: int = 0,
    inputs: Sequence[InputLike] | None = None,
) -> ChannelVerdict:
    """Membership of r-ABSNC for covariant channels, via equivalence with r-annihilation.

    When sampled covariance fails the equivalence is unavailable and the
    verdict is ``Inconclusive`` whatever the annihilation probe finds.
    """
    cov = covariance_probe(ch, samples, seed)
    if inputs is None:
        inputs = default_input_grid(_local_dim(ch.input_dim), seed=seed)
    ann = annihilating_probe(ch, r, spec, inputs)
    if not cov.passed:
        verdict = AbsncVerdict.INCONCLUSIVE
    elif ann.passed:
        verdict = AbsncVerdict.MEMBER
    else:
        verdict = AbsncVerdict.NON_MEMBER
    return ChannelVerdict(cov, ann, verdict)


def unital_composition_check(
    ch1: ChannelSpec,
    ch2: ChannelSpec,
    r: int,
    trials: int = 20,
    seed: int = 0,
    spec: MapSpec | None = None,
) -> bool:
    """No sampled output of ``ch2 ∘ ch1``, under sampled global unitaries, is detected above ``r``.

    ``ch2`` must be unital. A ``False`` is a concrete counterexample.
    """
    if not is_unital(ch2):
        raise NotUnital(f"{ch2.label or ch2.kind.value} does not satisfy sum K K^H = I")
    comp = compose(ch2, ch1)
    d_in = _local_dim(comp.input_dim)
    d = _local_dim(comp.output_dim)
    spec = _resolve_spec(r, spec, d)
    rng = rng_from(seed)
    inputs = default_input_grid(d_in, seed=seed) + [random_pure(d_in, d_in, rng) for _ in range(trials)]
    for psi in inputs:
        out = DensityMatrix(apply_channel(comp, psi.density()).matrix, d, d)
        for U in [np.eye(d * d)] + [haar_unitary(d * d, rng) for _ in range(trials)]:
            if detect_above_r(out, spec, U).detected:
                return False
    return True


# -- discrimination -------------------------------------------------------------


def helstrom_guess(p1: float, ch1: ChannelSpec, p2: float, ch2: ChannelSpec, probe: DensityMatrix) -> float:
    """Optimal binary guess probability ``1/2 + 1/2 |p1 (id⊗Φ1)(rho) - p2 (id⊗Φ2)(rho)|_1``."""
    if min(p1, p2) < 0 or abs(p1 + p2 - 1.0) > config.get().priors:
        raise BadPriors(f"priors must be nonnegative and sum to 1, got {p1}, {p2}")
    o1 = apply_to_subsystem_b(ch1, probe).matrix
    o2 = apply_to_subsystem_b(ch2, probe).matrix
    return min(1.0, 0.5 + 0.5 * trace_norm(p1 * o1 - p2 * o2))


def purity_ball_members(count: int, seed: int = 0) -> list[DensityMatrix]:
    """``I/9`` and ``count`` random pure states mixed with noise onto the sphere ``Tr ρ^2 = 1/8``."""
    rng = rng_from(seed)
    out = [DensityMatrix.maximally_mixed(3)]
    for _ in range(count):
        rho = random_pure(3, 3, rng).density()
        t = mixing_weight_for_purity(purity(rho), 0.125, 9)
        M = (rho.matrix + t * np.eye(9) / 9) / (1.0 + t)
        out.append(DensityMatrix(M, 3, 3))
    return out


@dataclass(frozen=True)
class DiscriminationRow:
    p_probe: float
    p_member_best: float
    ratio: float
    bound_bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "p_probe": self.p_probe,
            "p_member_best": self.p_member_best,
            "ratio": self.ratio,
            "bound_bracket": list(self.bound_bracket),
        }


def discrimination_report(
    probe: DensityMatrix,
    tasks: Sequence[tuple[float, ChannelSpec, float, ChannelSpec]],
    r: int = 2,
    members: int = 32,
    seed: int = 0,
) -> list[DiscriminationRow]:
    """Guess-probability ratio of ``probe`` against sampled 2-ABSN members, next to ``1 + M_GR`` bounds.

    The member optimum is a sampled lower bound on the true one, so the ratio
    can overshoot the bracket; rows are data, not assertions.
    """
    if not tasks:
        return []
    if probe.dA != 3 or probe.dB != 3 or r != 2:
        raise BadParameter("the discrimination diagnostic is available for two qutrits at r = 2")
    pool = purity_ball_members(members, seed)
    lower = robustness_lower_closed_form(probe, r)
    upper = random_robustness_upper(probe).value
    rows = []
    for p1, ch1, p2, ch2 in tasks:
        p_probe = helstrom_guess(p1, ch1, p2, ch2, probe)
        best = max(helstrom_guess(p1, ch1, p2, ch2, m) for m in pool)
        rows.append(DiscriminationRow(p_probe, best, p_probe / best, (1.0 + lower, 1.0 + max(lower, upper))))
    return rows
