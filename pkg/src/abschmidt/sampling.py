"""Seeded random unitaries and states.

Every sampler takes a ``numpy.random.Generator``; callers own the seeding.
"""

from __future__ import annotations

import numpy as np

from .linalg import dagger, projector
from .states import DensityMatrix, PureState


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    # QR of a Ginibre matrix with the phases of diag(R) divided out (Mezzadri).
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_simplex(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the probability simplex with ``n`` vertices."""
    x = rng.exponential(size=n)
    return x / x.sum()


def random_pure(dA: int, dB: int, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(dA * dB) + 1j * rng.standard_normal(dA * dB)
    return PureState(v / np.linalg.norm(v), dA, dB)


def random_schmidt_rank_state(d: int, r: int, rng: np.random.Generator) -> PureState:
    """Pure state on ``d ⊗ d`` of Schmidt rank at most ``r`` in random local bases."""
    q = np.zeros(d)
    q[:r] = random_simplex(r, rng)
    core = PureState.from_schmidt(q, d).amplitudes
    UA = haar_unitary(d, rng)
    UB = haar_unitary(d, rng)
    v = np.kron(UA, UB) @ core
    return PureState(v / np.linalg.norm(v), d, d)


def certified_sn_state(d: int, r: int, rng: np.random.Generator, terms: int | None = None) -> DensityMatrix:
    """Convex mixture of Schmidt-rank-``<= r`` pure states; its Schmidt number is ``<= r`` by construction."""
    terms = rng.integers(1, 2 * d * d + 1) if terms is None else terms
    w = random_simplex(int(terms), rng)
    M = sum(wi * projector(random_schmidt_rank_state(d, r, rng).amplitudes) for wi in w)
    M = 0.5 * (M + dagger(M))
    return DensityMatrix(M / np.trace(M).real, d, d)


def random_density(dA: int, dB: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Induced-measure random state of the given rank (Hilbert-Schmidt when full rank)."""
    n = dA * dB
    rank = n if rank is None else rank
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    M = G @ dagger(G)
    M = 0.5 * (M + dagger(M))
    return DensityMatrix(M / np.trace(M).real, dA, dB)
