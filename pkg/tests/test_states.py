import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abschmidt.errors import BadParameter, BadSupport, DimensionMismatch, ValidationError
from abschmidt.sampling import random_density, random_pure, rng_from
from abschmidt.states import (
    DensityMatrix,
    PureState,
    isotropic_like,
    majorizes,
    maximally_entangled,
    purity,
    schmidt_decompose,
)

import oracles


def test_maximally_entangled_examples():
    assert np.allclose(maximally_entangled(1, 3, [0]).amplitudes, oracles.ket(0, 9))
    phi2 = (oracles.ket(0, 9) + oracles.ket(8, 9)) / np.sqrt(2)
    assert np.allclose(maximally_entangled(2, 3, [0, 2]).amplitudes, phi2)
    assert np.allclose(maximally_entangled(2, 3).amplitudes, phi2)
    phi3 = sum(oracles.ket(4 * j, 9) for j in range(3)) / np.sqrt(3)
    assert np.allclose(maximally_entangled(3, 3, [0, 1, 2]).amplitudes, phi3)


@pytest.mark.parametrize("k, support", [(2, [0, 0]), (2, [0]), (2, [0, 3]), (4, None), (0, None)])
def test_maximally_entangled_bad_support(k, support):
    with pytest.raises(BadSupport):
        maximally_entangled(k, 3, support)


def test_isotropic_examples():
    assert np.allclose(isotropic_like(1, 3, 0.0).matrix, np.eye(9) / 9)
    phi3 = maximally_entangled(3, 3).amplitudes
    assert np.allclose(isotropic_like(3, 3, 1.0).matrix, np.outer(phi3, phi3.conj()))
    vals = isotropic_like(2, 3, 0.5).eigenvalues
    assert np.allclose(vals, [0.5 + 0.5 / 9] + [0.5 / 9] * 8, atol=1e-12)
    assert np.allclose(vals, oracles.eigvalsh_desc(isotropic_like(2, 3, 0.5).matrix), atol=1e-12)


@pytest.mark.parametrize("p", [-0.1, 1.2])
def test_isotropic_bad_p(p):
    with pytest.raises(BadParameter):
        isotropic_like(1, 3, p)


def test_density_validation_names_invariant():
    with pytest.raises(ValidationError, match="unit-trace"):
        DensityMatrix(0.9 * np.eye(9) / 9, 3, 3)
    with pytest.raises(ValidationError, match="hermiticity"):
        M = np.eye(4) / 4
        M[0, 1] = 0.1
        DensityMatrix(M, 2, 2)
    with pytest.raises(ValidationError, match="positivity"):
        DensityMatrix(np.diag([1.5, -0.5, 0, 0]), 2, 2)
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(9) / 9, 2, 3)


def test_density_is_read_only():
    rho = DensityMatrix.maximally_mixed(3)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_pure_state_norm_check():
    with pytest.raises(ValidationError, match="unit-norm"):
        PureState(np.ones(4) / 1.9, 2, 2)


def test_purity_examples():
    assert purity(DensityMatrix.maximally_mixed(3)) == pytest.approx(1 / 9, abs=1e-12)
    assert purity(random_pure(3, 3, rng_from(0)).density()) == pytest.approx(1.0, abs=1e-12)
    rho = isotropic_like(1, 3, 0.5)
    expected = 0.25 + 2 * 0.25 / 9 + 0.25 / 9
    assert purity(rho) == pytest.approx(expected, abs=1e-12)
    assert purity(rho) == pytest.approx(np.trace(rho.matrix @ rho.matrix).real, abs=1e-12)


@given(st.floats(0, 1), st.sampled_from([1, 2, 3]))
def test_isotropic_purity_does_not_depend_on_k(p, k):
    assert purity(isotropic_like(k, 3, p)) == pytest.approx(purity(isotropic_like(1, 3, p)), abs=1e-12)


@given(st.integers(0, 10_000))
def test_purity_range(seed):
    rho = random_density(3, 3, rng_from(seed))
    assert 1 / 9 - 1e-12 <= purity(rho) <= 1 + 1e-12


def test_majorization_examples():
    rng = rng_from(1)
    pure = random_pure(3, 3, rng).density()
    mixed = random_density(3, 3, rng)
    assert majorizes(pure, mixed)
    assert majorizes(mixed, DensityMatrix.maximally_mixed(3))
    a, b = isotropic_like(1, 3, 0.3), isotropic_like(1, 3, 0.6)
    assert not majorizes(a, b)
    assert majorizes(b, a)
    with pytest.raises(DimensionMismatch):
        majorizes(pure, DensityMatrix.maximally_mixed(2))


@given(st.integers(0, 10_000))
def test_majorization_reflexive_transitive_antisymmetric(seed):
    rng = rng_from(seed)
    rhos = [random_density(3, 3, rng, rank=int(rng.integers(1, 10))) for _ in range(3)]
    for r in rhos:
        assert majorizes(r, r)
    a, b, c = rhos
    if majorizes(a, b) and majorizes(b, c):
        assert majorizes(a, c)
    if majorizes(a, b) and majorizes(b, a):
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-9)


def test_schmidt_examples():
    prod = schmidt_decompose(PureState(oracles.ket(0, 9), 3, 3))
    assert prod.rank == 1 and np.allclose(prod.coefficients, [1])
    phi3 = schmidt_decompose(maximally_entangled(3, 3))
    assert phi3.rank == 3 and np.allclose(phi3.coefficients, [3**-0.5] * 3)
    v = (2 * oracles.ket(0, 9) + oracles.ket(4, 9)) / np.sqrt(5)
    dec = schmidt_decompose(PureState(v, 3, 3))
    assert dec.rank == 2
    assert np.allclose(dec.coefficients, [2 / np.sqrt(5), 1 / np.sqrt(5)])
    sv = np.linalg.svd(v.reshape(3, 3), compute_uv=False)
    assert np.allclose(dec.coefficients, sv[:2])


@given(st.integers(0, 10_000), st.sampled_from([(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)]))
def test_schmidt_reconstruction_and_rank(seed, dims):
    rng = rng_from(seed)
    dA, dB = dims
    psi = random_pure(dA, dB, rng)
    dec = schmidt_decompose(psi)
    assert np.all(np.diff(dec.coefficients) <= 1e-15)
    assert np.sum(dec.coefficients**2) == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(dec.reconstruct() - psi.amplitudes)) <= 1e-10
    reduced = oracles.partial_trace_loop(np.outer(psi.amplitudes, psi.amplitudes.conj()), dA, dB, "A")
    assert dec.rank == int(np.sum(np.linalg.eigvalsh(reduced) > 1e-10))


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_schmidt_rank_of_constructed_states(seed, r):
    from abschmidt.sampling import random_schmidt_rank_state

    psi = random_schmidt_rank_state(3, r, rng_from(seed))
    assert schmidt_decompose(psi).rank <= r
