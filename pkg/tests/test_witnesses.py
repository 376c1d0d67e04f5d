import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abschmidt.errors import BadParameter, DimensionMismatch, NotUnitary
from abschmidt.sampling import certified_sn_state, haar_unitary, random_density, rng_from
from abschmidt.states import DensityMatrix, isotropic_like, maximally_entangled
from abschmidt.unitaries import unitary_u1
from abschmidt.witnesses import canonical_witness, conjugate, expectation, nonmember_certificate

import oracles

MIXED = DensityMatrix.maximally_mixed(3)


def test_canonical_witness_examples():
    phi3 = maximally_entangled(3, 3).amplitudes
    W1 = canonical_witness(3, 1)
    assert np.allclose(W1.matrix, np.eye(9) - 3 * np.outer(phi3, phi3.conj()))
    W2 = canonical_witness(3, 2)
    assert np.allclose(W2.matrix, np.eye(9) - 1.5 * np.outer(phi3, phi3.conj()))
    assert W2.scale == 1.5
    W = canonical_witness(2, 1)
    assert np.allclose(oracles.eigvalsh_desc(W.matrix), [1, 1, 1, -1])
    assert W.lambda_max == pytest.approx(1.0)
    for d, r in ((3, 3), (3, 0)):
        with pytest.raises(BadParameter):
            canonical_witness(d, r)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_w1_on_rho2_closed_form(p):
    assert expectation(canonical_witness(3, 1), isotropic_like(2, 3, p)) == pytest.approx((2 - 5 * p) / 3, abs=1e-12)


def test_w2_on_rho3_sign():
    W2 = canonical_witness(3, 2)
    for p in (0.6, 0.62, 0.63, 0.7):
        assert (expectation(W2, isotropic_like(3, 3, p)) < 0) == (p > 5 / 8)


def test_w1_on_mixed():
    assert expectation(canonical_witness(3, 1), MIXED) == pytest.approx(2 / 3)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        expectation(canonical_witness(2, 1), MIXED)


def test_w1_sign_change_at_two_fifths():
    W1 = canonical_witness(3, 1)
    root = oracles.bisect(lambda p: expectation(W1, isotropic_like(2, 3, p)), 0.0, 1.0)
    assert root == pytest.approx(0.4, abs=1e-9)


def test_conjugate_examples():
    W1 = canonical_witness(3, 1)
    assert np.allclose(conjugate(W1, np.eye(9)).matrix, W1.matrix)
    U1 = unitary_u1()
    for p in np.linspace(0, 1, 11):
        lhs = expectation(conjugate(W1, U1), isotropic_like(1, 3, p))
        assert lhs == pytest.approx((2 - 5 * p) / 3, abs=1e-12)
    with pytest.raises(NotUnitary):
        conjugate(W1, 2 * np.eye(9))


@given(st.integers(0, 10_000))
def test_conjugate_preserves_spectrum_and_pullback(seed):
    rng = rng_from(seed)
    W = canonical_witness(3, int(rng.integers(1, 3)))
    U = haar_unitary(9, rng)
    Wt = conjugate(W, U)
    assert np.max(np.abs(oracles.eigvalsh_desc(Wt.matrix) - oracles.eigvalsh_desc(W.matrix))) <= 1e-10
    rho = random_density(3, 3, rng)
    assert expectation(Wt, rho) == pytest.approx(expectation(W, rho.conjugated(U)), abs=1e-10)


def test_certificates():
    W1, U1 = canonical_witness(3, 1), unitary_u1()
    cert = nonmember_certificate(isotropic_like(1, 3, 0.5), W1, U1)
    assert cert is not None and cert.value == pytest.approx(-1 / 6, abs=1e-12)
    assert np.allclose(cert.unitary, U1)
    assert nonmember_certificate(isotropic_like(1, 3, 0.3), W1, U1) is None
    rng = rng_from(0)
    for r in (1, 2):
        for _ in range(5):
            assert nonmember_certificate(MIXED, canonical_witness(3, r), haar_unitary(9, rng)) is None


@pytest.mark.parametrize("r", [1, 2])
def test_witness_nonnegative_on_certified_states(r):
    # local unitaries keep the Schmidt number, so W must stay nonnegative on every image
    rng = rng_from(100 + r)
    W = canonical_witness(3, r)
    worst = np.inf
    for _ in range(200):
        sigma = certified_sn_state(3, r, rng)
        worst = min(worst, expectation(W, sigma))
        for _ in range(20):
            local = np.kron(haar_unitary(3, rng), haar_unitary(3, rng))
            worst = min(worst, expectation(W, sigma.conjugated(local)))
    assert worst >= -1e-9
