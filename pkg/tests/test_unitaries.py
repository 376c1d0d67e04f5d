import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abschmidt.errors import DimensionMismatch
from abschmidt.linalg import unitarity_residual
from abschmidt.sampling import haar_unitary, random_pure, rng_from
from abschmidt.states import maximally_entangled
from abschmidt.unitaries import (
    G3,
    G4,
    G5,
    G8,
    UnitaryParameterization,
    gellmann_basis,
    unitary_u1,
    unitary_u2,
    rotation_onto,
)

import oracles


@pytest.mark.parametrize("n", [2, 3, 4, 9])
def test_gellmann_basis_orthonormal_traceless_hermitian(n):
    basis = gellmann_basis(n)
    assert len(basis) == n * n - 1
    for G in basis:
        assert np.max(np.abs(G - G.conj().T)) <= 1e-12
        assert abs(np.trace(G)) <= 1e-12
    gram = np.array([[np.trace(A @ B) for B in basis] for A in basis])
    assert np.max(np.abs(gram - 2 * np.eye(len(basis)))) <= 1e-10


def test_qutrit_constants_in_basis():
    basis = gellmann_basis(3)
    for G in (G3, G4, G5, G8):
        assert any(np.allclose(G, B) for B in basis)
    assert np.allclose(G3 @ G3 + G8 @ G8, 4 / 3 * np.eye(3))


def test_parameterization_shape_check():
    with pytest.raises(DimensionMismatch):
        UnitaryParameterization.gellmann(3, np.zeros(5))
    assert np.allclose(UnitaryParameterization.gellmann(3).unitary(), np.eye(3))


@given(st.integers(0, 10_000))
def test_parameterized_unitary_is_unitary(seed):
    theta = np.random.default_rng(seed).uniform(-np.pi, np.pi, 80)
    U = UnitaryParameterization.gellmann(9, theta).unitary()
    assert unitarity_residual(U) <= 1e-9


def test_unitary_u1_and_u2():
    U1, U2 = unitary_u1(), unitary_u2()
    assert unitarity_residual(U1) <= 1e-12
    assert unitarity_residual(U2) <= 1e-12
    phi2 = maximally_entangled(2, 3).amplitudes
    phi3 = maximally_entangled(3, 3).amplitudes
    assert np.allclose(U1 @ oracles.ket(0, 9), phi2)
    assert np.allclose(U2 @ phi2, phi3)


@given(st.integers(0, 10_000))
def test_rotation_onto(seed):
    rng = rng_from(seed)
    v = random_pure(3, 3, rng).amplitudes
    t = random_pure(3, 3, rng).amplitudes
    U = rotation_onto(v, t)
    assert unitarity_residual(U) <= 1e-12
    assert np.allclose(U @ v, t, atol=1e-12)


def test_rotation_onto_fixed_points():
    v = oracles.ket(2, 4)
    assert np.allclose(rotation_onto(v, v) @ v, v)
    assert np.allclose(rotation_onto(1j * v, v) @ (1j * v), v)
    U = haar_unitary(4, rng_from(1))
    w = U[:, 0]
    assert np.allclose(rotation_onto(w, -w) @ w, -w)
