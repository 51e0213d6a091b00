import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualframe import numerics
from dualframe.errors import NotHermitian

from reference import numerical_radius as ref_numerical_radius


def _cplx(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_hermitian_eigenvalues_two_by_two():
    # eigenvalues of [[a, b], [conj b, d]] in closed form
    a, d, b = 2.0, -1.0, 1 + 2j
    mid, r = (a + d) / 2, math.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
    w = numerics.hermitian_eigenvalues(np.array([[a, b], [b.conjugate(), d]]))
    assert w == pytest.approx([mid - r, mid + r], abs=1e-14)


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        numerics.hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_general_eigenvalues_sorted_by_modulus():
    w = numerics.general_eigenvalues(np.diag([1.0, -3.0, 2j]))
    assert [abs(z) for z in w] == pytest.approx([3.0, 2.0, 1.0])


def test_radii_of_known_matrices():
    J = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert numerics.spectral_radius(J) == 0.0
    assert numerics.numerical_radius(J) == pytest.approx(0.5, abs=1e-12)
    D = np.diag([1.0, -2.0, 0.5j])
    assert numerics.numerical_radius(D) == pytest.approx(2.0, abs=1e-12)


def test_numerical_radius_rank_one_closed_form():
    f, g = np.array([1.0, 0.0]), np.array([1.0, 1.0])
    E = np.outer(g, f.conj())
    expected = (abs(np.vdot(f, g)) + np.linalg.norm(f) * np.linalg.norm(g)) / 2
    assert numerics.numerical_radius(E) == pytest.approx(expected, abs=1e-12)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_radius_ordering(n, seed):
    A = _cplx(np.random.default_rng(seed), (n, n))
    rho = numerics.spectral_radius(A)
    omega = numerics.numerical_radius(A)
    op = np.linalg.norm(A, 2)
    assert rho <= omega + 1e-10
    assert op / 2 - 1e-10 <= omega <= op + 1e-10
    assert op <= numerics.frobenius_norm(A) + 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_numerical_radius_against_dense_grid(seed):
    A = _cplx(np.random.default_rng(seed), (4, 4))
    assert numerics.numerical_radius(A) == pytest.approx(ref_numerical_radius(A), abs=1e-9)


def test_batch_matches_single(rng):
    A = _cplx(rng, (7, 3, 3))
    batch = numerics.batch_numerical_radius(A)
    assert batch == pytest.approx([numerics.numerical_radius(a) for a in A], abs=1e-13)
    assert numerics.batch_spectral_radius(A) == pytest.approx([numerics.spectral_radius(a) for a in A])


@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_complement_basis(n, extra, seed):
    T = _cplx(np.random.default_rng(seed), (n + extra, n))
    P = numerics.orthonormal_complement_basis(T)
    assert P.shape == (n + extra, extra)
    assert np.allclose(P.conj().T @ P, np.eye(extra), atol=1e-12)
    assert np.allclose(T.conj().T @ P, 0, atol=1e-12)
    assert np.array_equal(P, numerics.orthonormal_complement_basis(T.copy()))


def test_complement_basis_phase_convention():
    T = np.array([[1.0, 0], [0, 1], [1, 1]])
    P = numerics.orthonormal_complement_basis(T)
    assert P[:, 0] == pytest.approx(np.array([1, 1, -1]) / math.sqrt(3))


def test_numerical_rank():
    assert numerics.numerical_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1
    assert numerics.numerical_rank(np.eye(3)) == 3
