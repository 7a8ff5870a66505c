import math

import numpy as np
import pytest
import scipy.linalg

from squeezent.errors import DegenerateSteadyState, NumericalFailure
from squeezent.fock import InitialStateSpec, ModeBasis, build_initial_state
from squeezent.linalg import (
    char_poly,
    expm,
    expm_apply,
    general_eigenvalues_small,
    hermitian_eigenvalues,
    hermitian_eigh,
    nullspace_unit_trace,
)
from squeezent.measures import spin_flip


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return x + x.conj().T


def test_diagonal_spectrum():
    spec = hermitian_eigenvalues(np.diag([0.3, 0.7]))
    assert np.allclose(spec.values, [0.7, 0.3], atol=1e-15)
    assert spec.count == 2


def test_two_by_two_offdiagonal():
    c = 0.5 * np.exp(0.8j)
    spec = hermitian_eigenvalues(np.array([[0, c], [np.conj(c), 0]]))
    assert np.allclose(spec.values, [0.5, -0.5], atol=1e-15)


@pytest.mark.parametrize("n", [3, 4, 9, 13, 25])
def test_jacobi_matches_lapack(n):
    h = random_hermitian(n, n)
    w, v = hermitian_eigh(h)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(np.sort(w) - np.linalg.eigvalsh(h))) < 1e-12 * max(1, np.abs(w).max())
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) < 1e-12
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) < 1e-12 * np.linalg.norm(h)


def test_jacobi_trace_identity_9x9():
    h = random_hermitian(9, 42)
    assert abs(hermitian_eigenvalues(h).values.sum() - np.trace(h).real) < 1e-12


def test_jacobi_block_diagonal_input():
    h = np.zeros((6, 6), dtype=complex)
    h[np.ix_([0, 3, 5], [0, 3, 5])] = random_hermitian(3, 1)
    h[np.ix_([1, 4], [1, 4])] = random_hermitian(2, 2)
    h[2, 2] = -7.0
    w, v = hermitian_eigh(h)
    assert np.max(np.abs(np.sort(w) - np.linalg.eigvalsh(h))) < 1e-13
    assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) < 1e-13


def test_jacobi_degenerate_and_zero():
    assert np.array_equal(hermitian_eigenvalues(np.zeros((3, 3))).values, np.zeros(3))
    w, _ = hermitian_eigh(np.diag([1.0, 2.0, 2.0, 1.0]))
    assert np.array_equal(w, [2.0, 2.0, 1.0, 1.0])


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NumericalFailure):
        hermitian_eigenvalues(np.array([[np.nan, 0], [0, 1]]))


def test_general_eigenvalues_identity_and_nilpotent():
    assert np.allclose(general_eigenvalues_small(np.eye(4)).values, 1)
    assert np.allclose(general_eigenvalues_small(np.array([[0, 1], [0, 0]])).values, 0)


def test_general_eigenvalues_rho_rho_tilde_noon():
    rho = build_initial_state(InitialStateSpec("NOON", 1, math.pi / 4), ModeBasis.square(1))
    lam = general_eigenvalues_small(rho.data @ spin_flip(rho)).values
    assert np.allclose(lam, [1, 0, 0, 0], atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_general_eigenvalues_product_is_determinant(n):
    rng = np.random.default_rng(n)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    lam = general_eigenvalues_small(m).values
    assert abs(np.prod(lam) - np.linalg.det(m)) < 1e-10
    assert np.all(np.diff(lam.real) <= 0)


def test_general_eigenvalues_rejects_large():
    with pytest.raises(ValueError):
        general_eigenvalues_small(np.eye(5))


def test_char_poly():
    m = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(char_poly(m), [1, -6, 11, -6])


@pytest.mark.parametrize("scale", [1e-4, 0.01, 0.3, 1.0, 5.0, 40.0])
def test_expm_matches_scipy(scale):
    rng = np.random.default_rng(7)
    a = scale * (rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))) / 4
    ref = scipy.linalg.expm(a)
    assert np.max(np.abs(expm(a) - ref)) < 1e-12 * max(1, np.abs(ref).max())


def test_expm_apply_basics():
    v = np.array([1.0, 2.0])
    L = np.diag([-1.0, 0.0])
    assert np.array_equal(expm_apply(L, 0.0, v), v)
    assert np.allclose(expm_apply(L, 1.0, v), [math.exp(-1), 2.0], atol=1e-15)
    with pytest.raises(ValueError):
        expm_apply(L, -1.0, v)


def test_expm_semigroup():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    v = rng.normal(size=9) + 0j
    once = expm_apply(a, 2.0, v)
    twice = expm_apply(a, 1.0, expm_apply(a, 1.0, v))
    assert np.max(np.abs(once - twice)) < 1e-11 * np.abs(once).max()


def test_expm_overflow():
    with pytest.raises(NumericalFailure):
        expm(np.array([[1000.0]]))


def test_nullspace_simple_rate_matrix():
    # two-level classical rate equation, stationary (1/3, 2/3)
    L = np.array([[-2.0, 1.0], [2.0, -1.0]])
    x = nullspace_unit_trace(L, np.array([1.0, 1.0]))
    assert np.allclose(x, [1 / 3, 2 / 3], atol=1e-15)


def test_nullspace_degenerate():
    with pytest.raises(DegenerateSteadyState):
        nullspace_unit_trace(np.zeros((3, 3)), np.ones(3))
