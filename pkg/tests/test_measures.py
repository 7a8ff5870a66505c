import math

import numpy as np
import pytest

from squeezent.errors import NumericalFailure
from squeezent.fock import DensityMatrix, InitialStateSpec, ModeBasis, build_initial_state
from squeezent.lindblad import ReservoirSpec, liouvillian
from squeezent.measures import (
    MeasureKind,
    concurrence_wootters,
    concurrence_x_state,
    is_x_form,
    log_negativity,
    partial_transpose_b,
    spin_flip,
)
from squeezent.propagate import evolve_expm, evolve_rk4

M_MAX = math.sqrt(0.11)
B1 = ModeBasis.square(1)
B2 = ModeBasis.square(2)


def state(family, n, alpha=math.pi / 4, psi=0.0, basis=None):
    return build_initial_state(InitialStateSpec(family, n, alpha, psi), basis or ModeBasis.square(n))


def test_x_state_concurrence_examples():
    assert abs(concurrence_x_state(state("NOON", 1)).value - 1) < 1e-15
    assert concurrence_x_state(DensityMatrix(np.eye(4) / 4, B1)).value == 0
    L = liouvillian(ReservoirSpec("separate"), B1)
    rho = evolve_expm(L, state("NOON", 1), math.log(2))
    assert abs(concurrence_x_state(rho).value - 0.5) < 1e-14


def test_x_state_rejects_non_x():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 1] = rho[1, 0] = 0.1
    assert not is_x_form(rho)
    with pytest.raises(ValueError):
        concurrence_x_state(rho)


def test_wootters_examples():
    product = np.zeros((4, 4), dtype=complex)
    product[2, 2] = 1.0
    assert concurrence_wootters(product).value == 0
    assert abs(concurrence_wootters(state("EPR", 1)).value - 1) < 1e-14
    assert concurrence_wootters(state("EPR", 1)).kind is MeasureKind.CONCURRENCE


def test_wootters_non_x_state():
    # a Bell state rotated off the X pattern by a local unitary
    u = np.array([[math.cos(0.4), -math.sin(0.4)], [math.sin(0.4), math.cos(0.4)]])
    U = np.kron(u, np.eye(2))
    rho = U @ state("EPR", 1, 0.6).data @ U.conj().T
    assert not is_x_form(rho)
    assert abs(concurrence_wootters(rho).value - math.sin(1.2)) < 1e-12


def test_wootters_rejects_bad_input():
    with pytest.raises(ValueError):
        concurrence_wootters(np.eye(9) / 9)
    with pytest.raises(NumericalFailure):
        concurrence_wootters(np.diag([1.5, -0.5, 0, 0]))


def test_spin_flip_of_bell_state():
    rho = state("EPR", 1).data
    assert np.allclose(spin_flip(rho), rho, atol=1e-15)


@pytest.mark.parametrize("topology", ["separate", "common"])
@pytest.mark.parametrize("family", ["NOON", "EPR"])
def test_x_form_preserved_and_measures_agree(topology, family):
    L = liouvillian(ReservoirSpec(topology, 1.0, 0.1, None, M_MAX, 0.8), B1)
    for _, rho in evolve_rk4(L, state(family, 1, 1.0, 0.3), 5.0, 0.01, stride=10):
        assert is_x_form(rho)
        c1 = concurrence_x_state(rho).value
        c2 = concurrence_wootters(rho).value
        assert abs(c1 - c2) < 1e-10
        # n=1 concurrence and negativity see the same boundary
        assert (c1 > 1e-9) == (log_negativity(rho).value > 1e-9)


def test_partial_transpose_properties():
    rho = state("NOON", 2, 0.3, 1.1)
    pt = partial_transpose_b(rho)
    assert np.allclose(partial_transpose_b(DensityMatrix(pt, B2)), rho.data, atol=0)
    assert np.max(np.abs(pt - pt.conj().T)) < 1e-15
    diag = DensityMatrix(np.diag(np.arange(1, 10) / 45.0), B2)
    assert np.array_equal(partial_transpose_b(diag), diag.data)


def test_partial_transpose_noon_block():
    pt = partial_transpose_b(state("NOON", 2))
    i, j = B2.index(0, 0), B2.index(2, 2)
    block = pt[np.ix_([i, j], [i, j])]
    assert np.allclose(np.linalg.eigvalsh(block), [-0.5, 0.5])


def test_partial_transpose_rectangular_basis():
    b = ModeBasis(1, 2)
    rho = build_initial_state(InitialStateSpec("EPR", 1, 0.5), b)
    pt = partial_transpose_b(rho)
    assert pt[b.index(0, 1), b.index(1, 0)] == rho.data[b.index(0, 0), b.index(1, 1)]


def test_log_negativity_examples():
    assert log_negativity(DensityMatrix(np.diag(np.ones(9) / 9), B2)).value == 0
    assert abs(log_negativity(state("NOON", 2)).value - 1) < 1e-13
    expected = math.log2(1 + math.sin(math.pi / 3))
    assert abs(log_negativity(state("NOON", 2, math.pi / 6)).value - expected) < 1e-12
    assert log_negativity(state("NOON", 2)).kind is MeasureKind.LOG_NEGATIVITY


def test_log_negativity_local_phase_invariance():
    L = liouvillian(ReservoirSpec("common", 1.0, 0.1, None, M_MAX, 0.5), B2)
    rho = evolve_expm(L, state("EPR", 2, 0.9, 0.2), 1.3).data
    n_op = np.diag([0, 1, 2])
    for phi in (0.3, 2.0):
        u = np.diag(np.exp(1j * phi * np.diag(n_op)))
        for U in (np.kron(u, np.eye(3)), np.kron(np.eye(3), u)):
            rotated = DensityMatrix(U @ rho @ U.conj().T, B2)
            assert abs(log_negativity(rotated).value - log_negativity(DensityMatrix(rho, B2)).value) < 1e-12


def test_epr_depends_only_on_theta_plus_psi():
    for delta in (math.pi / 3, math.pi / 2):
        La = liouvillian(ReservoirSpec("separate", 1.0, 0.1, None, M_MAX, 0.4), B1)
        Lb = liouvillian(ReservoirSpec("separate", 1.0, 0.1, None, M_MAX, 0.4 + delta), B1)
        ta = evolve_rk4(La, state("EPR", 1, 1.0, 0.9), 5.0, 0.01, stride=10)
        tb = evolve_rk4(Lb, state("EPR", 1, 1.0, 0.9 - delta), 5.0, 0.01, stride=10)
        for (_, ra), (_, rb) in zip(ta, tb):
            assert abs(concurrence_x_state(ra).value - concurrence_x_state(rb).value) < 1e-9
