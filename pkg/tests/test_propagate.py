import math

import numpy as np
import pytest

from squeezent.errors import NumericalFailure
from squeezent.fock import DensityMatrix, InitialStateSpec, Mode, ModeBasis, build_initial_state
from squeezent.lindblad import ReservoirSpec, liouvillian, liouvillian_single_mode
from squeezent.propagate import (
    evolve_expm,
    evolve_rk4,
    mode_populations,
    photon_ratios,
    propagate_expm,
    recurrence_residual,
    steady_state,
)

M_MAX = math.sqrt(0.11)


def setup(family="NOON", n=1, topology="separate", n_mean=0.0, m_mag=0.0, theta=0.0, alpha=math.pi / 4, psi=0.0):
    basis = ModeBasis.square(n)
    L = liouvillian(ReservoirSpec(topology, 1.0, n_mean, None, m_mag, theta), basis)
    return L, build_initial_state(InitialStateSpec(family, n, alpha, psi), basis)


def test_rk4_zero_time():
    L, rho0 = setup()
    traj = evolve_rk4(L, rho0, 0.0, 1e-3)
    assert len(traj) == 1
    assert traj.final is rho0


def test_rk4_vacuum_noon_population():
    L, rho0 = setup()
    traj = evolve_rk4(L, rho0, 1.0, 1e-3, stride=1000)
    assert traj.times[-1] == 1.0
    assert abs(traj.final.element(2, 2, 1) - math.exp(-1) / 2) < 1e-9


def test_rk4_stride_and_times():
    L, rho0 = setup()
    traj = evolve_rk4(L, rho0, 1.0, 0.01, stride=10)
    assert np.allclose(traj.times, np.linspace(0, 1, 11))
    assert np.all(np.diff(traj.times) > 0)


def test_rk4_bad_arguments():
    L, rho0 = setup()
    with pytest.raises(ValueError):
        evolve_rk4(L, rho0, 1.0, 0.0)
    with pytest.raises(ValueError):
        evolve_rk4(L, rho0, -1.0, 0.1)


def test_rk4_non_finite_detected():
    L, rho0 = setup(n_mean=0.1)
    with pytest.raises(NumericalFailure):
        # step far outside the stability region blows up
        evolve_rk4(L, rho0, 2000.0, 20.0)


def test_rk4_order_four():
    L, rho0 = setup("EPR", 1, "common", 0.1, M_MAX)
    exact = evolve_expm(L, rho0, 1.0).data
    e1 = np.max(np.abs(evolve_rk4(L, rho0, 1.0, 1e-2).final.data - exact))
    e2 = np.max(np.abs(evolve_rk4(L, rho0, 1.0, 5e-3).final.data - exact))
    assert e1 / e2 >= 12


def test_expm_zero_time_and_semigroup():
    L, rho0 = setup("EPR", 2, "common", 0.1, M_MAX, 0.4)
    assert np.array_equal(evolve_expm(L, rho0, 0.0).data, rho0.data)
    once = evolve_expm(L, rho0, 2.0).data
    twice = evolve_expm(L, evolve_expm(L, rho0, 1.0), 1.0).data
    assert np.max(np.abs(once - twice)) < 1e-11


def test_expm_vacuum_epr_population():
    L, rho0 = setup("EPR")
    rho = evolve_expm(L, rho0, math.log(2))
    assert abs(rho.element(4, 4, 1) - 0.125) < 1e-14


def test_expm_matches_fine_rk4_on_fig2_config():
    L, rho0 = setup("NOON", 1, "separate", 0.1, M_MAX)
    rk = evolve_rk4(L, rho0, 2.0, 1e-4, stride=5000)
    ex = propagate_expm(L, rho0, rk.times)
    for a, b in zip(rk.states, ex.states):
        assert np.max(np.abs(a.data - b.data)) < 1e-10


def test_propagate_expm_times_validated():
    L, rho0 = setup()
    with pytest.raises(ValueError):
        propagate_expm(L, rho0, [0.0, 0.5, 0.5])


def test_steady_state_vacuum():
    L, _ = setup()
    rho = steady_state(L)
    assert abs(rho.data[0, 0] - 1) < 1e-12
    assert np.max(np.abs(rho.data)) == abs(rho.data[0, 0])


def test_steady_state_thermal_geometric():
    L = liouvillian_single_mode(ReservoirSpec("separate", 1.0, 0.1), 12)
    rho = steady_state(L)
    r = photon_ratios(rho, up_to=5)
    assert np.allclose(r, (1 / 11) ** np.arange(1, 6), rtol=0, atol=1e-12)


def test_steady_state_squeezed_is_even():
    # only pairs of photons enter; odd populations vanish
    L = liouvillian_single_mode(ReservoirSpec("separate", 1.0, 0.1, None, M_MAX), 12)
    rho = steady_state(L)
    P = mode_populations(rho)
    assert np.max(P[1::2]) < 1e-12
    assert abs(P[2] / P[0] - 0.045454545) < 1e-6


@pytest.mark.parametrize("topology", ["separate", "common"])
def test_steady_state_is_long_time_limit(topology):
    L, rho0 = setup("EPR", 2, topology, 0.1, M_MAX, 0.7)
    late = evolve_expm(L, rho0, 50.0)
    assert np.max(np.abs(late.data - steady_state(L).data)) < 1e-8


def test_photon_ratios_vacuum_and_errors():
    rho = DensityMatrix(np.diag([1.0, 0, 0]).astype(complex))
    assert np.array_equal(photon_ratios(rho, up_to=2), [0.0, 0.0])
    with pytest.raises(ValueError):
        photon_ratios(rho, up_to=3)
    with pytest.raises(NumericalFailure):
        photon_ratios(DensityMatrix(np.diag([0.0, 1.0, 0]).astype(complex)), up_to=1)


def test_mode_populations_two_mode():
    b = ModeBasis(2, 1)
    rho = build_initial_state(InitialStateSpec("NOON", 1, math.pi / 3), b)
    assert np.allclose(mode_populations(rho, Mode.A), [0.25, 0.75, 0])
    assert np.allclose(mode_populations(rho, Mode.B), [0.75, 0.25])


def test_recurrence_thermal_and_vacuum():
    for n_mean in (0.0, 0.1, 0.7):
        spec = ReservoirSpec("separate", 1.0, n_mean)
        rho = steady_state(liouvillian_single_mode(spec, 12))
        for n in range(1, 11):
            assert recurrence_residual(rho, spec, n) < 1e-12
            assert recurrence_residual(rho, spec, n, as_printed=False) < 1e-12


@pytest.mark.parametrize("theta", [0.0, 0.9, math.pi])
def test_recurrence_squeezed(theta):
    spec = ReservoirSpec("separate", 1.0, 0.1, None, M_MAX, theta)
    rho = steady_state(liouvillian_single_mode(spec, 12))
    derived = [recurrence_residual(rho, spec, n, as_printed=False) for n in range(1, 11)]
    printed = [recurrence_residual(rho, spec, n) for n in range(1, 11)]
    assert max(derived) < 1e-12
    # the printed sign of the last bracket does not balance at even n
    assert printed[1] > 1e-2


def test_recurrence_range_checks():
    spec = ReservoirSpec("separate", 1.0, 0.1)
    rho = steady_state(liouvillian_single_mode(spec, 6))
    with pytest.raises(ValueError):
        recurrence_residual(rho, spec, 5)
    L, rho2 = setup()
    with pytest.raises(ValueError):
        recurrence_residual(rho2, spec, 1)
