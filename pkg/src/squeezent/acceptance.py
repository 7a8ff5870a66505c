"""Acceptance checks, shared by ``squeezent selftest`` and the test suite.

Each check returns a :class:`CriterionResult`; none of them raise on a
failed comparison.
"""
from dataclasses import dataclass
import math
import time

import numpy as np

from .fock import InitialStateSpec, ModeBasis, build_initial_state
from .lindblad import ReservoirSpec, liouvillian
from .measures import concurrence_wootters, concurrence_x_state, log_negativity, partial_transpose_b
from .linalg import hermitian_eigenvalues
from .oracles import (
    esd_time_vacuum_epr_n1,
    separate_squeezed_rho14,
    separate_squeezed_rho23,
    snapshot_matrix,
    vacuum_snapshot,
)
from .propagate import evolve_expm, evolve_rk4, propagate_expm
from .runner import RunConfig, SweepSpec, _trajectory, esd_time, figure_spec, run_steady, run_sweep

__all__ = ["CriterionResult", "CHECKS", "run_all"]

N_REF = 0.1
M_REF = math.sqrt(N_REF * (N_REF + 1))


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} -- {self.detail} ({self.seconds:.2f} s)"


def _timed(number, title):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - start)
        run.__name__ = fn.__name__
        run.number = number
        return run
    return wrap


@_timed(1, "steady-state photon ratios")
def check_steady_ratios():
    start = time.perf_counter()
    report = run_steady(ReservoirSpec("separate", 1.0, N_REF, None, M_REF, 0.0), 12)
    elapsed = time.perf_counter() - start
    got = report.ratios[1:4]
    want = np.array([0.083, 0.008, 0.002])
    err = np.abs(got - want)
    ok = bool(np.all(err <= 0.001)) and elapsed < 1.0
    return ok, (f"R1..R3 = {got[0]:.5f}, {got[1]:.5f}, {got[2]:.5f} vs 0.083, 0.008, 0.002 "
                f"(max err {err.max():.4f}, tol 0.001; runtime {elapsed:.3f} s)")


def _vacuum_cases():
    for family in ("NOON", "EPR"):
        for n in (1, 2):
            for alpha in (math.pi / 4, 3 * math.pi / 8, 0.3):
                yield family, n, alpha, 0.7


def _oracle_measure(snap, n):
    return snap.measure if n == 1 else snap.extras["log_negativity"]


def _numeric_measure(rho, n):
    return concurrence_wootters(rho).value if n == 1 else log_negativity(rho).value


@_timed(2, "vacuum oracle equivalence")
def check_vacuum_oracles():
    start = time.perf_counter()
    times = np.linspace(0.0, 5.0, 51)
    err_expm = err_rk4 = err_measure = 0.0
    vacuum = ReservoirSpec("separate")
    for family, n, alpha, psi in _vacuum_cases():
        basis = ModeBasis.square(n)
        L = liouvillian(vacuum, basis)
        rho0 = build_initial_state(InitialStateSpec(family, n, alpha, psi), basis)
        for t in times:
            rho = evolve_expm(L, rho0, t)
            snap = vacuum_snapshot(family, n, alpha, psi, t)
            err_expm = max(err_expm, np.max(np.abs(rho.data - snapshot_matrix(snap, basis))))
            err_measure = max(err_measure, abs(_numeric_measure(rho, n) - _oracle_measure(snap, n)))
        traj = evolve_rk4(L, rho0, 5.0, 1e-3, stride=100)
        for t, rho in traj:
            snap = vacuum_snapshot(family, n, alpha, psi, t)
            err_rk4 = max(err_rk4, np.max(np.abs(rho.data - snapshot_matrix(snap, basis))))
    elapsed = time.perf_counter() - start
    ok = err_expm < 1e-10 and err_measure < 1e-10 and err_rk4 < 1e-9 and elapsed < 5.0
    return ok, (f"expm elements {err_expm:.2e}, measures {err_measure:.2e} (tol 1e-10); "
                f"RK4 {err_rk4:.2e} (tol 1e-9); runtime {elapsed:.2f} s")


@_timed(3, "vacuum EPR sudden-death time")
def check_esd_closed_form():
    alpha = 3 * math.pi / 8
    config = RunConfig.from_flat({"family": "EPR", "n": 1, "alpha": alpha, "psi": 0.0})
    L, times, states = _trajectory(config)
    got = esd_time(L, times, states, "concurrence")
    want = esd_time_vacuum_epr_n1(alpha)
    ok = got is not None and abs(got - want) < 1e-4
    return ok, f"numerical {got} vs -ln(1 - cot a) = {want:.6f} (tol 1e-4)"


def _fd_slope(f, h=1e-4):
    # second-order one-sided difference at t = 0
    return (-3 * f(0.0) + 4 * f(h) - f(2 * h)) / (2 * h)


@_timed(4, "separate-reservoir coherence formulas")
def check_squeezed_coherences(n_max=2):
    times = np.linspace(0.0, 5.0, 501)
    alpha, psi = math.pi / 4, 0.0
    basis = ModeBasis.square(n_max)
    worst_amp = worst_slope = 0.0
    worst_case = ""
    for theta in (0.0, math.pi / 2, math.pi):
        L = liouvillian(ReservoirSpec("separate", 1.0, N_REF, None, M_REF, theta), basis)
        for family, labels in (("NOON", (2, 3)), ("EPR", (1, 4))):
            rho0 = build_initial_state(InitialStateSpec(family, 1, alpha, psi), basis)
            traj = propagate_expm(L, rho0, times)
            for t, rho in traj:
                if family == "NOON":
                    want = abs(separate_squeezed_rho23(alpha, psi, N_REF, M_REF, t))
                else:
                    want = abs(separate_squeezed_rho14(alpha, psi, theta, N_REF, M_REF, t))
                err = abs(abs(rho.element(*labels, 1)) - want)
                if err > worst_amp:
                    worst_amp, worst_case = err, f"{family} theta={theta:.4f} kt={t:.2f}"

            def coherence(t, rho0=rho0, labels=labels, L=L):
                rho = evolve_expm(L, rho0, t) if t > 0 else rho0
                return abs(rho.element(*labels, 1))

            slope = _fd_slope(coherence)
            worst_slope = max(worst_slope, abs(slope + (4 * N_REF + 1) / 2 * abs(math.sin(2 * alpha))))
    ok = worst_amp <= 2e-3 and worst_slope <= 1e-6
    return ok, (f"n_max={n_max}: max amplitude error {worst_amp:.2e} at {worst_case} (tol 2e-3); "
                f"t=0 slope error {worst_slope:.2e} (tol 1e-6)")


@_timed(5, "NOON phase independence")
def check_noon_phase_independence():
    base = RunConfig.from_flat({
        "topology": "separate", "family": "NOON", "n": 1, "alpha": math.pi / 3, "psi": 0.4,
        "n_mean": N_REF, "m_mag": M_REF, "observables": "concurrence",
    })
    ds = run_sweep(SweepSpec("theta", 0.0, 2 * math.pi, 9, base), threads=1)
    theta = ds.column("theta")
    conc = ds.column("concurrence")
    ref = conc[theta == 0.0]
    worst = max(np.max(np.abs(conc[theta == th] - ref)) for th in np.unique(theta))
    return worst < 1e-9, f"max |C(t; theta) - C(t; 0)| = {worst:.2e} over 9 phases (tol 1e-9)"


@_timed(6, "revival only for quantum squeezing")
def check_quantum_revival():
    parts = []
    ok = True
    for family in ("NOON", "EPR"):
        for n in (1, 2):
            basis = ModeBasis.square(n)
            rho0 = build_initial_state(InitialStateSpec(family, n, math.pi / 4, 0.0), basis)
            values = []
            for m in (0.0, 0.05, 0.1, M_REF):
                L = liouvillian(ReservoirSpec("common", 1.0, N_REF, None, m, 0.0), basis)
                values.append(_numeric_measure(evolve_expm(L, rho0, 5.0), n))
            ok &= max(values[:3]) < 1e-6 and values[3] > 1e-3
            parts.append(f"{family} n={n}: classical max {max(values[:3]):.1e}, quantum {values[3]:.3f}")
    return ok, "; ".join(parts)


@_timed(7, "opposite-phase sudden death and revival")
def check_opposite_phase():
    config, spec = figure_spec("6", {"points": 3})
    ds = run_sweep(spec, threads=1)
    theta, t, conc = ds.column("theta"), ds.column("t"), ds.column("concurrence")
    at0 = conc[theta == 0.0]
    atpi = conc[np.isclose(theta, math.pi)]
    tpi = t[np.isclose(theta, math.pi)]
    dead = np.flatnonzero(atpi == 0.0)
    revived = dead.size > 0 and np.any(atpi[dead[-1] + 1:] > 1e-3)
    contiguous = dead.size > 0 and np.all(np.diff(dead) == 1)
    ok = bool(np.all(at0 > 0) and contiguous and revived)
    if dead.size:
        window = f"C = 0 on kt in [{tpi[dead[0]]:.2f}, {tpi[dead[-1]]:.2f}], final {atpi[-1]:.3f}"
    else:
        window = "no zero interval"
    return ok, f"theta=0 min C = {at0.min():.3f}; theta=pi: {window}"


@_timed(8, "measure cross-validation")
def check_measure_cross_validation():
    count = 0
    worst_c = 0.0
    for topology in ("separate", "common"):
        for family in ("NOON", "EPR"):
            for m in (0.0, 0.1, M_REF):
                for theta in (0.0, math.pi / 2, math.pi):
                    for alpha in (math.pi / 4, 3 * math.pi / 8):
                        basis = ModeBasis.square(1)
                        L = liouvillian(ReservoirSpec(topology, 1.0, N_REF, None, m, theta), basis)
                        rho0 = build_initial_state(InitialStateSpec(family, 1, alpha, 0.3), basis)
                        for _, rho in evolve_rk4(L, rho0, 5.0, 0.02, stride=1):
                            diff = abs(concurrence_wootters(rho).value - concurrence_x_state(rho).value)
                            worst_c = max(worst_c, diff)
                            count += 1
    worst_n = 0.0
    for family in ("NOON", "EPR"):
        for alpha in (math.pi / 4, 3 * math.pi / 8, 0.3):
            basis = ModeBasis.square(2)
            L = liouvillian(ReservoirSpec("separate"), basis)
            rho0 = build_initial_state(InitialStateSpec(family, 2, alpha, 0.7), basis)
            for t, rho in propagate_expm(L, rho0, np.linspace(0.0, 5.0, 101)):
                snap = vacuum_snapshot(family, 2, alpha, 0.7, t)
                mu = snap.measure
                pt = partial_transpose_b(rho)
                lowest = hermitian_eigenvalues(0.5 * (pt + pt.conj().T)).values[-1]
                worst_n = max(worst_n, abs(min(lowest, 0.0) - min(mu, 0.0)),
                              abs(log_negativity(rho).value - math.log2(1 + 2 * max(0.0, -mu))))
    ok = count >= 10_000 and worst_c < 1e-10 and worst_n < 1e-9
    return ok, (f"Wootters vs X-form {worst_c:.2e} on {count} snapshots (tol 1e-10); "
                f"PT negativity vs block eigenvalues {worst_n:.2e} (tol 1e-9)")


@_timed(9, "structural invariants")
def check_invariants():
    trace = herm = 0.0
    min_eig = math.inf
    for topology in ("separate", "common"):
        for family in ("NOON", "EPR"):
            for n in (1, 2):
                for theta in (0.0, math.pi):
                    basis = ModeBasis.square(n)
                    L = liouvillian(ReservoirSpec(topology, 1.0, N_REF, None, M_REF, theta), basis)
                    rho0 = build_initial_state(InitialStateSpec(family, n, math.pi / 4, 0.0), basis)
                    for _, rho in evolve_rk4(L, rho0, 5.0, 1e-3, stride=50):
                        trace = max(trace, abs(rho.trace() - 1.0))
                        herm = max(herm, rho.hermiticity_error())
                        min_eig = min(min_eig, rho.min_eigenvalue())

    basis = ModeBasis.square(2)
    L = liouvillian(ReservoirSpec("common", 1.0, N_REF, None, M_REF, 0.0), basis)
    rho0 = build_initial_state(InitialStateSpec("NOON", 2, math.pi / 4, 0.0), basis)
    exact = evolve_expm(L, rho0, 1.0).data
    errs = [np.max(np.abs(evolve_rk4(L, rho0, 1.0, h).final.data - exact)) for h in (0.1, 0.05)]
    factor = errs[0] / errs[1]

    base = RunConfig.from_flat({
        "topology": "common", "family": "EPR", "n": 1, "n_mean": N_REF, "samples": 50,
        "step": 0.01, "observables": "concurrence,rho14,trace",
    })
    spec = SweepSpec("m_mag", 0.0, M_REF, 4, base, esd="concurrence")
    identical = run_sweep(spec, threads=1).to_text() == run_sweep(spec, threads=2).to_text()

    ok = trace <= 1e-10 and herm <= 1e-11 and min_eig >= -1e-8 and factor >= 12 and identical
    return ok, (f"trace drift {trace:.1e}, Hermiticity {herm:.1e}, min eigenvalue {min_eig:.1e}; "
                f"RK4 halving factor {factor:.1f} (>= 12); serial/parallel identical: {identical}")


CHECKS = (
    check_steady_ratios,
    check_vacuum_oracles,
    check_esd_closed_form,
    check_squeezed_coherences,
    check_noon_phase_independence,
    check_quantum_revival,
    check_opposite_phase,
    check_measure_cross_validation,
    check_invariants,
)


def run_all(report=print):
    results = []
    for check in CHECKS:
        result = check()
        report(result.line())
        results.append(result)
    return results
