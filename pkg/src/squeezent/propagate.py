"""Time evolution, steady states and photon statistics."""
from dataclasses import dataclass
import math

import numpy as np

from .errors import NumericalFailure
from .fock import DensityMatrix, Mode
from .linalg import expm, expm_apply, nullspace_unit_trace

__all__ = [
    "Trajectory",
    "evolve_rk4",
    "evolve_expm",
    "propagate_expm",
    "steady_state",
    "mode_populations",
    "photon_ratios",
    "recurrence_residual",
]


@dataclass
class Trajectory:
    """Snapshots ``states[k]`` at ``times[k]`` (units of 1/kappa when kappa=1)."""

    times: np.ndarray
    states: list

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return zip(self.times, self.states)

    @property
    def final(self):
        return self.states[-1]


def _n_steps(t_end, step):
    n = int(round(t_end / step))
    if n == 0 and t_end > 0:
        n = 1
    return n


def evolve_rk4(L, rho0, t_end, step, stride=1):
    """Classical fixed-step RK4 on the vectorised master equation.

    ``t_end / step`` is rounded to an integer number of steps (a step that
    does not divide ``t_end`` is adjusted to ``t_end / n``). A snapshot is
    kept every ``stride`` steps, plus t=0 and the final time. No trace
    renormalisation is applied.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    basis = rho0.basis
    n = _n_steps(t_end, step)
    h = t_end / n if n else step
    M = L.matrix
    y = rho0.vec().copy()
    times = [0.0]
    states = [rho0]
    for k in range(1, n + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = M @ y
            k2 = M @ (y + 0.5 * h * k1)
            k3 = M @ (y + 0.5 * h * k2)
            k4 = M @ (y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % stride == 0 or k == n:
            if not np.all(np.isfinite(y)):
                raise NumericalFailure(f"non-finite state at t = {k * h:.6g}")
            times.append(k * h)
            states.append(DensityMatrix.from_vec(y, basis, rho0.dim))
    return Trajectory(np.array(times), states)


def evolve_expm(L, rho0, t):
    """``exp(t L) rho0`` by the matrix exponential of the dense generator."""
    v = expm_apply(L.matrix, t, rho0.vec())
    return DensityMatrix.from_vec(v, rho0.basis, rho0.dim)


def propagate_expm(L, rho0, times):
    """Exact propagation sampled at ``times``; one exponential per distinct interval."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0) or (len(times) and times[0] < 0):
        raise ValueError("times must be non-negative and strictly increasing")
    y = rho0.vec().copy()
    states = []
    cache = {}
    prev = 0.0
    for t in times:
        dt = t - prev
        if dt > 0:
            key = round(dt, 12)
            if key not in cache:
                cache[key] = expm(dt * L.matrix)
            y = cache[key] @ y
        states.append(DensityMatrix.from_vec(y, rho0.basis, rho0.dim))
        prev = t
    return Trajectory(times, states)


def steady_state(L, validate=True):
    """Unique unit-trace stationary state of ``L`` (Hermitised)."""
    x = nullspace_unit_trace(L.matrix, L.trace_functional())
    X = x.reshape(L.dim, L.dim, order="F")
    rho = DensityMatrix(0.5 * (X + X.conj().T), L.basis)
    if validate:
        rho.validate(herm_tol=1e-10)
    return rho


def mode_populations(rho, mode=Mode.A):
    """Reduced photon-number distribution of one mode."""
    if rho.basis is None:
        return np.real(np.diag(rho.data)).copy()
    b = rho.basis
    P = np.real(np.diag(rho.data)).reshape(b.dim_a, b.dim_b)
    return P.sum(axis=1) if Mode(mode) is Mode.A else P.sum(axis=0)


def photon_ratios(rho, mode=Mode.A, up_to=3):
    """``R_n = P_n / P_0`` for ``n = 1..up_to``."""
    P = mode_populations(rho, mode)
    if P[0] <= 1e-14:
        raise NumericalFailure("vacuum population vanishes; ratios undefined")
    if up_to >= len(P):
        raise ValueError(f"up_to={up_to} exceeds the cutoff {len(P) - 1}")
    return P[1:up_to + 1] / P[0]


def recurrence_residual(rho_ss, spec, n, as_printed=True):
    """Residual of the steady-state population balance at photon number ``n``.

    Single-mode state required. With ``as_printed`` the correlation sum is

        C_n = 1/2 [ sqrt((n+1)(n+2)) (r[n+2,n] + r[n,n+2])
                    - 2 sqrt(n(n+1)) (r[n+1,n-1] + r[n-1,n+1])
                    + sqrt(n(n-1)) (r[n-2,n] - r[n,n-2]) ]

    multiplied by the complex M. Otherwise the balance derived directly from
    the generator is used: the last bracket carries a plus sign and each
    coherence is weighted by the phase of the squeeze term that feeds it
    (the two forms agree at theta=0 apart from that sign).
    """
    if rho_ss.basis is not None:
        raise ValueError("recurrence_residual expects a single-mode state")
    r = rho_ss.data
    n_max = rho_ss.dim - 1
    if not 1 <= n <= n_max - 2:
        raise ValueError(f"n must lie in [1, {n_max - 2}] for cutoff {n_max}")
    N = spec.n_mean_a
    P = np.real(np.diag(r))

    def el(i, j):
        return r[i, j] if 0 <= i <= n_max and 0 <= j <= n_max else 0.0

    up = math.sqrt((n + 1) * (n + 2))
    mid = 2.0 * math.sqrt(n * (n + 1))
    low = math.sqrt(n * (n - 1))
    balance = n * N * P[n - 1] - (2 * n * N + N + n) * P[n] + (N + 1) * (n + 1) * P[n + 1]
    if as_printed:
        c_n = 0.5 * (up * (el(n + 2, n) + el(n, n + 2))
                     - mid * (el(n + 1, n - 1) + el(n - 1, n + 1))
                     + low * (el(n - 2, n) - el(n, n - 2)))
        total = balance + spec.m_complex * c_n
    else:
        m = spec.m_complex
        total = balance + 0.5 * (
            m * (up * el(n + 2, n) - mid * el(n + 1, n - 1) + low * el(n, n - 2))
            + np.conj(m) * (up * el(n, n + 2) - mid * el(n - 1, n + 1) + low * el(n - 2, n))
        )
    return float(abs(total))
