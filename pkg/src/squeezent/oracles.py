"""Closed-form results used as ground truth for the numerical engine.

Vacuum-reservoir solutions are exact (pure amplitude damping). The
squeezed-reservoir coherence formulas are small-N approximations.

Element keys use the literature ket numbering: ``"rho23"`` is the element
between kets 2 and 3 of the n-excitation product basis (see
:func:`squeezent.fock.paper_label_index`). Only the upper triangle and the
diagonal are stored; everything not listed is zero.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .fock import Family, ModeBasis, paper_label_index

__all__ = [
    "AnalyticSnapshot",
    "vacuum_noon_n1",
    "vacuum_epr_n1",
    "vacuum_noon_n2_eigen",
    "vacuum_epr_n2_eigen",
    "vacuum_snapshot",
    "snapshot_matrix",
    "separate_squeezed_rho23",
    "separate_squeezed_rho14",
    "esd_time_vacuum_epr_n1",
    "esd_time_vacuum_epr_n2",
]


@dataclass(frozen=True)
class AnalyticSnapshot:
    time: float
    n: int
    elements: dict
    measure: float | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.elements.items():
            i, j = _parse_key(key)
            if i == j:
                p = complex(value)
                if abs(p.imag) > 1e-15 or not -1e-12 <= p.real <= 1 + 1e-12:
                    raise ValueError(f"population {key} = {value} outside [0, 1]")
        for key, value in self.elements.items():
            i, j = _parse_key(key)
            pi, pj = self.elements.get(_key(i, i)), self.elements.get(_key(j, j))
            if i != j and pi is not None and pj is not None:
                if abs(value) > math.sqrt(abs(pi * pj)) + 1e-12:
                    raise ValueError(f"coherence {key} exceeds sqrt(P_{i} P_{j})")

    def __getitem__(self, key):
        i, j = _parse_key(key)
        if i <= j:
            return complex(self.elements.get(_key(i, j), 0.0))
        return complex(self.elements.get(_key(j, i), 0.0)).conjugate()


def _key(i, j):
    return f"rho{i}{j}"


def _parse_key(key):
    if not (key.startswith("rho") and len(key) == 5):
        raise KeyError(f"malformed element name {key!r}")
    return int(key[3]), int(key[4])


def _check_kt(kt):
    if not kt >= 0:
        raise ValueError(f"kt must be >= 0, got {kt}")


def _damping_probs(n, eta):
    """Probability that an n-photon Fock state keeps k photons, k = 0..n."""
    return [math.comb(n, k) * eta ** k * (1 - eta) ** (n - k) for k in range(n + 1)]


def vacuum_noon_n1(alpha, psi, kt):
    _check_kt(kt)
    e = math.exp(-kt)
    c, s = math.cos(alpha), math.sin(alpha)
    el = {
        "rho11": 1 - e,
        "rho22": e * c * c,
        "rho33": e * s * s,
        "rho23": e * np.exp(1j * psi) * c * s,
    }
    conc = max(0.0, abs(math.sin(2 * alpha)) * e)
    return AnalyticSnapshot(kt, 1, el, conc)


def vacuum_epr_n1(alpha, psi, kt):
    _check_kt(kt)
    e = math.exp(-kt)
    c, s = math.cos(alpha), math.sin(alpha)
    el = {
        "rho11": c * c + (1 - e) ** 2 * s * s,
        "rho22": e * (1 - e) * s * s,
        "rho33": e * (1 - e) * s * s,
        "rho44": e * e * s * s,
        "rho14": e * np.exp(1j * psi) * c * s,
    }
    raw = (abs(math.sin(2 * alpha)) - 2 * (1 - e) * s * s) * e
    return AnalyticSnapshot(kt, 1, el, max(0.0, raw),
                            {"population_gap": 1 - 2 * e * s * s, "c_raw": raw})


def vacuum_noon_n2_eigen(alpha, psi, kt):
    """Doubly excited NOON state in vacuum; ``measure`` is the negative PT eigenvalue.

    The eigenvalue comes from the 2x2 block {|0,0>, |2,2>} of the partial
    transpose, ``[rho11 - sqrt(rho11^2 + 4|rho37|^2)] / 2``. The variant with
    ``|rho37|^2`` in place of ``4|rho37|^2`` is reported as
    ``extras["mu1_printed"]``; it does not give log-negativity 1 for the
    maximally entangled initial state.
    """
    _check_kt(kt)
    e = math.exp(-kt)
    c, s = math.cos(alpha), math.sin(alpha)
    p0, p1, p2 = _damping_probs(2, e)
    r37 = e * e * np.exp(1j * psi) * c * s
    r11 = p0
    el = {
        "rho11": r11,
        "rho22": c * c * p1,
        "rho33": c * c * p2,
        "rho44": s * s * p1,
        "rho77": s * s * p2,
        "rho37": r37,
    }
    mu1 = 0.5 * (r11 - math.sqrt(r11 * r11 + 4 * abs(r37) ** 2))
    printed = 0.5 * (r11 - math.sqrt(r11 * r11 + abs(r37) ** 2))
    return AnalyticSnapshot(kt, 2, el, mu1, {
        "log_negativity": math.log2(1 - 2 * mu1),
        "mu1_printed": printed,
        "log_negativity_printed": math.log2(1 - 2 * printed),
    })


def vacuum_epr_n2_eigen(alpha, kt, psi=0.0):
    """Doubly excited EPR state in vacuum; ``measure`` is the PT eigenvalue mu2.

    ``mu2 = [(1 - e^{-kt})^2 sin^2(alpha) - |sin 2alpha| / 2] e^{-2kt}``;
    the state is entangled iff mu2 < 0. ``psi`` only enters rho19.
    """
    _check_kt(kt)
    e = math.exp(-kt)
    c, s = math.cos(alpha), math.sin(alpha)
    p = _damping_probs(2, e)
    el = {}
    for label in range(1, 10):
        na, nb = divmod(label - 1, 3)
        el[_key(label, label)] = s * s * p[na] * p[nb]
    el["rho11"] += c * c
    el["rho19"] = e * e * np.exp(1j * psi) * c * s
    mu2 = ((1 - 2 * e + e * e) * s * s - 0.5 * abs(math.sin(2 * alpha))) * e * e
    return AnalyticSnapshot(kt, 2, el, mu2, {"log_negativity": math.log2(1 + 2 * max(0.0, -mu2))})


def vacuum_snapshot(family, n, alpha, psi, kt):
    """Dispatch to the vacuum oracle for ``family`` and excitation ``n``."""
    family = Family(str(family).upper()) if not isinstance(family, Family) else family
    if n == 1:
        f = vacuum_noon_n1 if family is Family.NOON else vacuum_epr_n1
        return f(alpha, psi, kt)
    if n == 2:
        if family is Family.NOON:
            return vacuum_noon_n2_eigen(alpha, psi, kt)
        return vacuum_epr_n2_eigen(alpha, kt, psi)
    raise ValueError(f"n must be 1 or 2, got {n}")


def snapshot_matrix(snap, basis=None):
    """Embed the listed elements in a full density matrix on ``basis``."""
    if basis is None:
        basis = ModeBasis.square(snap.n)
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    for key, value in snap.elements.items():
        i, j = _parse_key(key)
        a, b = paper_label_index(i, snap.n, basis), paper_label_index(j, snap.n, basis)
        rho[a, b] = value
        rho[b, a] = np.conj(value)
    return rho


def separate_squeezed_rho23(alpha, psi, n_mean, m_mag, kt):
    """NOON coherence under separate squeezed reservoirs (independent of theta)."""
    _check_kt(kt)
    return (0.5 * np.exp(1j * psi) * math.sin(2 * alpha)
            * math.cosh(2 * m_mag * kt) * math.exp(-(4 * n_mean + 1) * kt))


def separate_squeezed_rho14(alpha, psi, theta, n_mean, m_mag, kt):
    """EPR coherence under separate squeezed reservoirs (depends on theta + psi)."""
    _check_kt(kt)
    bracket = (math.cosh(m_mag * kt) ** 2
               + np.exp(-2j * (theta + psi)) * math.sinh(m_mag * kt) ** 2)
    return 0.5 * math.sin(2 * alpha) * math.exp(-(4 * n_mean + 1) * kt) * np.exp(1j * psi) * bracket


def esd_time_vacuum_epr_n1(alpha):
    """Sudden-death time -ln(1 - cot alpha) for alpha > pi/4, else None."""
    if not 0 < alpha < math.pi / 2:
        raise ValueError(f"alpha must lie in (0, pi/2), got {alpha}")
    if alpha <= math.pi / 4 or math.isclose(alpha, math.pi / 4, rel_tol=0, abs_tol=1e-15):
        return None
    return -math.log(1 - 1 / math.tan(alpha))


def esd_time_vacuum_epr_n2(alpha):
    """Zero of mu2 for the doubly excited EPR state: -ln(1 - sqrt(cot alpha))."""
    if not 0 < alpha < math.pi / 2:
        raise ValueError(f"alpha must lie in (0, pi/2), got {alpha}")
    if alpha <= math.pi / 4 or math.isclose(alpha, math.pi / 4, rel_tol=0, abs_tol=1e-15):
        return None
    return -math.log(1 - math.sqrt(1 / math.tan(alpha)))
