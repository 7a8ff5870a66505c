"""Liouvillians for two cavity modes damped by squeezed-vacuum reservoirs.

Two topologies:

* separate reservoirs -- each mode has its own single-mode squeezed bath;
* common reservoir -- both modes share one two-mode squeezed bath, which
  only correlates *different* modes (no same-mode ``M`` terms).

Every term is stored as ``coef * X rho Y``; the dense superoperator acts on
column-stacked density matrices, ``vec(X rho Y) = (Y^T kron X) vec(rho)``.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
import math

import numpy as np

from .errors import BasisMismatch, UnphysicalParameters
from .fock import DensityMatrix, ModeBasis, annihilation, mode_operators

__all__ = [
    "Topology",
    "Regime",
    "ReservoirSpec",
    "Superoperator",
    "classify_regime",
    "squeezing_from_r",
    "max_squeezing",
    "liouvillian_separate",
    "liouvillian_common",
    "liouvillian",
    "liouvillian_single_mode",
]

PHYSICAL_RTOL = 1e-12


class Topology(str, Enum):
    SEPARATE = "separate"
    COMMON = "common"


class Regime(str, Enum):
    VACUUM = "Vacuum"
    THERMAL = "Thermal"
    CLASSICAL_SQUEEZING = "ClassicalSqueezing"
    QUANTUM_SQUEEZING = "QuantumSqueezing"


def max_squeezing(n_i, n_j=None):
    """Largest admissible correlation |M| for photon numbers N_i (and N_j)."""
    if n_j is None:
        n_j = n_i
    return math.sqrt(n_i * (n_j + 1.0))


def _check_physical(n_mean, m_mag, bound=None):
    if n_mean < 0:
        raise UnphysicalParameters(f"mean photon number must be >= 0, got {n_mean}")
    if m_mag < 0:
        raise UnphysicalParameters(f"|M| must be >= 0, got {m_mag}")
    if bound is None:
        bound = max_squeezing(n_mean)
    if m_mag > bound * (1 + PHYSICAL_RTOL) + 1e-15:
        raise UnphysicalParameters(f"|M| = {m_mag} exceeds sqrt(N(N+1)) = {bound}")


def classify_regime(n_mean, m_mag):
    """Vacuum / thermal / classical / quantum squeezing; |M| = N counts as classical."""
    _check_physical(n_mean, m_mag)
    if m_mag == 0:
        return Regime.VACUUM if n_mean == 0 else Regime.THERMAL
    if m_mag <= n_mean:
        return Regime.CLASSICAL_SQUEEZING
    return Regime.QUANTUM_SQUEEZING


def squeezing_from_r(r):
    """(N, |M|) = (sinh^2 r, sinh r cosh r) for an ideal squeezed vacuum."""
    if r < 0:
        raise ValueError("squeezing parameter r must be >= 0")
    return math.sinh(r) ** 2, math.sinh(r) * math.cosh(r)


@dataclass(frozen=True)
class ReservoirSpec:
    """Reservoir parameters; ``n_mean_b`` defaults to ``n_mean_a``.

    ``m_mag`` is the single-mode |M_j| for separate reservoirs and the
    two-mode |M_ij| for the common one; the complex correlation is
    ``m_mag * exp(-i theta)``.
    """

    topology: Topology = Topology.SEPARATE
    kappa: float = 1.0
    n_mean_a: float = 0.0
    n_mean_b: float | None = None
    m_mag: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.n_mean_b is None:
            object.__setattr__(self, "n_mean_b", self.n_mean_a)
        if not self.kappa > 0:
            raise UnphysicalParameters(f"kappa must be > 0, got {self.kappa}")
        for value in (self.n_mean_a, self.n_mean_b, self.m_mag, self.theta):
            if not math.isfinite(value):
                raise UnphysicalParameters("reservoir parameters must be finite")
        if min(self.n_mean_a, self.n_mean_b) < 0:
            raise UnphysicalParameters("mean photon numbers must be >= 0")
        _check_physical(self.n_mean_a, self.m_mag, self.m_bound)
        _check_physical(self.n_mean_b, self.m_mag, self.m_bound)

    @property
    def m_bound(self):
        na, nb = self.n_mean_a, self.n_mean_b
        if self.topology is Topology.SEPARATE:
            return min(max_squeezing(na), max_squeezing(nb))
        return min(max_squeezing(na, nb), max_squeezing(nb, na))

    @property
    def m_complex(self):
        return self.m_mag * np.exp(-1j * self.theta)

    @property
    def regime(self):
        return classify_regime(min(self.n_mean_a, self.n_mean_b), self.m_mag)

    @classmethod
    def maximal(cls, topology, n_mean, theta=0.0, kappa=1.0):
        """Ideal squeezed vacuum, |M| = sqrt(N(N+1))."""
        return cls(topology, kappa, n_mean, n_mean, max_squeezing(n_mean), theta)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map ``rho -> sum_k coef_k X_k rho Y_k``."""

    dim: int
    terms: tuple
    basis: ModeBasis | None = None
    spec: ReservoirSpec | None = None

    def apply(self, rho):
        """Matrix-free evaluation of d(rho)/dt."""
        if isinstance(rho, DensityMatrix):
            if rho.basis != self.basis:
                raise BasisMismatch("state and generator live on different bases")
            rho = rho.data
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise BasisMismatch(f"expected a {self.dim}x{self.dim} matrix, got {rho.shape}")
        out = np.zeros_like(rho)
        for coef, X, Y in self.terms:
            left = rho if X is None else X @ rho
            out += coef * (left if Y is None else left @ Y)
        return out

    @cached_property
    def matrix(self):
        """Dense ``dim^2 x dim^2`` form for column-stacked vectors."""
        eye = np.eye(self.dim)
        L = np.zeros((self.dim ** 2, self.dim ** 2), dtype=complex)
        for coef, X, Y in self.terms:
            L += coef * np.kron(eye if Y is None else Y.T, eye if X is None else X)
        L.setflags(write=False)
        return L

    def trace_functional(self):
        return np.eye(self.dim).reshape(-1, order="F").astype(complex)

    def __call__(self, rho):
        return self.apply(rho)


def _dissipator(coef, X, Y, Z):
    """Terms of ``coef * (2 X rho Y - Z rho - rho Z)``."""
    return [(2 * coef, X, Y), (-coef, Z, None), (-coef, None, Z)]


def _damping_terms(kappa, a, n_mean):
    ad = a.conj().T
    half = 0.5 * kappa
    return (
        _dissipator(half * (n_mean + 1), a, ad, ad @ a)
        + _dissipator(half * n_mean, ad, a, a @ ad)
    )


def _single_mode_squeeze_terms(kappa, a, m):
    ad = a.conj().T
    half = 0.5 * kappa
    return (
        _dissipator(-half * m, a, a, a @ a)
        + _dissipator(-half * np.conj(m), ad, ad, ad @ ad)
    )


def _clean(terms):
    return tuple((complex(c), X, Y) for c, X, Y in terms if c != 0)


def liouvillian_separate(spec, basis):
    """Generator for two modes, each damped by its own squeezed vacuum."""
    if spec.topology is not Topology.SEPARATE:
        raise ValueError("liouvillian_separate needs a separate-reservoir spec")
    m = spec.m_complex
    terms = []
    for a, n_mean in zip(mode_operators(basis), (spec.n_mean_a, spec.n_mean_b)):
        terms += _damping_terms(spec.kappa, a, n_mean)
        terms += _single_mode_squeeze_terms(spec.kappa, a, m)
    return Superoperator(basis.dim, _clean(terms), basis, spec)


def liouvillian_common(spec, basis):
    """Generator for two modes sharing one two-mode squeezed vacuum.

    Cross-mode correlation terms only, summed over i != j:
    ``-(kappa/2) [M (2 a_j rho a_i - a_i a_j rho - rho a_i a_j) + h.c.-type M* term]``.
    """
    if spec.topology is not Topology.COMMON:
        raise ValueError("liouvillian_common needs a common-reservoir spec")
    m = spec.m_complex
    half = 0.5 * spec.kappa
    a_ops = mode_operators(basis)
    terms = []
    for a, n_mean in zip(a_ops, (spec.n_mean_a, spec.n_mean_b)):
        terms += _damping_terms(spec.kappa, a, n_mean)
    for ai, aj in (a_ops, a_ops[::-1]):
        aid, ajd = ai.conj().T, aj.conj().T
        terms += _dissipator(-half * m, aj, ai, ai @ aj)
        terms += _dissipator(-half * np.conj(m), ajd, aid, aid @ ajd)
    return Superoperator(basis.dim, _clean(terms), basis, spec)


def liouvillian(spec, basis):
    if spec.topology is Topology.SEPARATE:
        return liouvillian_separate(spec, basis)
    return liouvillian_common(spec, basis)


def liouvillian_single_mode(spec, n_max):
    """One mode in its own squeezed bath (uses ``n_mean_a``, ``m_mag``, ``theta``).

    Used for steady-state photon statistics, where only one mode matters.
    """
    _check_physical(spec.n_mean_a, spec.m_mag)
    a = annihilation(n_max)
    terms = _damping_terms(spec.kappa, a, spec.n_mean_a)
    terms += _single_mode_squeeze_terms(spec.kappa, a, spec.m_complex)
    return Superoperator(n_max + 1, _clean(terms), None, spec)
