"""Truncated two-mode Fock space: bases, ladder operators, initial states.

Storage order is row-major in the photon numbers, ``index = n_A*(n_max_b+1) + n_B``.
The literature numbering of product kets (labels 1..4 for the single
excitation space, 1..9 for the double excitation space) is reachable only
through :func:`paper_label_index` / :func:`paper_label`.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import BasisMismatch, NumericalFailure
from .linalg import hermitian_eigenvalues

__all__ = [
    "Mode",
    "Family",
    "ModeBasis",
    "InitialStateSpec",
    "DensityMatrix",
    "annihilation",
    "embed",
    "mode_operators",
    "paper_label_index",
    "paper_label",
    "build_initial_state",
]


class Mode(str, Enum):
    A = "A"
    B = "B"


class Family(str, Enum):
    NOON = "NOON"
    EPR = "EPR"


@dataclass(frozen=True)
class ModeBasis:
    n_max_a: int = 2
    n_max_b: int = 2

    def __post_init__(self):
        for name in ("n_max_a", "n_max_b"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")

    @classmethod
    def square(cls, n_max):
        return cls(n_max, n_max)

    @property
    def dim_a(self):
        return self.n_max_a + 1

    @property
    def dim_b(self):
        return self.n_max_b + 1

    @property
    def dim(self):
        return self.dim_a * self.dim_b

    def index(self, n_a, n_b):
        if not (0 <= n_a <= self.n_max_a and 0 <= n_b <= self.n_max_b):
            raise IndexError(f"occupation ({n_a}, {n_b}) outside basis {self}")
        return n_a * self.dim_b + n_b

    def occupations(self, index):
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} outside [0, {self.dim})")
        return divmod(index, self.dim_b)

    def mode_cutoff(self, mode):
        return self.n_max_a if Mode(mode) is Mode.A else self.n_max_b


def annihilation(n_max):
    """Bosonic lowering operator truncated to ``n_max`` photons."""
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def embed(op, mode, basis):
    """Lift a single-mode operator to the two-mode space (identity on the other mode)."""
    op = np.asarray(op, dtype=complex)
    mode = Mode(mode)
    d = basis.dim_a if mode is Mode.A else basis.dim_b
    if op.shape != (d, d):
        raise BasisMismatch(f"operator shape {op.shape} does not match mode {mode.value} dimension {d}")
    if mode is Mode.A:
        return np.kron(op, np.eye(basis.dim_b))
    return np.kron(np.eye(basis.dim_a), op)


def mode_operators(basis):
    """Embedded annihilation operators ``(a_A, a_B)``."""
    return (
        embed(annihilation(basis.n_max_a), Mode.A, basis),
        embed(annihilation(basis.n_max_b), Mode.B, basis),
    )


def _label_side(n):
    if n not in (1, 2):
        raise ValueError(f"paper labels exist for n = 1 or 2, got {n}")
    return n + 1


def paper_label_index(label, n, basis):
    """Storage index of the ket numbered ``label`` in the n-excitation product basis.

    For n=1 the kets are |0,0>,|0,1>,|1,0>,|1,1> (labels 1..4); for n=2 the
    nine kets |n_A, n_B> with n_A, n_B in 0..2 in row-major order (labels 1..9).
    """
    side = _label_side(n)
    if not 1 <= label <= side * side:
        raise ValueError(f"label {label} out of range 1..{side * side} for n={n}")
    if basis.n_max_a < n or basis.n_max_b < n:
        raise ValueError(f"basis {basis} too small for n={n} labels")
    n_a, n_b = divmod(label - 1, side)
    return basis.index(n_a, n_b)


def paper_label(index, n, basis):
    """Inverse of :func:`paper_label_index`."""
    side = _label_side(n)
    n_a, n_b = basis.occupations(index)
    if n_a >= side or n_b >= side:
        raise ValueError(f"index {index} = |{n_a},{n_b}> has no n={n} label")
    return n_a * side + n_b + 1


@dataclass(frozen=True)
class InitialStateSpec:
    family: Family = Family.NOON
    n: int = 1
    alpha: float = math.pi / 4
    psi: float = 0.0

    def __post_init__(self):
        family = self.family if isinstance(self.family, Family) else Family(str(self.family).upper())
        object.__setattr__(self, "family", family)
        if self.n not in (1, 2):
            raise ValueError(f"excitation number must be 1 or 2, got {self.n}")
        if not 0.0 <= self.alpha <= math.pi / 2 + 1e-15:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha}")
        object.__setattr__(self, "psi", float(self.psi) % (2 * math.pi))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A two-mode density matrix (``basis=None`` marks a single-mode state)."""

    data: np.ndarray
    basis: ModeBasis | None = None
    _dim: int = field(init=False, repr=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"density matrix must be square, got {data.shape}")
        if self.basis is not None and data.shape[0] != self.basis.dim:
            raise BasisMismatch(f"matrix of size {data.shape[0]} on basis of dim {self.basis.dim}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "_dim", data.shape[0])

    @property
    def dim(self):
        return self._dim

    def trace(self):
        return np.trace(self.data)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self):
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(hermitian_eigenvalues(herm).values[-1])

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, pos_tol=1e-8):
        if not np.all(np.isfinite(self.data)):
            raise NumericalFailure("density matrix has non-finite entries")
        herm = self.hermiticity_error()
        if herm > herm_tol:
            raise NumericalFailure(f"density matrix not Hermitian (error {herm:.3e})")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise NumericalFailure(f"density matrix trace {tr.real:.15g} != 1")
        lam = self.min_eigenvalue()
        if lam < -pos_tol:
            raise NumericalFailure(f"density matrix not positive (min eigenvalue {lam:.3e})")
        return self

    def element(self, i, j, n):
        """Matrix element rho_ij addressed by paper labels in the n-excitation basis."""
        return self.data[paper_label_index(i, n, self.basis), paper_label_index(j, n, self.basis)]

    def vec(self):
        """Column-stacked vectorisation."""
        return self.data.reshape(-1, order="F")

    @classmethod
    def from_vec(cls, v, basis=None, dim=None):
        if dim is None:
            dim = basis.dim if basis is not None else math.isqrt(len(v))
        return cls(np.asarray(v).reshape(dim, dim, order="F"), basis)


def build_initial_state(spec, basis):
    """Projector onto the NOON or EPR superposition described by ``spec``.

    NOON: cos(alpha)|0,n> + e^{-i psi} sin(alpha)|n,0>
    EPR:  cos(alpha)|0,0> + e^{-i psi} sin(alpha)|n,n>
    """
    n = spec.n
    if basis.n_max_a < n or basis.n_max_b < n:
        raise ValueError(f"basis cutoffs ({basis.n_max_a}, {basis.n_max_b}) below excitation n={n}")
    psi = np.zeros(basis.dim, dtype=complex)
    c, s = math.cos(spec.alpha), math.sin(spec.alpha)
    phase = np.exp(-1j * spec.psi)
    if spec.family is Family.NOON:
        psi[basis.index(0, n)] += c
        psi[basis.index(n, 0)] += phase * s
    else:
        psi[basis.index(0, 0)] += c
        psi[basis.index(n, n)] += phase * s
    return DensityMatrix(np.outer(psi, psi.conj()), basis)
