"""Entanglement measures: concurrence and logarithmic negativity."""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import NumericalFailure
from .fock import DensityMatrix
from .linalg import general_eigenvalues_small, hermitian_eigh, hermitian_eigenvalues

__all__ = [
    "MeasureKind",
    "MeasureValue",
    "X_FORM_TOL",
    "ZERO_CLAMP",
    "is_x_form",
    "spin_flip",
    "concurrence_x_state",
    "concurrence_wootters",
    "partial_transpose_b",
    "log_negativity",
]

X_FORM_TOL = 1e-10
ZERO_CLAMP = 1e-12

# sigma_y (x) sigma_y in the |00>,|01>,|10>,|11> ordering
SIGMA_YY = np.array(
    [[0, 0, 0, -1],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [-1, 0, 0, 0]],
    dtype=complex,
)

# entries that vanish for an X state: everything off the diagonal and anti-diagonal
_X_MASK = ~(np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool)))


class MeasureKind(str, Enum):
    CONCURRENCE = "concurrence"
    LOG_NEGATIVITY = "log_negativity"


@dataclass(frozen=True)
class MeasureValue:
    kind: MeasureKind
    value: float
    raw: tuple

    def __float__(self):
        return self.value


def _qubit_pair(rho):
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if data.shape != (4, 4):
        raise ValueError(f"concurrence needs the 4-dimensional single-excitation space, got {data.shape}")
    return data


def is_x_form(rho, tol=X_FORM_TOL):
    data = _qubit_pair(rho)
    return bool(np.max(np.abs(data[_X_MASK])) <= tol)


def concurrence_x_state(rho):
    """Closed-form concurrence of an X-shaped two-qubit state.

    ``C = max(0, 2(|r23| - sqrt(r11 r44)), 2(|r14| - sqrt(r22 r33)))``
    with r_ij in the |00>,|01>,|10>,|11> labelling.
    """
    r = _qubit_pair(rho)
    off = np.max(np.abs(r[_X_MASK]))
    if off > X_FORM_TOL:
        raise ValueError(f"state is not X-shaped (largest forbidden entry {off:.3e})")
    p = np.real(np.diag(r))
    c1 = 2.0 * (abs(r[1, 2]) - math.sqrt(max(p[0] * p[3], 0.0)))
    c2 = 2.0 * (abs(r[0, 3]) - math.sqrt(max(p[1] * p[2], 0.0)))
    return MeasureValue(MeasureKind.CONCURRENCE, max(0.0, c1, c2), (c1, c2))


def spin_flip(rho):
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)``."""
    r = _qubit_pair(rho)
    return SIGMA_YY @ r.conj() @ SIGMA_YY


def concurrence_wootters(rho):
    """Wootters concurrence of a general two-qubit state.

    The eigenvalues of ``rho rho~`` are computed (and checked to be real),
    but the square roots entering ``sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)``
    are taken as singular values of ``W^T (sigma_y x sigma_y) W`` with
    ``rho = W W^H``. The two are identical in exact arithmetic; the singular
    values stay accurate to machine precision when an eigenvalue of
    ``rho rho~`` is near zero, where its square root would not.
    """
    r = _qubit_pair(rho)
    lam = general_eigenvalues_small(r @ spin_flip(r)).values
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.max(np.abs(lam.imag)) > 1e-9 * scale:
        raise NumericalFailure(f"rho rho~ has complex eigenvalues {lam}")
    if np.min(lam.real) < -1e-9 * scale:
        raise NumericalFailure(f"rho rho~ has negative eigenvalues {lam.real}")

    w, V = hermitian_eigh(0.5 * (r + r.conj().T))
    if w[-1] < -1e-8:
        raise NumericalFailure(f"state is not positive (min eigenvalue {w[-1]:.3e})")
    W = V * np.sqrt(np.clip(w, 0.0, None))
    s = np.linalg.svd(W.T @ SIGMA_YY @ W, compute_uv=False)
    s = np.sort(s)[::-1]
    raw = s[0] - s[1] - s[2] - s[3]
    return MeasureValue(MeasureKind.CONCURRENCE, max(0.0, raw), (raw, tuple(lam.real)))


def partial_transpose_b(rho):
    """Transpose the mode-B indices: <a b|rho^T_B|a' b'> = <a b'|rho|a' b>."""
    if isinstance(rho, DensityMatrix):
        basis, data = rho.basis, rho.data
        da, db = basis.dim_a, basis.dim_b
    else:
        data = np.asarray(rho, dtype=complex)
        da = db = math.isqrt(data.shape[0])
        if da * db != data.shape[0]:
            raise ValueError("cannot infer subsystem dimensions; pass a DensityMatrix")
    return data.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)


def log_negativity(rho):
    """``log2(1 + 2 |sum of negative eigenvalues of rho^T_B|)``."""
    pt = partial_transpose_b(rho)
    mu = hermitian_eigenvalues(0.5 * (pt + pt.conj().T)).values
    negative = mu[mu < -ZERO_CLAMP]
    total = float(np.sum(negative)) if negative.size else 0.0
    value = math.log2(1.0 + 2.0 * abs(total))
    return MeasureValue(MeasureKind.LOG_NEGATIVITY, value, (total,))
