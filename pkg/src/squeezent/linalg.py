"""Small dense complex linear algebra.

Hand-written kernels sized for this problem: Hermitian matrices up to a few
hundred rows (in practice 4, 9 or 13), general matrices up to 4x4, and
Liouvillians up to a few thousand entries on a side.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyState, NumericalFailure

__all__ = [
    "Spectrum",
    "hermitian_eigh",
    "hermitian_eigenvalues",
    "general_eigenvalues_small",
    "char_poly",
    "expm",
    "expm_apply",
    "nullspace_unit_trace",
]

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by descending real part (ties keep input order)."""

    values: np.ndarray

    @property
    def count(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _descending(values, vectors=None):
    # stable sort on -Re keeps original order for ties
    order = np.argsort(-np.real(values), kind="stable")
    if vectors is None:
        return values[order]
    return values[order], vectors[:, order]


def _round_robin(n):
    """Tournament schedule: n-1 (or n) rounds of disjoint index pairs covering all pairs."""
    players = list(range(n)) + ([None] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a is not None and b is not None]
        if pairs:
            P, Q = zip(*pairs)
            rounds.append((np.array(P), np.array(Q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eigh(H, tol=JACOBI_TOL, vectors=True):
    """Complex Jacobi diagonalisation of a Hermitian matrix.

    Rotations are applied in parallel (round-robin) order: each round
    annihilates a set of disjoint (p, q) pairs at once.

    Returns ``(w, V)`` with ``H = V diag(w) V^H``; ``w`` real, sorted
    descending. Iterates until the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||H||_F)``.
    """
    A = np.array(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalFailure("non-finite entries in Hermitian eigensolver input")
    asym = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if asym > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max |H - H^H| = {asym:.3e})")
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    blocks = _components(A)
    if len(blocks) > 1:
        # exact zeros decouple the problem; solve each block on its own
        w = np.empty(n)
        V = np.zeros((n, n), dtype=complex) if vectors else None
        for idx in blocks:
            wb, Vb = _jacobi(A[np.ix_(idx, idx)], tol, vectors)
            w[idx] = wb
            if vectors:
                V[np.ix_(idx, idx)] = Vb
        if V is None:
            return _descending(w), None
        return _descending(w, V)
    w, V = _jacobi(A, tol, vectors)
    if V is None:
        return _descending(w), None
    return _descending(w, V)


def _components(A):
    """Index sets of the connected components of the nonzero pattern of A."""
    n = A.shape[0]
    linked = A != 0
    seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        member = np.zeros(n, dtype=bool)
        member[start] = True
        frontier = member.copy()
        while frontier.any():
            reach = linked[frontier].any(axis=0) & ~member
            member |= reach
            frontier = reach
        seen |= member
        blocks.append(np.flatnonzero(member))
    return blocks


def _jacobi(A, tol, vectors):
    A = A.copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex) if vectors else None
    scale = max(1.0, np.linalg.norm(A))
    threshold = tol * scale

    rounds = _round_robin(n)
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        if np.linalg.norm(A[offmask]) < threshold:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            mag = np.abs(apq)
            active = mag > 1e-300
            if not np.any(active):
                continue
            P, Q, apq, mag = P[active], Q[active], apq[active], mag[active]
            phase = apq / mag
            tau = (A[Q, Q].real - A[P, P].real) / (2.0 * mag)
            sign = np.where(tau >= 0, 1.0, -1.0)
            with np.errstate(over="ignore"):
                root = np.sqrt(1.0 + tau * tau)
            huge = np.abs(tau) > 1e150
            t = np.where(huge, 0.5 / np.where(huge, tau, 1.0), sign / (np.abs(tau) + np.where(huge, 1.0, root)))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            sp = s * phase
            sm = s * np.conj(phase)
            # disjoint pairs commute: A <- J^H A J with
            # J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on each (p, q)
            col_p, col_q = A[:, P], A[:, Q]
            A[:, P] = c * col_p - sm * col_q
            A[:, Q] = sp * col_p + c * col_q
            row_p, row_q = A[P, :], A[Q, :]
            A[P, :] = c[:, None] * row_p - sp[:, None] * row_q
            A[Q, :] = sm[:, None] * row_p + c[:, None] * row_q
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            A[P, P] = A[P, P].real
            A[Q, Q] = A[Q, Q].real
            if V is not None:
                v_p, v_q = V[:, P], V[:, Q]
                V[:, P] = c * v_p - sm * v_q
                V[:, Q] = sp * v_p + c * v_q
    else:
        raise NumericalFailure("Jacobi iteration did not converge")

    return np.real(np.diag(A)).copy(), V


def hermitian_eigenvalues(H, tol=JACOBI_TOL) -> Spectrum:
    """Real spectrum of a Hermitian matrix, descending."""
    w, _ = hermitian_eigh(H, tol=tol, vectors=False)
    return Spectrum(w)


def char_poly(M):
    """Characteristic polynomial coefficients (Faddeev-LeVerrier).

    Returns ``c`` with ``det(lambda I - M) = sum(c[k] lambda^(n-k))``, ``c[0] = 1``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    Mk = np.zeros_like(M)
    I = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        Mk = M @ (Mk + coeffs[k - 1] * I)
        coeffs[k] = -np.trace(Mk) / k
    return coeffs


def general_eigenvalues_small(M) -> Spectrum:
    """All eigenvalues of a general complex matrix of dimension <= 4.

    Dimensions 1 and 2 use closed forms; 3 and 4 use shifted QR (LAPACK).
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n > 4:
        raise ValueError(f"general_eigenvalues_small supports dim <= 4, got {n}")
    if not np.all(np.isfinite(M)):
        raise NumericalFailure("non-finite entries in eigensolver input")
    if n == 0:
        return Spectrum(np.zeros(0, dtype=complex))
    if n == 1:
        return Spectrum(M[0].copy())
    if n == 2:
        half_tr = 0.5 * (M[0, 0] + M[1, 1])
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        disc = np.sqrt(half_tr * half_tr - det)
        big = half_tr + disc if abs(half_tr + disc) >= abs(half_tr - disc) else half_tr - disc
        # Vieta for the small root avoids cancellation
        small = det / big if big != 0 else 0.0 * big
        return Spectrum(_descending(np.array([big, small], dtype=complex)))
    # QR on the matrix itself: the companion matrix of char_poly(M) turns a
    # k-fold root into O(eps^(1/k)) errors, and rho rho~ has triple zeros.
    values = np.linalg.eigvals(M)
    return Spectrum(_descending(values))


# Pade degrees and their 1-norm thresholds for double precision
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ),
}


def _pade(A, m):
    b = _PADE_COEFFS[m]
    n = A.shape[0]
    I = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    if m < 13:
        powers = [I, A2]
        for _ in range((m - 1) // 2 - 1):
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        U = A @ U
        V = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I)
    return U, V


def expm(A):
    """Matrix exponential by scaling and squaring with a Pade kernel."""
    A = np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise NumericalFailure("non-finite entries in expm input")
    norm = np.max(np.sum(np.abs(A), axis=0)) if A.size else 0.0
    squarings = 0
    for m in (3, 5, 7, 9):
        if norm <= _PADE_THETA[m]:
            break
    else:
        m = 13
        if norm > _PADE_THETA[13]:
            squarings = int(np.ceil(np.log2(norm / _PADE_THETA[13])))
            A = A / 2.0 ** squarings
    U, V = _pade(A, m)
    R = np.linalg.solve(V - U, V + U)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            R = R @ R
    if not np.all(np.isfinite(R)):
        raise NumericalFailure("expm overflowed")
    return R


def expm_apply(L, t, v):
    """Return ``exp(t L) v``."""
    if t < 0:
        raise ValueError("expm_apply requires t >= 0")
    v = np.asarray(v, dtype=complex)
    if t == 0:
        return v.copy()
    out = expm(t * np.asarray(L, dtype=complex)) @ v
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("non-finite result in expm_apply")
    return out


def nullspace_unit_trace(L, trace_functional, degeneracy_tol=1e-10):
    """Solve ``L x = 0`` subject to ``trace_functional . x = 1``.

    One row of ``L`` (the first one the trace functional touches) is replaced
    by the constraint and the square system is solved by LU with partial
    pivoting. A null space of dimension > 1 raises DegenerateSteadyState.
    """
    L = np.asarray(L, dtype=complex)
    f = np.asarray(trace_functional, dtype=complex)
    n = L.shape[0]
    if L.shape != (n, n) or f.shape != (n,):
        raise ValueError("shape mismatch between generator and trace functional")
    sv = np.linalg.svd(L, compute_uv=False)
    if n >= 2 and sv[-2] < degeneracy_tol * max(sv[0], 1.0):
        nullity = int(np.sum(sv < degeneracy_tol * max(sv[0], 1.0)))
        raise DegenerateSteadyState(f"stationary subspace has dimension {nullity}")
    row = int(np.flatnonzero(np.abs(f) > 0)[0])
    A = L.copy()
    A[row, :] = f
    rhs = np.zeros(n, dtype=complex)
    rhs[row] = 1.0
    x = np.linalg.solve(A, rhs)
    residual = np.max(np.abs(L @ x))
    if not np.isfinite(residual) or residual > 1e-10:
        raise NumericalFailure(f"steady-state residual {residual:.3e} too large")
    return x
