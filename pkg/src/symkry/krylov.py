"""Krylov-type processes that build the local basis U and reduced matrix F.

Four builders share one outcome type: the standard Arnoldi iteration
(orthonormal basis of the Krylov subspace), the symplectic Arnoldi and
isotropic Arnoldi processes (orthonormal *and* symplectic bases of the form
[V, J^(-1) V]), and the Hamiltonian Lanczos recursion (symplectic basis
with a short two-sided recursion and reduced matrix [[0, T], [D, 0]]).

All Gram-Schmidt orthogonalizations run classically with one
reorthogonalization pass; the Lanczos recursion is kept short on purpose,
which is where its cost advantage comes from, at the price of slow
symplecticity drift for larger pair counts.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    BasisMatrix,
    ORTHONORMAL,
    SYMPLECTIC,
    SYMPLECTIC_ORTHONORMAL,
    apply_J,
    apply_J_inverse,
    omega,
)
from .errors import BasisKindError, DegeneratePairError

REACHED_K = "reached_k"
INVARIANT_SUBSPACE = "invariant_subspace"
BREAKDOWN = "breakdown"

# Remainder below DEFLATION_RTOL * (1-norm estimate of A) * (parent scale)
# is treated as an exactly invariant subspace.
DEFLATION_RTOL = 1e-12
# |tau| below BREAKDOWN_RTOL * ||u||^2 stops the Lanczos recursion.
BREAKDOWN_RTOL = 1e-12
# Residual below DEPENDENCE_RTOL * ||x|| means x is already representable.
DEPENDENCE_RTOL = 1e-12


@dataclass
class MatrixAction:
    """Matrix-free access to a (typically Hamiltonian) matrix A = Df(x).

    ``apply`` maps v -> A v; the matrix is assumed large with cheap action.
    """

    dim: int
    apply: Callable[[np.ndarray], np.ndarray]

    def __call__(self, v):
        return self.apply(v)

    @classmethod
    def from_dense(cls, A):
        A = np.asarray(A, dtype=float)
        return cls(A.shape[0], lambda v: A @ v)

    @classmethod
    def from_system(cls, system, x):
        """Jacobian action of a HamiltonianSystem at the linearization point x."""
        x = np.asarray(x, dtype=float)
        return cls(system.dim, lambda v: system.jvp(x, v))


class CountingAction:
    """Wrap a MatrixAction and count how often it is applied."""

    def __init__(self, action):
        self.inner = action
        self.dim = action.dim
        self.count = 0

    def apply(self, v):
        self.count += 1
        return self.inner.apply(v)

    def __call__(self, v):
        return self.apply(v)


@dataclass
class KrylovOutcome:
    """Result of a basis-building process.

    ``achieved_dim`` counts output columns of U (pairs count double);
    ``terminated`` is one of "reached_k", "invariant_subspace", "breakdown";
    ``residual_norm`` is the norm of the last unorthogonalized remainder
    (the quantity whose smallness triggered an early stop, or the final
    subdiagonal/remainder norm on a clean finish).  ``action_images``
    caches A @ U column by column so callers can cheaply re-project after
    extending the basis.
    """

    basis: BasisMatrix
    achieved_dim: int
    terminated: str
    residual_norm: float
    action_images: Optional[np.ndarray] = field(default=None, repr=False)
    n_matvec: int = 0


def _validate_start(action, v, k, k_max, what):
    v = np.asarray(v, dtype=float)
    if v.shape != (action.dim,):
        raise ValueError(f"start vector has length {v.shape}, expected ({action.dim},)")
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ValueError("start vector must be nonzero")
    if not (1 <= k <= k_max):
        raise ValueError(f"{what}: requested k={k} outside [1, {k_max}]")
    return v, nv


def _cgs2(w, Q):
    """Orthogonalize w against the columns of Q (classical GS, two passes)."""
    h = Q.T @ w
    w = w - Q @ h
    h2 = Q.T @ w
    w = w - Q @ h2
    return w, h + h2


def arnoldi(action, v, k):
    """Standard Arnoldi iteration: orthonormal U spanning K_k(A, v).

    F is upper Hessenberg with A U_j = U_j F_j + r e_j^T; an exactly
    invariant subspace stops the iteration early (never an error).
    """
    v, nv = _validate_start(action, v, k, action.dim, "arnoldi")
    n2 = action.dim
    U = np.zeros((n2, k))
    H = np.zeros((k, k))
    images = np.zeros((n2, k))
    U[:, 0] = v / nv

    achieved = k
    terminated = REACHED_K
    resid = 0.0
    anorm = 0.0
    matvecs = 0
    for j in range(k):
        w = action.apply(U[:, j])
        matvecs += 1
        images[:, j] = w
        anorm = max(anorm, np.linalg.norm(w))
        w, h = _cgs2(w, U[:, : j + 1])
        H[: j + 1, j] = h
        r = np.linalg.norm(w)
        resid = r
        if j + 1 == k:
            break
        if r <= DEFLATION_RTOL * anorm:
            achieved = j + 1
            terminated = INVARIANT_SUBSPACE
            break
        H[j + 1, j] = r
        U[:, j + 1] = w / r

    basis = BasisMatrix(U[:, :achieved], ORTHONORMAL, H[:achieved, :achieved])
    return KrylovOutcome(basis, achieved, terminated, float(resid),
                         images[:, :achieved], matvecs)


def _assemble_paired(action, V, terminated, resid, matvecs):
    """Form U = [V, J^(-1) V], F = U^T (A U) for an isotropic block V."""
    U = np.concatenate([V, apply_J_inverse(V)], axis=1)
    images = np.empty_like(U)
    for j in range(U.shape[1]):
        images[:, j] = action.apply(U[:, j])
    matvecs += U.shape[1]
    F = U.T @ images
    basis = BasisMatrix(U, SYMPLECTIC_ORTHONORMAL, F)
    return KrylovOutcome(basis, U.shape[1], terminated, float(resid), images, matvecs)


def symplectic_arnoldi(action, v, k):
    """Symplectic Arnoldi: Arnoldi vectors reorthogonalized in <.,.> and omega.

    Runs the standard Arnoldi recurrence for q_1..q_k and re-orthogonalizes
    each new q against span(V) and span(J V) to grow an isotropic V; the
    output U = [V, J^(-1) V] is symplectic and orthonormal and its range
    contains K_k'(A, v) for the achieved pair count k'.  F is assembled as
    U^T A U with 2k' extra actions at completion.
    """
    v, nv = _validate_start(action, v, k, action.dim // 2, "symplectic_arnoldi")
    n2 = action.dim
    q = v / nv
    Q = np.zeros((n2, k))
    V = np.zeros((n2, k))
    JV = np.zeros((n2, k))
    Q[:, 0] = q
    V[:, 0] = q
    JV[:, 0] = apply_J(q)
    nq = 1

    terminated = REACHED_K
    resid = 0.0
    anorm = 0.0
    matvecs = 0
    for j in range(1, k):
        w = action.apply(Q[:, j - 1])
        matvecs += 1
        anorm = max(anorm, np.linalg.norm(w))
        w, _ = _cgs2(w, Q[:, :j])
        r = np.linalg.norm(w)
        resid = r
        if r <= DEFLATION_RTOL * anorm:
            terminated = INVARIANT_SUBSPACE
            break
        q = w / r
        Q[:, j] = q
        s = q.copy()
        for _ in range(2):
            s = s - V[:, :nq] @ (V[:, :nq].T @ s)
            s = s - JV[:, :nq] @ (JV[:, :nq].T @ s)
        rs = np.linalg.norm(s)
        if rs <= DEPENDENCE_RTOL:
            # The companion vector vanished although the Arnoldi remainder
            # did not: no new information about the paired subspace.
            terminated = BREAKDOWN
            resid = rs
            break
        V[:, nq] = s / rs
        JV[:, nq] = apply_J(V[:, nq])
        nq += 1

    return _assemble_paired(action, V[:, :nq], terminated, resid, matvecs)


def isotropic_arnoldi(action, v, k):
    """Isotropic Arnoldi: direct <.,.>- and omega-orthogonalization.

    Q is orthonormal with Q^T J Q = 0, and U = [Q, J^(-1) Q] is symplectic
    and orthonormal.  Its range does not in general contain K_k(A, v), so a
    vanishing remainder is reported as a breakdown (no invariant-subspace
    information can be inferred).
    """
    v, nv = _validate_start(action, v, k, action.dim // 2, "isotropic_arnoldi")
    n2 = action.dim
    Q = np.zeros((n2, k))
    JQ = np.zeros((n2, k))
    Q[:, 0] = v / nv
    JQ[:, 0] = apply_J(Q[:, 0])
    nq = 1

    terminated = REACHED_K
    resid = 0.0
    anorm = 0.0
    matvecs = 0
    for j in range(1, k):
        w = action.apply(Q[:, j - 1])
        matvecs += 1
        anorm = max(anorm, np.linalg.norm(w))
        for _ in range(2):
            w = w - Q[:, :nq] @ (Q[:, :nq].T @ w)
            w = w - JQ[:, :nq] @ (JQ[:, :nq].T @ w)
        r = np.linalg.norm(w)
        resid = r
        if r <= DEFLATION_RTOL * anorm:
            terminated = BREAKDOWN
            break
        Q[:, nq] = w / r
        JQ[:, nq] = apply_J(Q[:, nq])
        nq += 1

    return _assemble_paired(action, Q[:, :nq], terminated, resid, matvecs)


def hamiltonian_lanczos(action, v, k):
    """Hamiltonian Lanczos: short two-sided recursion for a symplectic basis.

    Produces U = [u_1..u_k', v_1..v_k'] with omega(u_i, v_j) = delta_ij and
    reduced matrix F = [[0, T], [D, 0]], T symmetric tridiagonal from the
    recursion coefficients and D = diag(+-1).  The range of U contains
    A^j v for j = 0..2k'-1.  A vanishing pairing tau stops the recursion
    (breakdown) with the partial basis returned; the caller decides the
    fallback.  Each new remainder is omega-reorthogonalized against the
    basis built so far, which arrests the symplecticity drift of the bare
    recursion while keeping the orthogonalization bill below Arnoldi's.
    """
    v, nv = _validate_start(action, v, k, action.dim // 2, "hamiltonian_lanczos")
    us, vs, img_u, img_v = [], [], [], []
    alphas, betas, deltas = [], [], []

    u_hat = v.copy()
    scale_ref = nv
    terminated = REACHED_K
    resid = 0.0
    matvecs = 0
    for j in range(1, k + 1):
        nu = np.linalg.norm(u_hat)
        resid = nu
        if nu <= DEFLATION_RTOL * scale_ref:
            terminated = INVARIANT_SUBSPACE
            break
        w_hat = action.apply(u_hat)
        matvecs += 1
        tau = omega(u_hat, w_hat)
        if abs(tau) <= BREAKDOWN_RTOL * nu * nu:
            terminated = BREAKDOWN
            break
        sigma = np.sqrt(abs(tau))
        delta = 1.0 if tau > 0 else -1.0
        u_j = u_hat / sigma
        v_j = (delta / sigma) * w_hat
        us.append(u_j)
        vs.append(v_j)
        deltas.append(delta)
        img_u.append(w_hat / sigma)  # A u_j = delta_j v_j, stored as computed
        if j >= 2:
            betas.append(sigma)      # beta_{j-1} couples u_{j-1} and u_j in T

        x = action.apply(v_j)
        matvecs += 1
        img_v.append(x)
        alpha = -omega(v_j, x)
        alphas.append(alpha)
        if j < k:
            u_hat = x - alpha * u_j
            if j >= 2:
                u_hat = u_hat - betas[-1] * us[-2]
            # omega-reorthogonalize the remainder against all current pairs;
            # the recursion coefficients are left untouched (the removed
            # components sit at drift level) but without this the basis
            # loses symplecticity rapidly.  Costs 4j inner products per
            # pair, still well below one Arnoldi orthogonalization sweep.
            U_cur = np.column_stack(us + vs)
            for _ in range(2):
                u_hat = u_hat - U_cur @ apply_J_inverse(U_cur.T @ apply_J(u_hat))
            scale_ref = np.linalg.norm(x)

    kp = len(us)
    if kp == 0:
        basis = BasisMatrix(np.zeros((action.dim, 0)), SYMPLECTIC, np.zeros((0, 0)))
        return KrylovOutcome(basis, 0, terminated, float(resid),
                             np.zeros((action.dim, 0)), matvecs)

    U = np.column_stack(us + vs)
    T = np.diag(alphas)
    for i, b in enumerate(betas):
        T[i, i + 1] = b
        T[i + 1, i] = b
    F = np.zeros((2 * kp, 2 * kp))
    F[:kp, kp:] = T
    F[kp:, :kp] = np.diag(deltas)
    images = np.column_stack(img_u + img_v)
    basis = BasisMatrix(U, SYMPLECTIC, F)
    return KrylovOutcome(basis, 2 * kp, terminated, float(resid), images, matvecs)


def extend_basis_symplectic(basis, x):
    """Adjoin x (and a paired companion) to a symplectic basis [V | W].

    Two-pass omega-orthogonalization: x is orthogonalized against range(U)
    and adjoined as v_new; J x_hat is orthogonalized the same way and scaled
    so that omega(v_new, w_new) = 1.  Returns ``(new_basis, added)`` where
    ``added`` is False when x was already representable (basis unchanged).
    The reduced matrix of an extended basis is stale and set to None.
    """
    if not isinstance(basis, BasisMatrix) or not basis.is_symplectic_kind():
        raise BasisKindError("extend_basis_symplectic needs a symplectic basis")
    x = np.asarray(x, dtype=float)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("cannot extend with a zero vector")

    U = basis.columns
    m = U.shape[1]
    kp = m // 2
    x_hat = x.copy()
    for _ in range(2 if m else 0):
        x_hat = x_hat - U @ basis.left_apply(x_hat)
    if np.linalg.norm(x_hat) <= DEPENDENCE_RTOL * nx:
        return basis, False

    v_new = x_hat / np.linalg.norm(x_hat)
    y = apply_J(x_hat)
    for _ in range(2 if m else 0):
        y = y - U @ basis.left_apply(y)
    pairing = omega(v_new, y)
    if abs(pairing) <= DEPENDENCE_RTOL * max(np.linalg.norm(y), 1e-300):
        raise DegeneratePairError("paired companion of the new vector degenerated")
    w_new = y / pairing

    cols = np.empty((U.shape[0], m + 2))
    cols[:, :kp] = U[:, :kp]
    cols[:, kp] = v_new
    cols[:, kp + 1: m + 1] = U[:, kp:]
    cols[:, m + 1] = w_new
    return BasisMatrix(cols, SYMPLECTIC, None), True


def extend_basis_orthogonal(basis, x):
    """Adjoin x to an orthonormal basis by Gram-Schmidt with reorthogonalization.

    Returns ``(new_basis, added)``; a dependent x leaves the basis unchanged
    with ``added`` False.  The reduced matrix is stale and set to None.
    """
    if not isinstance(basis, BasisMatrix) or basis.kind != ORTHONORMAL:
        raise BasisKindError("extend_basis_orthogonal needs an orthonormal basis")
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.dim,):
        raise ValueError(f"vector has length {x.shape}, expected ({basis.dim},)")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("cannot extend with a zero vector")

    Q = basis.columns
    r = x.copy()
    if Q.shape[1]:
        r, _ = _cgs2(r, Q)
    nr = np.linalg.norm(r)
    if nr <= DEPENDENCE_RTOL * nx:
        return basis, False
    cols = np.concatenate([Q, (r / nr)[:, None]], axis=1)
    return BasisMatrix(cols, ORTHONORMAL, None), True


def orthogonalization_work(process, k):
    """Inner-product count (n-length dots) each process spends building a
    basis, including reduced-matrix assembly, as implemented above.

    ``k`` counts Krylov vectors (pairs for the paired processes); output
    dimension is k for "arnoldi" and 2k otherwise.  At fixed output
    dimension the ordering is
    hamiltonian-lanczos < arnoldi < isotropic-arnoldi < symplectic-arnoldi,
    the short recursion being the economic one even with its drift-control
    reorthogonalization.
    """
    if process == "arnoldi":
        # CGS2 against j columns costs 2j dots plus 2 norms per vector.
        return sum(2 * (j + 1) + 2 for j in range(k))
    if process == "hamiltonian-lanczos":
        # tau and alpha pairings, two norms, and the two-pass
        # omega-reorthogonalization of the remainder against 2(j-1)
        # columns; F costs nothing.
        return sum(4 + 4 * (j - 1) for j in range(1, k + 1))
    if process == "isotropic-arnoldi":
        # two passes against Q and JQ (2j dots each pass) per new vector,
        # plus U^T (A U) assembly on 2k columns.
        return sum(4 * j + 2 for j in range(1, k)) + (2 * k) ** 2
    if process == "symplectic-arnoldi":
        # Arnoldi sweep, the V/JV double orthogonalization, and F assembly.
        arnoldi_part = sum(2 * j + 2 for j in range(1, k))
        pairing_part = sum(4 * j + 2 for j in range(1, k))
        return arnoldi_part + pairing_part + (2 * k) ** 2
    raise ValueError(f"unknown process {process!r}")


def reduced_matrix(action, basis, images=None, n_cached=0):
    """Assemble F = U^+ (A U), reusing cached A-image columns when given.

    ``images`` holds A @ U[:, :n_cached] in the *current* column order;
    remaining columns are computed with fresh actions.  Returns (F, AU).
    """
    U = basis.columns
    AU = np.empty_like(U)
    if n_cached:
        AU[:, :n_cached] = images[:, :n_cached]
    for j in range(n_cached, U.shape[1]):
        AU[:, j] = action.apply(U[:, j])
    F = basis.left_apply(AU)
    return F, AU
