"""Canonical symplectic linear algebra and the Hamiltonian-system interface.

States live in R^(2n) as contiguous arrays with the configuration half q
stacked above the momentum half p.  The canonical structure matrix is

    J = [[0, I], [-I, 0]],

fixed here once; every other module imports these operations instead of
re-deriving block signs.  The bilinear form is omega(x, y) = x^T J y, so the
canonical pairs (e_i, e_{n+i}) satisfy omega(e_i, e_{n+i}) = +1.
"""

from abc import ABC, abstractmethod

import numpy as np

from .errors import BasisKindError

# Frobenius-defect tolerance for structural checks (double precision with
# O(n) accumulation).
STRUCTURE_TOL = 1e-10

ORTHONORMAL = "orthonormal"
SYMPLECTIC = "symplectic"
SYMPLECTIC_ORTHONORMAL = "symplectic-orthonormal"

_KINDS = (ORTHONORMAL, SYMPLECTIC, SYMPLECTIC_ORTHONORMAL)


def _check_even(m, what="vector"):
    if m % 2 != 0:
        raise ValueError(f"{what} dimension must be even, got {m}")


def split_state(x):
    """Return the (q, p) halves of a phase-space vector as views."""
    x = np.asarray(x)
    _check_even(x.shape[0])
    n = x.shape[0] // 2
    return x[:n], x[n:]


def join_state(q, p):
    """Stack configuration and momentum halves into one phase-space vector."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape:
        raise ValueError(f"q and p must have equal length, got {q.shape} and {p.shape}")
    return np.concatenate([q, p])


def apply_J(v):
    """Apply J = [[0, I], [-I, 0]]: (q, p) -> (p, -q).

    Works on vectors and on matrices (acting on axis 0), so ``apply_J(U)``
    is J @ U without forming J.
    """
    v = np.asarray(v)
    _check_even(v.shape[0])
    n = v.shape[0] // 2
    return np.concatenate([v[n:], -v[:n]], axis=0)


def apply_J_inverse(v):
    """Apply J^(-1) = -J: (q, p) -> (-p, q)."""
    v = np.asarray(v)
    _check_even(v.shape[0])
    n = v.shape[0] // 2
    return np.concatenate([-v[n:], v[:n]], axis=0)


def omega(x, y):
    """Canonical symplectic form omega(x, y) = x^T J y.

    Bilinear and skew: omega(x, y) = -omega(y, x).  Computed via apply_J, so
    omega(x, y) == dot(x, apply_J(y)) identically.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(x @ apply_J(y))


def canonical_J(n):
    """Dense 2n x 2n matrix of J; diagnostic use at small sizes."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def symplectic_left_inverse_apply(U, v):
    """Apply U^+ = J_k^(-1) U^T J_n, the symplectic left inverse of U.

    ``v`` may be a vector or a matrix of columns.  U must be (numerically)
    symplectic for the left-inverse property U^+ U = I to hold.
    """
    U = np.asarray(U)
    _check_even(U.shape[1], "basis column")
    w = U.T @ apply_J(v)
    return apply_J_inverse(w)


def check_symplectic_basis(U, tol=STRUCTURE_TOL):
    """True iff ||U^T J U - J_k||_F <= tol (absolute defect)."""
    U = np.asarray(U)
    m = U.shape[1]
    _check_even(m, "basis column")
    G = U.T @ apply_J(U)
    G -= canonical_J(m // 2)
    return bool(np.linalg.norm(G) <= tol)


def check_orthonormal_basis(U, tol=STRUCTURE_TOL):
    """True iff ||U^T U - I||_F <= tol."""
    U = np.asarray(U)
    G = U.T @ U - np.eye(U.shape[1])
    return bool(np.linalg.norm(G) <= tol)


def check_hamiltonian_matrix(A, tol=1e-8):
    """True iff ||A^T - J A J||_F <= tol * max(1, ||A||_F).

    A matrix with A^T = J A J is Hamiltonian; Jacobians of Hamiltonian
    vector fields have this structure.  Dense diagnostic, small sizes only.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    _check_even(A.shape[0], "matrix")
    J = canonical_J(A.shape[0] // 2)
    defect = A.T - J @ A @ J
    return bool(np.linalg.norm(defect) <= tol * max(1.0, np.linalg.norm(A)))


class BasisMatrix:
    """Tall basis U in R^(2n x m) with structural kind and reduced matrix.

    kind is one of "orthonormal", "symplectic", "symplectic-orthonormal".
    ``reduced`` is the m x m projection F = U^+ A U of the current matrix
    action (None when stale, e.g. right after an extension).
    """

    __slots__ = ("columns", "kind", "reduced")

    def __init__(self, columns, kind, reduced=None):
        columns = np.asarray(columns, dtype=float)
        if columns.ndim != 2:
            raise ValueError("columns must be a 2-d array")
        _check_even(columns.shape[0])
        if kind not in _KINDS:
            raise ValueError(f"unknown basis kind {kind!r}")
        if kind in (SYMPLECTIC, SYMPLECTIC_ORTHONORMAL):
            _check_even(columns.shape[1], "symplectic basis column")
        self.columns = columns
        self.kind = kind
        self.reduced = None if reduced is None else np.asarray(reduced, dtype=float)

    @property
    def dim(self):
        return self.columns.shape[0]

    @property
    def n_columns(self):
        return self.columns.shape[1]

    def is_symplectic_kind(self):
        return self.kind in (SYMPLECTIC, SYMPLECTIC_ORTHONORMAL)

    def left_apply(self, v):
        """Apply the left inverse U^+ appropriate for the kind.

        Orthonormal kinds use U^T.  For a basis of the paired form
        [V, J^(-1) V] the transpose coincides with the symplectic left
        inverse, so symplectic-orthonormal bases are served by U^T as well.
        """
        if self.kind == SYMPLECTIC:
            return symplectic_left_inverse_apply(self.columns, v)
        return self.columns.T @ np.asarray(v)

    def project(self, v):
        """Oblique projection U U^+ v onto range(U)."""
        return self.columns @ self.left_apply(v)

    def require_symplectic(self, tol=1e-6):
        if not self.is_symplectic_kind():
            raise BasisKindError(f"operation requires a symplectic basis, got kind {self.kind!r}")
        if self.n_columns and not check_symplectic_basis(self.columns, tol):
            raise BasisKindError("basis marked symplectic violates U^T J U = J_k beyond tolerance")


def symplectic_left_apply(basis, v):
    """U^+ v for a symplectic BasisMatrix (misuse error otherwise)."""
    if not isinstance(basis, BasisMatrix):
        basis = BasisMatrix(basis, SYMPLECTIC)
    if not basis.is_symplectic_kind():
        raise BasisKindError(f"symplectic_left_apply needs a symplectic basis, got {basis.kind!r}")
    return symplectic_left_inverse_apply(basis.columns, v)


class HamiltonianSystem(ABC):
    """Black-box Hamiltonian system x' = f(x) with conserved energy.

    Implementations provide the phase-space dimension 2n, the vector field
    f, the energy H, and the Jacobian-vector product Df(x) v.  All methods
    must be pure (read-only after construction) so systems can be shared
    between concurrent runs.
    """

    is_linear = False

    def __init__(self, dim):
        _check_even(dim, "system")
        self.dim = dim

    @abstractmethod
    def f(self, x):
        """Vector field value at x."""

    @abstractmethod
    def energy(self, x):
        """Conserved energy H(x)."""

    @abstractmethod
    def jvp(self, x, v):
        """Jacobian-vector product Df(x) v."""

    def affine_parts(self):
        """For linear systems, (matvec of the constant Jacobian, constant c)
        with f(x) = A x + c.  Raises for nonlinear systems."""
        raise NotImplementedError("system does not expose an affine decomposition")

    def jacobian_dense(self, x):
        """Densify Df(x) column by column; diagnostic, small sizes only."""
        cols = [self.jvp(x, e) for e in np.eye(self.dim)]
        return np.column_stack(cols)


class QuadraticHamiltonianSystem(HamiltonianSystem):
    """Linear system f(x) = J^(-1)(S x + d) with H(x) = x^T S x / 2 + d^T x.

    ``S`` may be a dense symmetric matrix or a symmetric matvec callable.
    """

    is_linear = True

    def __init__(self, S, d=None, dim=None):
        if callable(S):
            if dim is None:
                raise ValueError("dim is required when S is a callable")
            self._s_apply = S
        else:
            S = np.asarray(S, dtype=float)
            dim = S.shape[0]
            self._s_apply = lambda v: S @ v
        super().__init__(dim)
        self.d = np.zeros(self.dim) if d is None else np.asarray(d, dtype=float)
        if self.d.shape != (self.dim,):
            raise ValueError("constant term has wrong length")

    def f(self, x):
        return apply_J_inverse(self._s_apply(x) + self.d)

    def energy(self, x):
        return float(0.5 * x @ self._s_apply(x) + self.d @ x)

    def jvp(self, x, v):
        return apply_J_inverse(self._s_apply(v))

    def affine_parts(self):
        return (lambda v: apply_J_inverse(self._s_apply(v))), apply_J_inverse(self.d)


def jvp_matches_finite_difference(system, x, v, rel_tol=1e-5):
    """Central finite-difference check of the Jacobian-vector product.

    Uses eps = 1e-6 (1 + ||x||) and accepts relative error rel_tol.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    eps = 1e-6 * (1.0 + np.linalg.norm(x))
    fd = (system.f(x + eps * v) - system.f(x - eps * v)) / (2.0 * eps)
    jv = system.jvp(x, v)
    scale = max(np.linalg.norm(fd), np.linalg.norm(jv), 1e-30)
    return bool(np.linalg.norm(jv - fd) <= rel_tol * scale)
