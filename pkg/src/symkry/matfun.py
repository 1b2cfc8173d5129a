"""Dense small-matrix kernels: the matrix exponential and the phi function.

These run on the reduced m x m matrices produced by the basis processes
(m <= ~64), the only place transcendental matrix functions are evaluated.
phi(z) = (e^z - 1)/z is the first exponential-integrator kernel; phi(M) is
computed without inverting M, so singular M is fine.
"""

from dataclasses import dataclass

import numpy as np

# Pade coefficient tables and switching thresholds for the standard
# scaling-and-squaring design with degrees 3, 5, 7, 9, 13.
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068,
    13: 5.371920351148152,
}


def _validate_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _pade_expm(A, degree):
    n = A.shape[0]
    c = _PADE_COEFFS[degree]
    I = np.eye(n)
    if degree == 13:
        A2 = A @ A
        A4 = A2 @ A2
        A6 = A2 @ A4
        U = A @ (A6 @ (c[13] * A6 + c[11] * A4 + c[9] * A2)
                 + c[7] * A6 + c[5] * A4 + c[3] * A2 + c[1] * I)
        V = (A6 @ (c[12] * A6 + c[10] * A4 + c[8] * A2)
             + c[6] * A6 + c[4] * A4 + c[2] * A2 + c[0] * I)
    else:
        powers = [I, A @ A]
        for _ in range(2, degree // 2 + 1):
            powers.append(powers[-1] @ powers[1])
        U = c[1] * I
        V = c[0] * I
        for j in range(3, degree + 1, 2):
            U = U + c[j] * powers[(j - 1) // 2]
        for j in range(2, degree + 1, 2):
            V = V + c[j] * powers[j // 2]
        U = A @ U
    return np.linalg.solve(V - U, V + U)


def expm(M):
    """Matrix exponential by Pade approximation with scaling and squaring."""
    M = _validate_square(M)
    if M.shape[0] == 0:
        return M.copy()
    norm = np.linalg.norm(M, 1)
    for degree in (3, 5, 7, 9):
        if norm <= _THETA[degree]:
            return _pade_expm(M, degree)
    s = 0
    if norm > _THETA[13]:
        s = int(np.ceil(np.log2(norm / _THETA[13])))
    F = _pade_expm(M / 2.0 ** s, 13)
    for _ in range(s):
        F = F @ F
    return F


def phi1(M):
    """phi(M) with phi(z) = (e^z - 1)/z, evaluated without inverting M.

    Uses the augmented-matrix device: the exponential of [[M, I], [0, 0]]
    carries phi(M) in its upper-right block, so singular M is handled and
    M phi(M) = e^M - I holds to rounding.
    """
    M = _validate_square(M)
    m = M.shape[0]
    if m == 0:
        return M.copy()
    W = np.zeros((2 * m, 2 * m))
    W[:m, :m] = M
    W[:m, m:] = np.eye(m)
    return expm(W)[:m, m:]


@dataclass
class PhiIdentityReport:
    """Defect norms of the phi-function identities the integrators rest on:

    reflection  ||e^(-M) phi(M) - phi(-M)||_F
    doubling    ||e^M phi(M) - (2 phi(2M) - phi(M))||_F
    """

    reflection: float
    doubling: float

    def max_defect(self):
        return max(self.reflection, self.doubling)


def phi1_scaled_identities_check(M):
    """Evaluate both phi identities on M and report the defect norms."""
    M = _validate_square(M)
    eM = expm(M)
    phiM = phi1(M)
    reflection = np.linalg.norm(expm(-M) @ phiM - phi1(-M))
    doubling = np.linalg.norm(eM @ phiM - (2.0 * phi1(2.0 * M) - phiM))
    return PhiIdentityReport(float(reflection), float(doubling))
