"""Benchmark Hamiltonian systems from method-of-lines PDE discretizations.

Three one-dimensional benchmarks, each discretized with second-order
central differences on an equidistant grid and carrying an exact discrete
energy and an analytic Jacobian-vector product:

  linear-wave    q' = p, p' = Lap q + c  with a Dirichlet Laplacian and a
                 fixed source sampled from (x (x - L))^2 / 8.
  nls            cubic nonlinear Schroedinger equation with a sin^2
                 potential well on [-4 pi, 4 pi], periodic, written in
                 real and imaginary parts.
  klein-gordon   u_tt = u_xx - m^2 u - g u^3, periodic.

The Laplacian prefactor is 1/(dx)^2 = (n/L)^2 throughout.  Energies are
written so that f = J^(-1) grad H holds exactly for the implemented
dynamics; energy-error metrics do not depend on the overall sign choice.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    HamiltonianSystem,
    QuadraticHamiltonianSystem,
    apply_J_inverse,
    join_state,
    split_state,
)

PERIODIC = "periodic"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class GridSpec:
    """Equidistant grid with n points on an interval of the given length."""

    n: int
    length: float
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("grid needs at least 3 points")
        if self.boundary not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self):
        return self.length / self.n


@dataclass(frozen=True)
class DiscreteLaplacian:
    """Central-difference Laplacian stencil, applied matrix-free.

    Symmetric and negative semidefinite (periodic) or negative definite
    (dirichlet); scale is 1/(dx)^2.
    """

    n: int
    length: float
    boundary: str = PERIODIC

    @property
    def scale(self):
        return (self.n / self.length) ** 2

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n:
            raise ValueError(f"vector has length {v.shape[0]}, expected {self.n}")
        if self.boundary == PERIODIC:
            out = np.roll(v, 1) - 2.0 * v + np.roll(v, -1)
        else:
            out = -2.0 * v.copy()
            out[:-1] += v[1:]
            out[1:] += v[:-1]
        return self.scale * out

    def dense(self):
        return np.column_stack([self.apply(e) for e in np.eye(self.n)])

    def eigenvalues_periodic(self):
        """Closed-form spectrum -(2/dx^2)(1 - cos(2 pi j / n)), j = 0..n-1."""
        j = np.arange(self.n)
        return -2.0 * self.scale * (1.0 - np.cos(2.0 * np.pi * j / self.n))


def laplacian_apply(lap, v):
    """Apply the discrete Laplacian stencil to a grid vector."""
    return lap.apply(v)


class LinearWaveSystem(QuadraticHamiltonianSystem):
    """Discretized linear wave equation with a fixed source term.

    H(q, p) = q^T Lap q / 2 - ||p||^2 / 2 + c^T q, whose canonical flow is
    q' = p, p' = Lap q + c.
    """

    def __init__(self, n, L=2.0, boundary=DIRICHLET):
        lap = DiscreteLaplacian(n, float(L), boundary)

        def s_apply(x):
            q, p = split_state(x)
            return join_state(lap.apply(q), -p)

        x_grid = (np.arange(1, n + 1)) * lap.length / n
        c = 0.125 * (x_grid * (x_grid - lap.length)) ** 2
        super().__init__(s_apply, join_state(c, np.zeros(n)), dim=2 * n)
        self.laplacian = lap
        self.grid = x_grid
        u0 = 1.0 / (1.0 + np.sin(np.pi * x_grid) ** 2) - 1.0
        self.initial_state = join_state(u0, np.zeros(n))


class NonlinearSchroedingerSystem(HamiltonianSystem):
    """Cubic Schroedinger equation with a sin^2 potential, in (Re, Im) parts.

    H = -(q^T Lap q + p^T Lap p)/4 + sum (q_i^2 + p_i^2)^2 / 4
        - (V0/2) sum sin^2(x_i) (q_i^2 + p_i^2),

    on [-4 pi, 4 pi] with periodic boundary.  The initial profile is the
    stationary-well state sqrt(V0 sin^2 x + B) e^(i theta(x)) with
    tan(theta) = sqrt(1 + V0/B) tan(x), theta unwrapped to a continuous,
    increasing phase across the tan singularities.
    """

    def __init__(self, n, V0=1.0, B=1.0):
        super().__init__(2 * n)
        self.n = n
        self.V0 = float(V0)
        self.B = float(B)
        self.laplacian = DiscreteLaplacian(n, 8.0 * np.pi, PERIODIC)
        self.grid = -4.0 * np.pi + np.arange(n) * self.laplacian.length / n
        self.potential = np.sin(self.grid) ** 2

        amplitude = np.sqrt(self.V0 * self.potential + self.B)
        theta = self._phase(self.grid)
        self.initial_state = join_state(amplitude * np.cos(theta),
                                        amplitude * np.sin(theta))

    def _phase(self, x):
        slope = np.sqrt(1.0 + self.V0 / self.B)
        k = np.round(x / np.pi)
        return k * np.pi + np.arctan(slope * np.tan(x - k * np.pi))

    def _grad_h(self, x):
        q, p = split_state(x)
        density = q * q + p * p
        gq = -0.5 * self.laplacian.apply(q) + density * q - self.V0 * self.potential * q
        gp = -0.5 * self.laplacian.apply(p) + density * p - self.V0 * self.potential * p
        return join_state(gq, gp)

    def f(self, x):
        return apply_J_inverse(self._grad_h(x))

    def energy(self, x):
        q, p = split_state(x)
        density = q * q + p * p
        quad = -0.25 * (q @ self.laplacian.apply(q) + p @ self.laplacian.apply(p))
        return float(quad + 0.25 * np.sum(density ** 2)
                     - 0.5 * self.V0 * np.sum(self.potential * density))

    def jvp(self, x, v):
        q, p = split_state(x)
        a, b = split_state(np.asarray(v, dtype=float))
        cross = 2.0 * q * p
        ga = (-0.5 * self.laplacian.apply(a)
              + (3.0 * q * q + p * p - self.V0 * self.potential) * a + cross * b)
        gb = (-0.5 * self.laplacian.apply(b)
              + (q * q + 3.0 * p * p - self.V0 * self.potential) * b + cross * a)
        return apply_J_inverse(join_state(ga, gb))


class KleinGordonSystem(HamiltonianSystem):
    """Nonlinear Klein-Gordon equation u_tt = u_xx - m^2 u - g u^3, periodic.

    Dynamics q' = p, p' = Lap q - m^2 q - g q^3 with conserved energy
    H = q^T Lap q / 2 - ||p||^2 / 2 - sum(m^2 q_i^2 / 2 + g q_i^4 / 4)
    (sign fixed so f = J^(-1) grad H).  Initial profile
    u = A (1 + cos(2 pi x / L)), u_t = 0.  With g = 0 the system is linear
    and exposes its affine decomposition.
    """

    def __init__(self, n, L=1.0, m=0.5, g=1.0, A=1.0):
        super().__init__(2 * n)
        self.n = n
        self.m = float(m)
        self.g = float(g)
        self.laplacian = DiscreteLaplacian(n, float(L), PERIODIC)
        self.grid = np.arange(n) * self.laplacian.length / n
        u0 = float(A) * (1.0 + np.cos(2.0 * np.pi * self.grid / self.laplacian.length))
        self.initial_state = join_state(u0, np.zeros(n))

    @property
    def is_linear(self):
        return self.g == 0.0

    def f(self, x):
        q, p = split_state(x)
        return join_state(p, self.laplacian.apply(q) - self.m ** 2 * q - self.g * q ** 3)

    def energy(self, x):
        q, p = split_state(x)
        return float(0.5 * q @ self.laplacian.apply(q) - 0.5 * p @ p
                     - np.sum(0.5 * self.m ** 2 * q ** 2 + 0.25 * self.g * q ** 4))

    def jvp(self, x, v):
        q, _ = split_state(x)
        a, b = split_state(np.asarray(v, dtype=float))
        return join_state(b, self.laplacian.apply(a) - (self.m ** 2 + 3.0 * self.g * q * q) * a)

    def affine_parts(self):
        if not self.is_linear:
            raise NotImplementedError("Klein-Gordon system is nonlinear for g != 0")
        return (lambda v: self.jvp(self.initial_state, v)), np.zeros(self.dim)


def build_linear_wave(n=400, L=2.0, boundary=DIRICHLET):
    """Linear wave benchmark; defaults L=2, n=400, Dirichlet stencil."""
    return LinearWaveSystem(n, L, boundary)


def build_nls(n=500, V0=1.0, B=1.0):
    """Nonlinear Schroedinger benchmark; defaults n=500, V0 = B = 1."""
    return NonlinearSchroedingerSystem(n, V0, B)


def build_klein_gordon(n=400, L=1.0, m=0.5, g=1.0, A=1.0):
    """Klein-Gordon benchmark; defaults n=400, L=1, m=0.5, g=1, A=1."""
    return KleinGordonSystem(n, L, m, g, A)


PROBLEM_REGISTRY = {
    "linear-wave": (build_linear_wave, {"n": 400, "L": 2.0, "boundary": DIRICHLET}),
    "nls": (build_nls, {"n": 500, "V0": 1.0, "B": 1.0}),
    "klein-gordon": (build_klein_gordon, {"n": 400, "L": 1.0, "m": 0.5, "g": 1.0, "A": 1.0}),
}


def list_problems():
    """Names and default parameters of the registered benchmark systems."""
    return {name: dict(defaults) for name, (_, defaults) in PROBLEM_REGISTRY.items()}


def build_problem(name, **overrides):
    """Instantiate a registered problem with parameter overrides."""
    if name not in PROBLEM_REGISTRY:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(PROBLEM_REGISTRY)}")
    builder, defaults = PROBLEM_REGISTRY[name]
    params = dict(defaults)
    for key, value in overrides.items():
        if key not in defaults:
            raise KeyError(f"problem {name!r} has no parameter {key!r}")
        params[key] = value
    if "n" in params:
        params["n"] = int(params["n"])
    return builder(**params)
