"""symkry: structure-preserving Krylov exponential integrators.

Large sparse Hamiltonian systems x' = J^(-1) grad H(x) are advanced by
exponential integrators whose matrix functions are evaluated in small
(optionally symplectic) Krylov subspaces.  Symplectic bases make the
energy error of the projected schemes bounded instead of drifting.

Submodules: ``core`` (symplectic linear algebra, system interface),
``krylov`` (basis processes), ``matfun`` (exp and phi kernels),
``integrators`` (EE / EEMP / IEMP steppers), ``problems`` (wave, NLS,
Klein-Gordon benchmarks), ``harness`` (experiment runner and CSV metrics).
"""

from ._version import __version__
from .core import (
    BasisMatrix,
    HamiltonianSystem,
    QuadraticHamiltonianSystem,
    apply_J,
    apply_J_inverse,
    canonical_J,
    check_hamiltonian_matrix,
    check_orthonormal_basis,
    check_symplectic_basis,
    join_state,
    omega,
    split_state,
    symplectic_left_apply,
)
from .errors import (
    BasisKindError,
    ConfigError,
    DegeneratePairError,
    IntegrationAborted,
    StepFailureError,
)
from .harness import (
    ExperimentConfig,
    MetricsSeries,
    reference_solution,
    relative_energy_error,
    run,
    solution_error,
)
from .integrators import (
    IempResult,
    StepperConfig,
    StepResult,
    TrajectorySummary,
    integrate,
    step_ee,
    step_eemp,
    step_iemp,
)
from .krylov import (
    KrylovOutcome,
    MatrixAction,
    arnoldi,
    extend_basis_orthogonal,
    extend_basis_symplectic,
    hamiltonian_lanczos,
    isotropic_arnoldi,
    symplectic_arnoldi,
)
from .matfun import expm, phi1, phi1_scaled_identities_check
from .problems import (
    DiscreteLaplacian,
    GridSpec,
    build_klein_gordon,
    build_linear_wave,
    build_nls,
    build_problem,
    laplacian_apply,
    list_problems,
)

__all__ = [
    "__version__",
    "BasisMatrix", "HamiltonianSystem", "QuadraticHamiltonianSystem",
    "apply_J", "apply_J_inverse", "canonical_J", "check_hamiltonian_matrix",
    "check_orthonormal_basis", "check_symplectic_basis", "join_state",
    "omega", "split_state", "symplectic_left_apply",
    "BasisKindError", "ConfigError", "DegeneratePairError",
    "IntegrationAborted", "StepFailureError",
    "ExperimentConfig", "MetricsSeries", "reference_solution",
    "relative_energy_error", "run", "solution_error",
    "IempResult", "StepperConfig", "StepResult", "TrajectorySummary",
    "integrate", "step_ee", "step_eemp", "step_iemp",
    "KrylovOutcome", "MatrixAction", "arnoldi", "extend_basis_orthogonal",
    "extend_basis_symplectic", "hamiltonian_lanczos", "isotropic_arnoldi",
    "symplectic_arnoldi",
    "expm", "phi1", "phi1_scaled_identities_check",
    "DiscreteLaplacian", "GridSpec", "build_klein_gordon",
    "build_linear_wave", "build_nls", "build_problem", "laplacian_apply",
    "list_problems",
]
