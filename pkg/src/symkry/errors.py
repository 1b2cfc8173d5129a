"""Exception types shared across the package."""


class BasisKindError(ValueError):
    """Raised when a basis of the wrong structural kind is passed to an operation."""


class DegeneratePairError(RuntimeError):
    """Raised when a symplectic extension cannot pair the new vector."""


class StepFailureError(RuntimeError):
    """A single integrator step could not be completed.

    Carries optional context in ``residual`` (last fixed-point residual,
    breakdown remainder norm, ...).
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class IntegrationAborted(RuntimeError):
    """A trajectory was aborted mid-run; ``summary`` holds the partial result."""

    def __init__(self, msg, summary=None):
        super().__init__(msg)
        self.summary = summary


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""
