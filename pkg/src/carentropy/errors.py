"""Exception types shared across the package."""


class CarEntropyError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CarEntropyError, ValueError):
    """An input violates a structural requirement (shape, symmetry, norm)."""


class ZeroModeError(CarEntropyError, ValueError):
    """The one-particle generator has an eigenvalue at numerical zero.

    Raised where the "absence of zero modes" precondition is required
    (spectral projections onto the positive axis, Fock-space oracles).
    """


class SingularMatrixError(CarEntropyError, ValueError):
    """A matrix that must be inverted is singular or too ill-conditioned."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class SizeLimitError(CarEntropyError, ValueError):
    """A combinatorial or Fock-space size cap was exceeded."""


class ScenarioError(CarEntropyError, ValueError):
    """A scenario document failed validation.

    ``path`` points at the offending field, e.g. ``"excitations[2].mode"``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
