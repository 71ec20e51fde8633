"""Exception types shared across the package."""


class SpinChaosError(Exception):
    """Base class for package-specific errors."""


class DimensionError(SpinChaosError):
    """Array shape or index range incompatible with the requested operation."""


class HermiticityError(SpinChaosError):
    """Matrix deviates from Hermiticity beyond tolerance."""


class StateValidationError(SpinChaosError):
    """Input is not a valid (density-matrix or POVM) state.

    ``code`` names the failed check and doubles as the machine-readable
    error code emitted by the CLI: one of ``"non-hermitian"``, ``"trace"``,
    ``"negative-eigenvalue"`` or ``"invalid-state"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class CapExceededError(SpinChaosError):
    """A dense-representation size cap would be exceeded."""


class ConvergenceError(SpinChaosError):
    """An iterative routine stopped without reaching its target residual."""


class IntegrationError(SpinChaosError):
    """State validity lost during ODE integration.

    ``step`` is the index of the offending time step.
    """

    def __init__(self, step: int, message: str):
        super().__init__(message)
        self.step = step
